#pragma once

#include <string>
#include <utility>
#include <vector>

#include "geomgan/metrics.hpp"
#include "geomgan/trainer.hpp"

namespace geomgan {

// Experiment orchestration: resolve a config, run seeded experiments, and
// write deterministic trace/sample/plot artifacts per run directory.

struct ExperimentConfig {
  TrainConfig train;
  std::string dataset;             // "grid25" | "lines"
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "runs";
  double radius_stds = 3.0;
  int min_count = 5;
  std::size_t eval_samples = 2500;
  std::size_t dump_samples = 2000;
  std::size_t pool_size = 100000;  // grid25: fixed pool; 0 samples fresh batches
  double theta0 = 2.0;             // lines: initial generator parameter
  bool wall_clock = false;

  void validate() const;
};

using KvPairs = std::vector<std::pair<std::string, std::string>>;

// Line-oriented key=value text; '#' starts a comment. Later entries win.
KvPairs read_config_text(const std::string& text);
KvPairs read_config_file(const std::string& path);

// Applies file pairs then overrides, checks key validity and inter-key
// constraints, and materializes every default.
ExperimentConfig resolve_config(const KvPairs& file_pairs, const KvPairs& overrides = {});

// Canonical serialization: sorted keys, every resolved value explicit.
// Parsing the result reproduces the identical config (and identical bytes).
std::string serialize_config(const ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& path, const KvPairs& overrides = {});

// One row of trace.csv; the header order is fixed.
struct TraceRow {
  long step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double sv_fraction = 0.0;
  double equilibrium_gap = 0.0;
  int covered_modes = 0;
  double hq_fraction = 0.0;
  long long wall_ms = 0;
};

inline constexpr const char* kTraceHeader =
    "step,d_loss,g_loss,sv_fraction,equilibrium_gap,covered_modes,hq_fraction,wall_ms";

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);
std::vector<TraceRow> read_trace_csv(const std::string& path);

struct RunOutput {
  std::string dir;
  std::uint64_t seed = 0;
  bool finite = true;
  TraceRow final_row;
};

struct ExperimentResult {
  std::vector<RunOutput> runs;
  bool all_finite = true;
};

// Trains every seed and writes, per run directory,
// <out>/<variant>/seed<k>/{config.resolved, trace.csv, samples_final.csv,
// scatter_final.svg}. Returns per-run outcomes; a non-finite abort keeps the
// partial trace with a marker row.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Standalone SVG scatter: true samples under generated samples on a fixed
// [-25, 25]^2 viewport; byte output is deterministic for identical inputs.
void render_scatter_svg(const Array& samples, const Array& true_samples,
                        const std::string& path);

// One summary row per run directory: variant, seed, and the final trace
// metrics, sorted by variant then seed.
void compare_runs(const std::vector<std::string>& run_dirs, const std::string& out_path);

// Shortest round-trip decimal form, locale-independent ('.' separator).
std::string format_double(double v);

}  // namespace geomgan
