#include "geomgan/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "geomgan/data.hpp"

namespace fs = std::filesystem;

namespace geomgan {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("config: bad number for " + key + ": '" + s + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("config: bad integer for " + key + ": '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Partition parse_partition(const std::string& s) {
  if (s == "w") return Partition::w;
  if (s == "b") return Partition::b;
  if (s == "zeta") return Partition::zeta;
  if (s == "theta") return Partition::theta;
  throw std::invalid_argument("config: unknown partition '" + s + "'");
}

const std::set<std::string> kKnownKeys = {
    "variant", "divergence", "C", "margin", "dataset", "optimizer", "lr", "batch",
    "kd", "kg", "constraint", "clip", "wdecay", "scope", "max_steps", "seeds",
    "out", "log_interval", "radius_stds", "min_count", "eval_samples",
    "dump_samples", "pool_size", "theta0", "wall_clock",
};

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  if (dataset != "grid25" && dataset != "lines")
    throw std::invalid_argument("config: dataset must be grid25 or lines");
  if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
  if (radius_stds <= 0) throw std::invalid_argument("config: radius_stds must be positive");
  if (min_count < 1) throw std::invalid_argument("config: min_count must be >= 1");
  if (eval_samples < 1 || dump_samples < 1)
    throw std::invalid_argument("config: sample counts must be >= 1");
}

KvPairs read_config_text(const std::string& text) {
  KvPairs pairs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key=value, got '" + line + "'");
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return pairs;
}

KvPairs read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_config_text(ss.str());
}

ExperimentConfig resolve_config(const KvPairs& file_pairs, const KvPairs& overrides) {
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : file_pairs) {
    if (!kKnownKeys.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
    kv[k] = v;
  }
  for (const auto& [k, v] : overrides) {
    if (!kKnownKeys.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
    kv[k] = v;
  }

  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto get = [&](const char* k) { return kv.at(k); };

  if (!has("variant")) throw std::invalid_argument("config: missing required key 'variant'");
  if (!has("dataset")) throw std::invalid_argument("config: missing required key 'dataset'");

  ExperimentConfig cfg;
  cfg.train.variant.kind = parse_variant_kind(get("variant"));
  if (cfg.train.variant.kind == VariantKind::fgan) {
    if (!has("divergence"))
      throw std::invalid_argument("config: variant=fgan requires key 'divergence'");
    cfg.train.variant.divergence = parse_divergence(get("divergence"));
  } else if (has("divergence")) {
    throw std::invalid_argument("config: 'divergence' is only valid for variant=fgan");
  }
  if (has("C")) {
    if (cfg.train.variant.kind != VariantKind::geometric)
      throw std::invalid_argument("config: 'C' is only valid for variant=geometric");
    cfg.train.variant.C = parse_double("C", get("C"));
  }
  if (has("margin")) {
    if (cfg.train.variant.kind != VariantKind::ebgan)
      throw std::invalid_argument("config: 'margin' is only valid for variant=ebgan");
    cfg.train.variant.margin = parse_double("margin", get("margin"));
  }

  cfg.dataset = get("dataset");

  // Vanilla GAN trains with Adam (beta1 = 0.5); everything else uses RMSprop.
  cfg.train.optimizer = cfg.train.variant.kind == VariantKind::vanilla_gan
                            ? OptimizerKind::adam
                            : OptimizerKind::rmsprop;
  if (has("optimizer")) cfg.train.optimizer = parse_optimizer(get("optimizer"));

  if (has("lr")) cfg.train.lr = parse_double("lr", get("lr"));
  if (has("batch")) cfg.train.batch = static_cast<std::size_t>(parse_long("batch", get("batch")));
  if (has("kd")) cfg.train.k_d = static_cast<int>(parse_long("kd", get("kd")));
  if (has("kg")) cfg.train.k_g = static_cast<int>(parse_long("kg", get("kg")));
  if (has("constraint")) cfg.train.constraint = parse_constraint(get("constraint"));
  if (has("clip")) {
    if (cfg.train.constraint != ConstraintMode::clip)
      throw std::invalid_argument("config: 'clip' is only valid with constraint=clip");
    cfg.train.clip_c = parse_double("clip", get("clip"));
  }
  if (has("wdecay")) {
    if (cfg.train.constraint != ConstraintMode::weight_decay)
      throw std::invalid_argument("config: 'wdecay' is only valid with constraint=weight-decay");
    cfg.train.wdecay_lambda = parse_double("wdecay", get("wdecay"));
  }
  if (has("scope")) {
    if (cfg.train.constraint == ConstraintMode::none)
      throw std::invalid_argument("config: 'scope' is only valid with a constraint mode");
    for (const auto& part : split(get("scope"), ','))
      cfg.train.constraint_scope.push_back(parse_partition(trim(part)));
  } else {
    cfg.train.constraint_scope = cfg.train.effective_scope();
  }
  if (has("max_steps")) cfg.train.max_steps = parse_long("max_steps", get("max_steps"));
  if (has("log_interval")) cfg.train.log_interval = parse_long("log_interval", get("log_interval"));
  if (has("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : split(get("seeds"), ','))
      cfg.seeds.push_back(static_cast<std::uint64_t>(parse_long("seeds", trim(s))));
  }
  if (has("out")) cfg.out_dir = get("out");
  if (has("radius_stds")) cfg.radius_stds = parse_double("radius_stds", get("radius_stds"));
  if (has("min_count")) cfg.min_count = static_cast<int>(parse_long("min_count", get("min_count")));
  if (has("eval_samples"))
    cfg.eval_samples = static_cast<std::size_t>(parse_long("eval_samples", get("eval_samples")));
  if (has("dump_samples"))
    cfg.dump_samples = static_cast<std::size_t>(parse_long("dump_samples", get("dump_samples")));
  if (has("pool_size"))
    cfg.pool_size = static_cast<std::size_t>(parse_long("pool_size", get("pool_size")));
  if (has("theta0")) {
    if (cfg.dataset != "lines")
      throw std::invalid_argument("config: 'theta0' is only valid for dataset=lines");
    cfg.theta0 = parse_double("theta0", get("theta0"));
  }
  if (has("wall_clock")) {
    const std::string& v = get("wall_clock");
    if (v == "real")
      cfg.wall_clock = true;
    else if (v == "none")
      cfg.wall_clock = false;
    else
      throw std::invalid_argument("config: wall_clock must be none or real");
  }
  cfg.train.measure_wall = cfg.wall_clock;
  cfg.validate();
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["variant"] = variant_kind_name(cfg.train.variant.kind);
  if (cfg.train.variant.kind == VariantKind::fgan)
    kv["divergence"] = divergence_name(cfg.train.variant.divergence);
  if (cfg.train.variant.kind == VariantKind::geometric)
    kv["C"] = format_double(cfg.train.variant.C);
  if (cfg.train.variant.kind == VariantKind::ebgan)
    kv["margin"] = format_double(cfg.train.variant.margin);
  kv["dataset"] = cfg.dataset;
  kv["optimizer"] = optimizer_name(cfg.train.optimizer);
  kv["lr"] = format_double(cfg.train.lr);
  kv["batch"] = std::to_string(cfg.train.batch);
  kv["kd"] = std::to_string(cfg.train.k_d);
  kv["kg"] = std::to_string(cfg.train.k_g);
  kv["constraint"] = constraint_name(cfg.train.constraint);
  if (cfg.train.constraint == ConstraintMode::clip)
    kv["clip"] = format_double(cfg.train.clip_c);
  if (cfg.train.constraint == ConstraintMode::weight_decay)
    kv["wdecay"] = format_double(cfg.train.wdecay_lambda);
  if (cfg.train.constraint != ConstraintMode::none) {
    std::string scope;
    for (Partition p : cfg.train.effective_scope()) {
      if (!scope.empty()) scope += ',';
      scope += partition_name(p);
    }
    kv["scope"] = scope;
  }
  kv["max_steps"] = std::to_string(cfg.train.max_steps);
  kv["log_interval"] = std::to_string(cfg.train.log_interval);
  std::string seeds;
  for (std::uint64_t s : cfg.seeds) {
    if (!seeds.empty()) seeds += ',';
    seeds += std::to_string(s);
  }
  kv["seeds"] = seeds;
  kv["out"] = cfg.out_dir;
  kv["radius_stds"] = format_double(cfg.radius_stds);
  kv["min_count"] = std::to_string(cfg.min_count);
  kv["eval_samples"] = std::to_string(cfg.eval_samples);
  kv["dump_samples"] = std::to_string(cfg.dump_samples);
  if (cfg.dataset == "grid25") kv["pool_size"] = std::to_string(cfg.pool_size);
  if (cfg.dataset == "lines") kv["theta0"] = format_double(cfg.theta0);
  kv["wall_clock"] = cfg.wall_clock ? "real" : "none";

  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

ExperimentConfig parse_config(const std::string& path, const KvPairs& overrides) {
  return resolve_config(read_config_file(path), overrides);
}

// --- trace csv ---------------------------------------------------------------

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << format_double(r.d_loss) << ',' << format_double(r.g_loss)
        << ',' << format_double(r.sv_fraction) << ',' << format_double(r.equilibrium_gap)
        << ',' << r.covered_modes << ',' << format_double(r.hq_fraction) << ','
        << r.wall_ms << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceHeader)
    throw std::runtime_error("bad trace header in " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 8) throw std::runtime_error("bad trace row in " + path);
    TraceRow r;
    r.step = parse_long("step", f[0]);
    r.d_loss = std::strtod(f[1].c_str(), nullptr);
    r.g_loss = std::strtod(f[2].c_str(), nullptr);
    r.sv_fraction = std::strtod(f[3].c_str(), nullptr);
    r.equilibrium_gap = std::strtod(f[4].c_str(), nullptr);
    r.covered_modes = static_cast<int>(parse_long("covered_modes", f[5]));
    r.hq_fraction = std::strtod(f[6].c_str(), nullptr);
    r.wall_ms = parse_long("wall_ms", f[7]);
    rows.push_back(r);
  }
  return rows;
}

// --- svg ----------------------------------------------------------------------

namespace {
std::string fixed2(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  if (res.ec != std::errc()) throw std::runtime_error("fixed2 failed");
  return std::string(buf, res.ptr);
}
}  // namespace

void render_scatter_svg(const Array& samples, const Array& true_samples,
                        const std::string& path) {
  constexpr double kLo = -25.0, kHi = 25.0;
  constexpr double kMargin = 40.0, kPlot = 560.0;
  constexpr double kCanvas = kPlot + 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - kLo) / (kHi - kLo) * kPlot; };
  auto py = [&](double v) { return kMargin + (kHi - v) / (kHi - kLo) * kPlot; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
      << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas << "\">\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kPlot
      << "\" height=\"" << kPlot << "\" fill=\"white\" stroke=\"black\"/>\n";
  auto layer = [&](const Array& pts, const char* color, const char* radius) {
    out << "<g fill=\"" << color << "\" fill-opacity=\"0.6\">\n";
    for (std::size_t i = 0; i < pts.rows(); ++i) {
      double x = pts.at(i, 0), y = pts.at(i, 1);
      if (x < kLo || x > kHi || y < kLo || y > kHi) continue;
      out << "<circle cx=\"" << fixed2(px(x)) << "\" cy=\"" << fixed2(py(y)) << "\" r=\""
          << radius << "\"/>\n";
    }
    out << "</g>\n";
  };
  if (true_samples.size() > 0 && true_samples.cols() == 2)
    layer(true_samples, "#7fa8d0", "1.8");
  if (samples.size() > 0 && samples.cols() == 2) layer(samples, "#d1495b", "1.8");
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

// --- run orchestration -----------------------------------------------------------

namespace {

struct DatasetBundle {
  TrainDataSource source;
  std::function<Array(std::size_t, RngStream&)> sample_true;
  std::size_t latent_dim = 0;
};

DatasetBundle make_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  DatasetBundle b;
  if (cfg.dataset == "grid25") {
    GridMixtureSpec spec;
    b.latent_dim = 4;
    auto batch_rng = std::make_shared<RngStream>(seed, rng_streams::kDataBatch);
    if (cfg.pool_size > 0) {
      RngStream pool_rng(seed, rng_streams::kDataPool);
      auto pool = std::make_shared<FixedPool>(
          sample_grid_mixture(spec, cfg.pool_size, pool_rng), *batch_rng);
      b.source.real_batch = [pool](std::size_t n) { return pool->next_batch(n); };
    } else {
      b.source.real_batch = [spec, batch_rng](std::size_t n) {
        return sample_grid_mixture(spec, n, *batch_rng);
      };
    }
    auto latent_rng = std::make_shared<RngStream>(seed, rng_streams::kLatentTrain);
    b.source.latent_batch = [latent_rng](std::size_t n) {
      return sample_latent(n, 4, *latent_rng);
    };
    b.sample_true = [spec](std::size_t n, RngStream& rng) {
      return sample_grid_mixture(spec, n, rng);
    };
  } else {
    b.latent_dim = 1;
    auto batch_rng = std::make_shared<RngStream>(seed, rng_streams::kDataBatch);
    b.source.real_batch = [batch_rng](std::size_t n) {
      return sample_parallel_lines_real(n, *batch_rng);
    };
    auto latent_rng = std::make_shared<RngStream>(seed, rng_streams::kLatentTrain);
    b.source.latent_batch = [latent_rng](std::size_t n) {
      return sample_parallel_lines_latent(n, *latent_rng);
    };
    b.sample_true = [](std::size_t n, RngStream& rng) {
      return sample_parallel_lines_real(n, rng);
    };
  }
  return b;
}

AdversarialModel make_model(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.dataset == "grid25") {
    MlpSpec disc = MlpSpec::dense({2, 128, 128, 128, 1}, Activation::relu, false);
    MlpSpec gen = MlpSpec::dense({4, 128, 128, 128, 2}, Activation::relu, true);
    return build_adversarial_model(cfg.train.variant, disc, gen, cfg.train.batch, seed);
  }
  return build_lines_model(cfg.train.variant, cfg.train.batch, cfg.theta0, seed);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  std::string variant_dir = variant_kind_name(cfg.train.variant.kind);
  for (std::uint64_t seed : cfg.seeds) {
    fs::path dir = fs::path(cfg.out_dir) / variant_dir / ("seed" + std::to_string(seed));
    fs::create_directories(dir);

    ExperimentConfig per_seed = cfg;
    per_seed.seeds = {seed};
    per_seed.train.seed = seed;
    {
      std::ofstream out(dir / "config.resolved", std::ios::binary);
      if (!out) throw std::runtime_error("cannot write config.resolved in " + dir.string());
      out << serialize_config(per_seed);
    }

    DatasetBundle data = make_dataset(cfg, seed);
    AdversarialModel model = make_model(cfg, seed);
    Trainer trainer(model, per_seed.train, data.source);

    bool is_grid = cfg.dataset == "grid25";
    Array eval_z;
    if (is_grid) {
      RngStream eval_rng(seed, rng_streams::kLatentEval);
      eval_z = sample_latent(cfg.eval_samples, data.latent_dim, eval_rng);
    }
    GridMixtureSpec grid_spec;

    std::vector<TraceRow> trace;
    auto hook = [&](const RunRecord& r) {
      TraceRow row;
      row.step = r.step;
      row.d_loss = r.d_loss;
      row.g_loss = r.g_loss;
      row.sv_fraction = r.sv_fraction;
      row.equilibrium_gap = r.equilibrium_gap;
      row.wall_ms = r.wall_ms;
      if (is_grid && std::isfinite(r.d_loss) && std::isfinite(r.g_loss)) {
        model.graph.bind("z", eval_z);
        const Array& samples = model.graph.forward(model.gen_output);
        ModeReport rep = mode_coverage(samples, grid_spec, cfg.radius_stds, cfg.min_count);
        row.covered_modes = rep.covered_modes;
        row.hq_fraction = rep.high_quality_fraction;
      }
      trace.push_back(row);
    };

    RunHistory history = trainer.run(hook);
    write_trace_csv(trace, (dir / "trace.csv").string());

    RunOutput run;
    run.dir = dir.string();
    run.seed = seed;
    run.finite = !history.aborted;
    if (!trace.empty()) run.final_row = trace.back();

    if (!history.aborted) {
      RngStream dump_rng(seed, rng_streams::kLatentEval + 100);
      Array dump_z = cfg.dataset == "grid25"
                         ? sample_latent(cfg.dump_samples, data.latent_dim, dump_rng)
                         : sample_parallel_lines_latent(cfg.dump_samples, dump_rng);
      model.graph.bind("z", dump_z);
      Array samples = model.graph.forward(model.gen_output);
      dump_xy_csv(samples, (dir / "samples_final.csv").string());

      RngStream true_rng(seed, rng_streams::kLatentEval + 101);
      Array true_samples = data.sample_true(cfg.eval_samples, true_rng);
      render_scatter_svg(samples, true_samples, (dir / "scatter_final.svg").string());
    } else {
      result.all_finite = false;
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

// --- compare -----------------------------------------------------------------------

void compare_runs(const std::vector<std::string>& run_dirs, const std::string& out_path) {
  struct Row {
    std::string variant;
    long seed;
    int covered_modes;
    double hq_fraction;
    double equilibrium_gap;
  };
  std::vector<Row> rows;
  for (const auto& dir : run_dirs) {
    fs::path p(dir);
    KvPairs kv = read_config_file((p / "config.resolved").string());
    std::string variant, seeds;
    for (const auto& [k, v] : kv) {
      if (k == "variant") variant = v;
      if (k == "seeds") seeds = v;
    }
    if (variant.empty() || seeds.empty())
      throw std::runtime_error("compare_runs: incomplete config.resolved in " + dir);
    auto trace = read_trace_csv((p / "trace.csv").string());
    if (trace.empty()) throw std::runtime_error("compare_runs: empty trace in " + dir);
    const TraceRow& last = trace.back();
    rows.push_back({variant, parse_long("seeds", seeds), last.covered_modes,
                    last.hq_fraction, last.equilibrium_gap});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.variant != b.variant) return a.variant < b.variant;
    return a.seed < b.seed;
  });
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "variant,seed,covered_modes,hq_fraction,equilibrium_gap\n";
  for (const auto& r : rows)
    out << r.variant << ',' << r.seed << ',' << r.covered_modes << ','
        << format_double(r.hq_fraction) << ',' << format_double(r.equilibrium_gap) << '\n';
  if (!out) throw std::runtime_error("write failed for " + out_path);
}

}  // namespace geomgan
