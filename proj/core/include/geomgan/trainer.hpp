#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geomgan/variants.hpp"

namespace geomgan {

// Alternating minimization: K_d discriminator steps on {w, b, zeta}, then
// K_g generator steps on theta, with the Lipschitz-style constraint modes
// applied after each affected step.

enum class OptimizerKind { rmsprop, adam };
enum class ConstraintMode { none, clip, l2_project, weight_decay };

std::string optimizer_name(OptimizerKind k);
std::string constraint_name(ConstraintMode m);
OptimizerKind parse_optimizer(const std::string& s);
ConstraintMode parse_constraint(const std::string& s);

struct TrainConfig {
  VariantSpec variant;
  OptimizerKind optimizer = OptimizerKind::rmsprop;
  double lr = 0.001;
  std::size_t batch = 500;
  int k_d = 1;
  int k_g = 1;
  ConstraintMode constraint = ConstraintMode::none;
  double clip_c = 0.01;
  double wdecay_lambda = 0.001;
  std::vector<Partition> constraint_scope;  // empty: mode-specific default
  long max_steps = 10000;                   // alternating cycles
  std::uint64_t seed = 0;
  long log_interval = 100;
  // Optimizer coefficients. RMSprop decay/eps follow the usual defaults;
  // Adam beta1 = 0.5 matches the adversarial-training setting.
  double rmsprop_decay = 0.9;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double opt_eps = 1e-8;
  bool measure_wall = false;  // off: wall_ms stays 0 and runs are byte-reproducible

  std::vector<Partition> effective_scope() const;
  void validate() const;
};

// --- optimizer steps -------------------------------------------------------

struct RmspropState {
  std::vector<Array> v;  // second moments, aligned with the scope ordering
};

struct AdamState {
  std::vector<Array> m;
  std::vector<Array> v;
  long t = 0;
};

// v <- decay v + (1-decay) g^2 ; p <- p - lr g / (sqrt(v) + eps)
void rmsprop_step(Graph& graph, const std::vector<ParamEntry>& scope,
                  RmspropState& state, double lr, double decay, double eps);

// Standard bias-corrected first/second moment update.
void adam_step(Graph& graph, const std::vector<ParamEntry>& scope, AdamState& state,
               double lr, double beta1, double beta2, double eps);

// --- constraint modes -------------------------------------------------------

// Every entry of in-scope parameters clamped to [-c, c].
void clip_weights(Graph& graph, const std::vector<Partition>& scope, double c);

// Each in-scope parameter tensor p replaced by min(1, 1/||p||_2) p.
void project_unit_l2(Graph& graph, const std::vector<Partition>& scope);

// Decoupled post-step shrink p <- p - lr lambda p.
void weight_decay_step(Graph& graph, const std::vector<Partition>& scope,
                       double lambda, double lr);

// --- training loop -----------------------------------------------------------

struct TrainDataSource {
  std::function<Array(std::size_t)> real_batch;
  std::function<Array(std::size_t)> latent_batch;
};

struct RunRecord {
  long step = 0;  // completed alternating cycles
  double d_loss = 0.0;
  double g_loss = 0.0;
  double sv_fraction = 0.0;
  double equilibrium_gap = 0.0;
  long long wall_ms = 0;
};

struct RunHistory {
  std::vector<RunRecord> rows;
  bool aborted = false;
  long abort_step = 0;
  std::string abort_reason;
};

class Trainer {
 public:
  Trainer(AdversarialModel& model, TrainConfig config, TrainDataSource data);

  // One optimizer step each; false once the run has aborted on a non-finite
  // loss. Constraints are applied before returning.
  bool discriminator_step();
  bool generator_step();
  bool cycle();  // K_d discriminator steps, then K_g generator steps

  using LogHook = std::function<void(const RunRecord&)>;
  RunHistory run(const LogHook& hook = nullptr);

  long cycles_done() const { return cycles_; }
  double last_d_loss() const { return last_d_loss_; }
  double last_g_loss() const { return last_g_loss_; }
  const std::vector<double>& last_scores_real() const { return last_scores_real_; }
  const std::vector<double>& last_scores_fake() const { return last_scores_fake_; }
  bool aborted() const { return aborted_; }
  const std::string& abort_reason() const { return abort_reason_; }

 private:
  void capture_scores();
  void apply_discriminator_constraints();
  void apply_generator_constraints();
  void abort(const std::string& what, double value);

  AdversarialModel& model_;
  TrainConfig cfg_;
  TrainDataSource data_;
  std::vector<ParamEntry> disc_scope_;
  std::vector<ParamEntry> gen_scope_;
  RmspropState rms_d_, rms_g_;
  AdamState adam_d_, adam_g_;
  long cycles_ = 0;
  double last_d_loss_ = 0.0;
  double last_g_loss_ = 0.0;
  std::vector<double> last_scores_real_;
  std::vector<double> last_scores_fake_;
  bool aborted_ = false;
  long abort_step_ = 0;
  std::string abort_reason_;
};

}  // namespace geomgan
