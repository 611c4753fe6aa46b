#include "geomgan/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "geomgan/metrics.hpp"

namespace geomgan {

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::rmsprop ? "rmsprop" : "adam";
}

std::string constraint_name(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::none: return "none";
    case ConstraintMode::clip: return "clip";
    case ConstraintMode::l2_project: return "l2-project";
    case ConstraintMode::weight_decay: return "weight-decay";
  }
  return "?";
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "rmsprop") return OptimizerKind::rmsprop;
  if (s == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer: " + s);
}

ConstraintMode parse_constraint(const std::string& s) {
  if (s == "none") return ConstraintMode::none;
  if (s == "clip") return ConstraintMode::clip;
  if (s == "l2-project") return ConstraintMode::l2_project;
  if (s == "weight-decay") return ConstraintMode::weight_decay;
  throw std::invalid_argument("unknown constraint: " + s);
}

std::vector<Partition> TrainConfig::effective_scope() const {
  if (!constraint_scope.empty()) return constraint_scope;
  switch (constraint) {
    case ConstraintMode::none: return {};
    case ConstraintMode::clip:
    case ConstraintMode::l2_project:
      return {Partition::zeta};
    case ConstraintMode::weight_decay:
      // The final-layer (w, b) carries the hyperplane; decay only the
      // feature map and generator.
      return {Partition::zeta, Partition::theta};
  }
  return {};
}

void TrainConfig::validate() const {
  variant.validate();
  if (lr <= 0) throw std::invalid_argument("TrainConfig: lr must be positive");
  if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
  if (k_d < 1 || k_g < 1) throw std::invalid_argument("TrainConfig: K_d, K_g must be >= 1");
  if (max_steps < 1) throw std::invalid_argument("TrainConfig: max_steps must be >= 1");
  if (log_interval < 1) throw std::invalid_argument("TrainConfig: log_interval must be >= 1");
  if (constraint == ConstraintMode::clip && clip_c <= 0)
    throw std::invalid_argument("TrainConfig: clip bound must be positive");
  if (wdecay_lambda < 0)
    throw std::invalid_argument("TrainConfig: weight decay must be nonnegative");
}

// --- optimizer steps ---------------------------------------------------------

namespace {
void ensure_state(std::vector<Array>& state, const std::vector<ParamEntry>& scope,
                  const Graph& graph) {
  if (!state.empty()) return;
  state.reserve(scope.size());
  for (const auto& e : scope)
    state.emplace_back(graph.param_value(e.name).shape, 0.0);
}
}  // namespace

void rmsprop_step(Graph& graph, const std::vector<ParamEntry>& scope,
                  RmspropState& state, double lr, double decay, double eps) {
  if (decay <= 0 || decay >= 1) throw std::invalid_argument("rmsprop: bad decay");
  if (eps <= 0) throw std::invalid_argument("rmsprop: bad eps");
  ensure_state(state.v, scope, graph);
  for (std::size_t k = 0; k < scope.size(); ++k) {
    Array& p = graph.param_value(scope[k].name);
    const Array& g = graph.param_grad(scope[k].name);
    Array& v = state.v[k];
    if (!g.same_shape(p)) throw std::invalid_argument("rmsprop: gradient shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      double gi = g.data[i];
      v.data[i] = decay * v.data[i] + (1.0 - decay) * gi * gi;
      p.data[i] -= lr * gi / (std::sqrt(v.data[i]) + eps);
    }
  }
}

void adam_step(Graph& graph, const std::vector<ParamEntry>& scope, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
    throw std::invalid_argument("adam: bad betas");
  ensure_state(state.m, scope, graph);
  ensure_state(state.v, scope, graph);
  ++state.t;
  double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < scope.size(); ++k) {
    Array& p = graph.param_value(scope[k].name);
    const Array& g = graph.param_grad(scope[k].name);
    if (!g.same_shape(p)) throw std::invalid_argument("adam: gradient shape mismatch");
    Array& m = state.m[k];
    Array& v = state.v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      double gi = g.data[i];
      m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * gi;
      v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * gi * gi;
      double mhat = m.data[i] / c1;
      double vhat = v.data[i] / c2;
      p.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

// --- constraints ---------------------------------------------------------------

namespace {
bool in_scope(Partition p, const std::vector<Partition>& scope) {
  for (Partition s : scope)
    if (s == p) return true;
  return false;
}
}  // namespace

void clip_weights(Graph& graph, const std::vector<Partition>& scope, double c) {
  if (c <= 0) throw std::invalid_argument("clip_weights: bound must be positive");
  for (const auto& e : graph.params().entries()) {
    if (!in_scope(e.partition, scope)) continue;
    for (double& v : graph.param_value(e.name).data)
      v = std::max(-c, std::min(c, v));
  }
}

void project_unit_l2(Graph& graph, const std::vector<Partition>& scope) {
  for (const auto& e : graph.params().entries()) {
    if (!in_scope(e.partition, scope)) continue;
    Array& p = graph.param_value(e.name);
    double norm_sq = 0.0;
    for (double v : p.data) norm_sq += v * v;
    double norm = std::sqrt(norm_sq);
    if (norm > 1.0)
      for (double& v : p.data) v /= norm;
  }
}

void weight_decay_step(Graph& graph, const std::vector<Partition>& scope,
                       double lambda, double lr) {
  if (lambda < 0) throw std::invalid_argument("weight_decay_step: lambda must be >= 0");
  double factor = 1.0 - lr * lambda;
  for (const auto& e : graph.params().entries()) {
    if (!in_scope(e.partition, scope)) continue;
    for (double& v : graph.param_value(e.name).data) v *= factor;
  }
}

// --- trainer ---------------------------------------------------------------------

Trainer::Trainer(AdversarialModel& model, TrainConfig config, TrainDataSource data)
    : model_(model), cfg_(std::move(config)), data_(std::move(data)) {
  cfg_.validate();
  if (!data_.real_batch || !data_.latent_batch)
    throw std::invalid_argument("Trainer: data source must supply both batch kinds");
  bool has_bn = false;
  for (std::size_t i = 0; i < model_.graph.node_count(); ++i)
    if (model_.graph.node(static_cast<NodeId>(i)).kind == OpKind::batchnorm) has_bn = true;
  if (has_bn && cfg_.batch < 2)
    throw std::invalid_argument("Trainer: batch must be >= 2 with batchnorm layers");
  for (const auto& e : model_.graph.params().entries()) {
    if (e.partition == Partition::theta)
      gen_scope_.push_back(e);
    else
      disc_scope_.push_back(e);
  }
}

void Trainer::abort(const std::string& what, double value) {
  aborted_ = true;
  abort_step_ = cycles_ + 1;
  abort_reason_ = what + " non-finite at step " + std::to_string(abort_step_) +
                  " (value " + std::to_string(value) + ")";
}

bool Trainer::discriminator_step() {
  if (aborted_) return false;
  model_.graph.bind("x", data_.real_batch(cfg_.batch));
  model_.graph.bind("z", data_.latent_batch(cfg_.batch));
  double v = model_.graph.forward(model_.losses.d_loss).data[0];
  last_d_loss_ = v;
  if (!std::isfinite(v)) {
    abort("d_loss", v);
    return false;
  }
  model_.graph.backward(model_.losses.d_loss);
  if (cfg_.optimizer == OptimizerKind::rmsprop)
    rmsprop_step(model_.graph, disc_scope_, rms_d_, cfg_.lr, cfg_.rmsprop_decay, cfg_.opt_eps);
  else
    adam_step(model_.graph, disc_scope_, adam_d_, cfg_.lr, cfg_.adam_beta1, cfg_.adam_beta2,
              cfg_.opt_eps);
  apply_discriminator_constraints();
  capture_scores();
  return true;
}

bool Trainer::generator_step() {
  if (aborted_) return false;
  model_.graph.bind("z", data_.latent_batch(cfg_.batch));
  if (model_.g_step_uses_real)
    model_.graph.bind("x", data_.real_batch(cfg_.batch));
  double v = model_.graph.forward(model_.losses.g_loss).data[0];
  last_g_loss_ = v;
  if (!std::isfinite(v)) {
    abort("g_loss", v);
    return false;
  }
  model_.graph.backward(model_.losses.g_loss);
  if (cfg_.optimizer == OptimizerKind::rmsprop)
    rmsprop_step(model_.graph, gen_scope_, rms_g_, cfg_.lr, cfg_.rmsprop_decay, cfg_.opt_eps);
  else
    adam_step(model_.graph, gen_scope_, adam_g_, cfg_.lr, cfg_.adam_beta1, cfg_.adam_beta2,
              cfg_.opt_eps);
  apply_generator_constraints();
  return true;
}

void Trainer::apply_discriminator_constraints() {
  std::vector<Partition> scope;
  for (Partition p : cfg_.effective_scope())
    if (p != Partition::theta) scope.push_back(p);
  switch (cfg_.constraint) {
    case ConstraintMode::none: break;
    case ConstraintMode::clip: clip_weights(model_.graph, scope, cfg_.clip_c); break;
    case ConstraintMode::l2_project: project_unit_l2(model_.graph, scope); break;
    case ConstraintMode::weight_decay:
      weight_decay_step(model_.graph, scope, cfg_.wdecay_lambda, cfg_.lr);
      break;
  }
  // The W-GAN hyperplane lives on the l-inf unit ball regardless of the
  // configured Lipschitz mode.
  if (cfg_.variant.kind == VariantKind::wgan)
    clip_weights(model_.graph, {Partition::w}, 1.0);
}

void Trainer::apply_generator_constraints() {
  std::vector<Partition> scope;
  for (Partition p : cfg_.effective_scope())
    if (p == Partition::theta) scope.push_back(p);
  if (scope.empty()) return;
  switch (cfg_.constraint) {
    case ConstraintMode::none: break;
    case ConstraintMode::clip: clip_weights(model_.graph, scope, cfg_.clip_c); break;
    case ConstraintMode::l2_project: project_unit_l2(model_.graph, scope); break;
    case ConstraintMode::weight_decay:
      weight_decay_step(model_.graph, scope, cfg_.wdecay_lambda, cfg_.lr);
      break;
  }
}

void Trainer::capture_scores() {
  if (model_.scores_trained) {
    last_scores_real_ = model_.graph.value(model_.scores_real).data;
    last_scores_fake_ = model_.graph.value(model_.scores_fake).data;
  } else {
    implied_md_scores(model_.graph.value(model_.features_real),
                      model_.graph.value(model_.features_fake), last_scores_real_,
                      last_scores_fake_);
  }
}

bool Trainer::cycle() {
  for (int i = 0; i < cfg_.k_d; ++i)
    if (!discriminator_step()) return false;
  for (int i = 0; i < cfg_.k_g; ++i)
    if (!generator_step()) return false;
  ++cycles_;
  return true;
}

RunHistory Trainer::run(const LogHook& hook) {
  RunHistory history;
  auto start = std::chrono::steady_clock::now();
  for (long c = 0; c < cfg_.max_steps; ++c) {
    bool ok = cycle();
    if (!ok) {
      history.aborted = true;
      history.abort_step = abort_step_;
      history.abort_reason = abort_reason_;
      RunRecord marker;
      marker.step = abort_step_;
      marker.d_loss = last_d_loss_;
      marker.g_loss = last_g_loss_;
      marker.sv_fraction = std::numeric_limits<double>::quiet_NaN();
      marker.equilibrium_gap = std::numeric_limits<double>::quiet_NaN();
      history.rows.push_back(marker);
      if (hook) hook(marker);
      return history;
    }
    long step = c + 1;
    if (step % cfg_.log_interval == 0 || step == cfg_.max_steps) {
      RunRecord r;
      r.step = step;
      r.d_loss = last_d_loss_;
      r.g_loss = last_g_loss_;
      r.sv_fraction = support_vector_fraction(last_scores_real_, last_scores_fake_);
      r.equilibrium_gap =
          equilibrium_gap(hinge_cost(last_scores_real_, last_scores_fake_));
      if (cfg_.measure_wall) {
        auto now = std::chrono::steady_clock::now();
        r.wall_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(now - start).count();
      }
      history.rows.push_back(r);
      if (hook) hook(r);
    }
  }
  return history;
}

}  // namespace geomgan
