#include "geomgan/variants.hpp"

#include <cmath>
#include <stdexcept>

namespace geomgan {

void VariantSpec::validate() const {
  if (kind == VariantKind::geometric && C <= 0)
    throw std::invalid_argument("geometric variant: C must be positive");
  if (kind == VariantKind::ebgan && margin <= 0)
    throw std::invalid_argument("ebgan variant: margin must be positive");
}

std::string variant_kind_name(VariantKind k) {
  switch (k) {
    case VariantKind::geometric: return "geometric";
    case VariantKind::mean_difference: return "mean-difference";
    case VariantKind::wgan: return "wgan";
    case VariantKind::vanilla_gan: return "vanilla-gan";
    case VariantKind::fgan: return "fgan";
    case VariantKind::ebgan: return "ebgan";
    case VariantKind::erm: return "erm";
  }
  return "?";
}

std::string divergence_name(FDivergence d) {
  switch (d) {
    case FDivergence::total_variation: return "total-variation";
    case FDivergence::kl: return "kl";
    case FDivergence::reverse_kl: return "reverse-kl";
    case FDivergence::pearson_chi2: return "pearson-chi2";
    case FDivergence::jensen_shannon: return "jensen-shannon";
    case FDivergence::gan: return "gan";
  }
  return "?";
}

VariantKind parse_variant_kind(const std::string& s) {
  for (VariantKind k : {VariantKind::geometric, VariantKind::mean_difference,
                        VariantKind::wgan, VariantKind::vanilla_gan, VariantKind::fgan,
                        VariantKind::ebgan, VariantKind::erm})
    if (variant_kind_name(k) == s) return k;
  throw std::invalid_argument("unknown variant: " + s);
}

FDivergence parse_divergence(const std::string& s) {
  for (FDivergence d : {FDivergence::total_variation, FDivergence::kl,
                        FDivergence::reverse_kl, FDivergence::pearson_chi2,
                        FDivergence::jensen_shannon, FDivergence::gan})
    if (divergence_name(d) == s) return d;
  throw std::invalid_argument("unknown divergence: " + s);
}

// --- closed forms ----------------------------------------------------------

namespace {
double pos_part(double x) { return x > 0.0 ? x : 0.0; }

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double t = std::exp(x);
  return t / (1.0 + t);
}

// log(1 + e^x) without overflow.
double stable_softplus(double x) {
  return pos_part(x) + std::log1p(std::exp(-std::fabs(x)));
}
}  // namespace

double svm_discriminator_loss(std::span<const double> scores_real,
                              std::span<const double> scores_fake,
                              double w_norm_sq, double C, std::size_t n) {
  if (C <= 0) throw std::invalid_argument("svm_discriminator_loss: C must be positive");
  if (n == 0 || scores_real.size() != n || scores_fake.size() != n)
    throw std::invalid_argument("svm_discriminator_loss: n mismatch");
  double acc = 0.0;
  for (double s : scores_real) acc += pos_part(1.0 - s);
  for (double s : scores_fake) acc += pos_part(1.0 + s);
  return w_norm_sq / (2.0 * C * static_cast<double>(n)) + acc / static_cast<double>(n);
}

double svm_generator_loss(std::span<const double> scores_fake) {
  if (scores_fake.empty())
    throw std::invalid_argument("svm_generator_loss: empty scores");
  double acc = 0.0;
  for (double s : scores_fake) acc += s;
  return -acc / static_cast<double>(scores_fake.size());
}

bool margin_membership(double score) { return std::fabs(score) <= 1.0; }

ScalingFactors geometric_scaling(std::span<const double> scores_real,
                                 std::span<const double> scores_fake) {
  if (scores_real.empty() || scores_fake.empty())
    throw std::invalid_argument("geometric_scaling: empty scores");
  ScalingFactors f;
  for (double s : scores_real) f.t.push_back(margin_membership(s) ? 1.0 : 0.0);
  for (double s : scores_fake) f.s.push_back(margin_membership(s) ? 1.0 : 0.0);
  return f;
}

ScalingFactors gan_scaling(std::span<const double> u_real,
                           std::span<const double> u_fake) {
  ScalingFactors f;
  for (double u : u_real) f.t.push_back(1.0 - stable_sigmoid(u));
  for (double u : u_fake) f.s.push_back(stable_sigmoid(u));
  return f;
}

double fgan_t(FDivergence d, double u) {
  switch (d) {
    case FDivergence::total_variation: {
      double th = std::tanh(u);
      return 0.5 * (1.0 - th * th);
    }
    case FDivergence::kl: return 1.0;
    case FDivergence::reverse_kl: return -std::exp(u);
    case FDivergence::pearson_chi2: return 1.0;
    case FDivergence::jensen_shannon:
    case FDivergence::gan: return stable_sigmoid(-u);
  }
  throw std::invalid_argument("fgan_t: unknown divergence");
}

double fgan_s(FDivergence d, double u) {
  switch (d) {
    case FDivergence::total_variation: return fgan_t(d, u);
    case FDivergence::kl: return std::exp(u - 1.0);
    case FDivergence::reverse_kl: return -1.0;
    case FDivergence::pearson_chi2: return u / 2.0 + 1.0;
    case FDivergence::jensen_shannon:
    case FDivergence::gan: return stable_sigmoid(u);
  }
  throw std::invalid_argument("fgan_s: unknown divergence");
}

ScalingFactors fgan_scaling(FDivergence d, std::span<const double> u_real,
                            std::span<const double> u_fake) {
  ScalingFactors f;
  for (double u : u_real) f.t.push_back(fgan_t(d, u));
  for (double u : u_fake) f.s.push_back(fgan_s(d, u));
  return f;
}

LossValues wgan_losses(std::span<const double> scores_real,
                       std::span<const double> scores_fake) {
  if (scores_real.empty() || scores_fake.empty())
    throw std::invalid_argument("wgan_losses: empty scores");
  double mr = 0.0, mf = 0.0;
  for (double s : scores_real) mr += s;
  for (double s : scores_fake) mf += s;
  mr /= static_cast<double>(scores_real.size());
  mf /= static_cast<double>(scores_fake.size());
  return {mf - mr, -mf};
}

LossValues ebgan_losses(std::span<const double> scores_real,
                        std::span<const double> scores_fake, double m) {
  if (m <= 0) throw std::invalid_argument("ebgan_losses: margin must be positive");
  if (scores_real.size() != scores_fake.size() || scores_real.empty())
    throw std::invalid_argument("ebgan_losses: size mismatch");
  double n = static_cast<double>(scores_real.size());
  double d = 0.0, g = 0.0;
  for (double s : scores_real) d += s;
  for (double s : scores_fake) {
    d += pos_part(m - s);
    g += s;
  }
  return {d / n, g / n};
}

LossValues vanilla_gan_losses(std::span<const double> logits_real,
                              std::span<const double> logits_fake) {
  if (logits_real.empty() || logits_fake.empty())
    throw std::invalid_argument("vanilla_gan_losses: empty logits");
  double d = 0.0, g = 0.0;
  for (double u : logits_real) d += stable_softplus(-u);  // -log sigma(u)
  d /= static_cast<double>(logits_real.size());
  double fake_term = 0.0;
  for (double u : logits_fake) fake_term += stable_softplus(u);  // -log(1 - sigma(u))
  fake_term /= static_cast<double>(logits_fake.size());
  d += fake_term;
  g = -fake_term;  // minimax form: mean log(1 - sigma(u_fake))
  return {d, g};
}

Array mean_difference_direction(const Array& features_real,
                                const Array& features_fake) {
  if (!features_real.same_shape(features_fake))
    throw std::invalid_argument("mean_difference_direction: shape mismatch");
  std::size_t n = features_real.rows(), dim = features_real.cols();
  Array out({dim}, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      out.data[j] += features_real.at(i, j) - features_fake.at(i, j);
  for (double& v : out.data) v /= static_cast<double>(n);
  return out;
}

LossValues mcgan_losses(const Array& features_real, const Array& features_fake) {
  Array diff = mean_difference_direction(features_real, features_fake);
  double sq = 0.0;
  for (double v : diff.data) sq += v * v;
  return {-0.5 * sq, 0.5 * sq};
}

double erm_pairwise_loss(const Array& features_real, const Array& features_fake) {
  if (!features_real.same_shape(features_fake))
    throw std::invalid_argument("erm_pairwise_loss: shape mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < features_real.size(); ++i) {
    double d = features_real.data[i] - features_fake.data[i];
    sq += d * d;
  }
  return 0.5 * sq;
}

// --- graph wiring ----------------------------------------------------------

NodeId fgan_activation(Graph& g, FDivergence d, NodeId v) {
  switch (d) {
    case FDivergence::total_variation: return g.scale(g.tanh(v), 0.5);
    case FDivergence::kl: return v;
    case FDivergence::reverse_kl: return g.scale(g.exp(v), -1.0);
    case FDivergence::pearson_chi2: return v;
    case FDivergence::jensen_shannon:
      return g.add_const(g.scale(g.softplus(g.scale(v, -1.0)), -1.0),
                         0.6931471805599453094);  // log 2 - softplus(-v)
    case FDivergence::gan: return g.scale(g.softplus(g.scale(v, -1.0)), -1.0);
  }
  throw std::invalid_argument("fgan_activation: unknown divergence");
}

NodeId fgan_conjugate(Graph& g, FDivergence d, NodeId v) {
  switch (d) {
    case FDivergence::total_variation: return v;
    case FDivergence::kl: return g.exp(g.add_const(v, -1.0));
    case FDivergence::reverse_kl:
      return g.add_const(g.scale(g.log(g.scale(v, -1.0)), -1.0), -1.0);  // -1 - log(-v)
    case FDivergence::pearson_chi2:
      return g.add(g.scale(g.mul(v, v), 0.25), v);  // v^2/4 + v
    case FDivergence::jensen_shannon:
      return g.scale(g.log(g.add_const(g.scale(g.exp(v), -1.0), 2.0)), -1.0);
    case FDivergence::gan:
      return g.scale(g.log(g.add_const(g.scale(g.exp(v), -1.0), 1.0)), -1.0);
  }
  throw std::invalid_argument("fgan_conjugate: unknown divergence");
}

NodeId fgan_conjugate_of_activation(Graph& g, FDivergence d, NodeId u) {
  return fgan_conjugate(g, d, fgan_activation(g, d, u));
}

LossPair build_losses(Graph& g, const VariantSpec& variant, NodeId scores_real,
                      NodeId scores_fake, NodeId features_real, NodeId features_fake,
                      NodeId final_w, std::size_t batch_n) {
  variant.validate();
  if (batch_n == 0) throw std::invalid_argument("build_losses: empty minibatch");
  LossPair lp;
  switch (variant.kind) {
    case VariantKind::geometric: {
      NodeId penalty = g.scale(g.inner_product(final_w, final_w),
                               1.0 / (2.0 * variant.C * static_cast<double>(batch_n)));
      NodeId real_hinge = g.mean(g.hinge_pos_part(g.add_const(g.scale(scores_real, -1.0), 1.0)));
      NodeId fake_hinge = g.mean(g.hinge_pos_part(g.add_const(scores_fake, 1.0)));
      lp.d_loss = g.add(penalty, g.add(real_hinge, fake_hinge));
      lp.g_loss = g.scale(g.mean(scores_fake), -1.0);
      return lp;
    }
    case VariantKind::mean_difference: {
      NodeId delta = g.sub(g.mean_rows(features_real), g.mean_rows(features_fake));
      NodeId sq = g.inner_product(delta, delta);
      lp.d_loss = g.scale(sq, -0.5);
      lp.g_loss = g.scale(sq, 0.5);
      return lp;
    }
    case VariantKind::wgan: {
      lp.d_loss = g.sub(g.mean(scores_fake), g.mean(scores_real));
      lp.g_loss = g.scale(g.mean(scores_fake), -1.0);
      return lp;
    }
    case VariantKind::vanilla_gan: {
      NodeId real_term = g.mean(g.softplus(g.scale(scores_real, -1.0)));
      NodeId fake_term = g.mean(g.softplus(scores_fake));
      lp.d_loss = g.add(real_term, fake_term);
      lp.g_loss = g.scale(fake_term, -1.0);
      return lp;
    }
    case VariantKind::fgan: {
      NodeId real_term = g.mean(fgan_activation(g, variant.divergence, scores_real));
      NodeId fake_term = g.mean(fgan_conjugate_of_activation(g, variant.divergence, scores_fake));
      lp.d_loss = g.sub(fake_term, real_term);
      lp.g_loss = g.scale(fake_term, -1.0);
      return lp;
    }
    case VariantKind::ebgan: {
      NodeId fake_hinge = g.mean(
          g.hinge_pos_part(g.add_const(g.scale(scores_fake, -1.0), variant.margin)));
      lp.d_loss = g.add(g.mean(scores_real), fake_hinge);
      lp.g_loss = g.mean(scores_fake);
      return lp;
    }
    case VariantKind::erm: {
      NodeId diff = g.sub(features_real, features_fake);
      NodeId sq = g.inner_product(diff, diff);
      lp.d_loss = g.scale(sq, -0.5);
      lp.g_loss = g.scale(sq, 0.5);
      return lp;
    }
  }
  throw std::invalid_argument("build_losses: unknown variant");
}

// --- full models ------------------------------------------------------------

AdversarialModel build_adversarial_model(const VariantSpec& variant,
                                         const MlpSpec& disc_spec,
                                         const MlpSpec& gen_spec,
                                         std::size_t batch_n, std::uint64_t seed) {
  variant.validate();
  disc_spec.validate();
  gen_spec.validate();
  if (disc_spec.sizes.back() != 1)
    throw std::invalid_argument("discriminator must end in a scalar score");
  if (gen_spec.sizes.back() != disc_spec.sizes.front())
    throw std::invalid_argument("generator output width must match discriminator input");

  AdversarialModel m;
  m.variant = variant;
  m.latent_dim = gen_spec.sizes.front();
  m.x_input = m.graph.input("x");
  m.z_input = m.graph.input("z");

  RngStream disc_rng(seed, rng_streams::kInitDiscriminator);
  RngStream gen_rng(seed, rng_streams::kInitGenerator);
  MlpParams disc = add_mlp_params(m.graph, disc_spec, "d.", MlpRole::discriminator, disc_rng);
  MlpParams gen = add_mlp_params(m.graph, gen_spec, "g.", MlpRole::generator, gen_rng);

  MlpApplied g_applied = apply_mlp(m.graph, gen, m.z_input);
  m.gen_output = g_applied.output;

  MlpApplied d_real = apply_mlp(m.graph, disc, m.x_input);
  MlpApplied d_fake = apply_mlp(m.graph, disc, m.gen_output);
  m.features_real = d_real.features;
  m.features_fake = d_fake.features;
  m.scores_real = d_real.output;
  m.scores_fake = d_fake.output;

  NodeId final_w = disc.weights.back();
  m.losses = build_losses(m.graph, variant, m.scores_real, m.scores_fake,
                          m.features_real, m.features_fake, final_w, batch_n);
  m.g_step_uses_real =
      variant.kind == VariantKind::mean_difference || variant.kind == VariantKind::erm;
  m.scores_trained = !m.g_step_uses_real;
  return m;
}

AdversarialModel build_lines_model(const VariantSpec& variant, std::size_t batch_n,
                                   double theta0, std::uint64_t seed) {
  variant.validate();
  AdversarialModel m;
  m.variant = variant;
  m.latent_dim = 1;
  m.x_input = m.graph.input("x");   // [n x 2] points on the vertical line
  m.z_input = m.graph.input("z");   // [n x 1] latents

  // g_theta(z) = (theta, z), built as z * [0 1] + (theta, 0).
  NodeId theta = m.graph.parameter("g.theta", Partition::theta, Array::scalar(theta0));
  NodeId embed = m.graph.constant(Array::matrix(1, 2, {0.0, 1.0}));
  NodeId theta_bias = m.graph.mul(m.graph.constant(Array::vec({1.0, 0.0})), theta);
  m.gen_output = m.graph.linear(m.z_input, embed, theta_bias);

  // Discriminator linear in x: the feature map is the identity.
  RngStream disc_rng(seed, rng_streams::kInitDiscriminator);
  double a = std::sqrt(6.0 / 3.0);
  Array w0({2, 1}, {disc_rng.uniform(-a, a), disc_rng.uniform(-a, a)});
  NodeId w = m.graph.parameter("d.w", Partition::w, std::move(w0));
  NodeId b = m.graph.parameter("d.b", Partition::b, Array({1}, 0.0));
  m.features_real = m.x_input;
  m.features_fake = m.gen_output;
  m.scores_real = m.graph.linear(m.x_input, w, b);
  m.scores_fake = m.graph.linear(m.gen_output, w, b);

  m.losses = build_losses(m.graph, variant, m.scores_real, m.scores_fake,
                          m.features_real, m.features_fake, w, batch_n);
  m.g_step_uses_real =
      variant.kind == VariantKind::mean_difference || variant.kind == VariantKind::erm;
  m.scores_trained = !m.g_step_uses_real;
  return m;
}

void implied_md_scores(const Array& features_real, const Array& features_fake,
                       std::vector<double>& scores_real,
                       std::vector<double>& scores_fake) {
  Array w = mean_difference_direction(features_real, features_fake);
  std::size_t dim = w.size();
  // Hyperplane through the midpoint of the two class means.
  double b = 0.0;
  Array mid({dim}, 0.0);
  std::size_t n = features_real.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      mid.data[j] += features_real.at(i, j) + features_fake.at(i, j);
  for (std::size_t j = 0; j < dim; ++j) {
    mid.data[j] /= static_cast<double>(2 * n);
    b -= w.data[j] * mid.data[j];
  }
  scores_real.assign(n, 0.0);
  scores_fake.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sr = b, sf = b;
    for (std::size_t j = 0; j < dim; ++j) {
      sr += w.data[j] * features_real.at(i, j);
      sf += w.data[j] * features_fake.at(i, j);
    }
    scores_real[i] = sr;
    scores_fake[i] = sf;
  }
}

std::vector<double> score_column(const Array& scores) {
  return scores.data;
}

}  // namespace geomgan
