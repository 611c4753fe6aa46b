#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "geomgan/variants.hpp"

using namespace geomgan;

namespace {

Array random_array(std::vector<std::size_t> shape, RngStream& rng, double scale = 1.0) {
  Array a(std::move(shape));
  for (double& v : a.data) v = scale * rng.normal();
  return a;
}

// Gradient of one sample's score with respect to every parameter, via a
// one-hot selector; used to spell out the per-sample update accumulations.
std::vector<std::pair<std::string, Array>> per_sample_grads(Graph& g, NodeId scores,
                                                            std::size_t i,
                                                            std::size_t n) {
  Array onehot({n, 1}, 0.0);
  onehot.data[i] = 1.0;
  NodeId sel = g.inner_product(scores, g.constant(onehot));
  g.forward(sel);
  g.backward(sel);
  return g.gradients();
}

AdversarialModel small_model(VariantKind kind, std::size_t batch, std::uint64_t seed,
                             FDivergence div = FDivergence::gan) {
  VariantSpec v;
  v.kind = kind;
  v.divergence = div;
  MlpSpec disc = MlpSpec::dense({2, 5, 4, 1});
  MlpSpec gen = MlpSpec::dense({3, 6, 2});
  return build_adversarial_model(v, disc, gen, batch, seed);
}

void bind_batch(AdversarialModel& m, std::size_t n, std::uint64_t seed,
                double scale = 0.6) {
  RngStream rng(seed, 50);
  m.graph.bind("x", random_array({n, 2}, rng, scale));
  m.graph.bind("z", random_array({n, m.latent_dim}, rng, scale));
}

double max_abs_diff(const Array& a, const Array& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a.data[i] - b.data[i]));
  return worst;
}

}  // namespace

TEST_CASE("svm_discriminator_loss: inactive hinges, on-hyperplane value, penalty") {
  std::vector<double> r1{2}, f1{-2};
  CHECK(svm_discriminator_loss(r1, f1, 0.0, 1.0, 1) == doctest::Approx(0.0));
  std::vector<double> r0{0}, f0{0};
  CHECK(svm_discriminator_loss(r0, f0, 0.0, 1.0, 1) == doctest::Approx(2.0));
  CHECK(svm_discriminator_loss(r0, f0, 2.0, 1.0, 1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(svm_discriminator_loss(r0, f0, 0.0, -1.0, 1), std::invalid_argument);
  std::vector<double> two{0, 0};
  CHECK_THROWS_AS(svm_discriminator_loss(two, f0, 0.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("svm_generator_loss: negative mean of fake scores") {
  std::vector<double> ones{1, 1};
  CHECK(svm_generator_loss(ones) == doctest::Approx(-1.0));
  std::vector<double> zero{0};
  CHECK(svm_generator_loss(zero) == doctest::Approx(0.0));
  // Parallel lines at theta = 0.5: every fake score is -theta/2.
  std::vector<double> lines(100, -0.25);
  CHECK(svm_generator_loss(lines) == doctest::Approx(0.25));
  CHECK_THROWS_AS(svm_generator_loss(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("margin_membership: closed inequality at the boundary") {
  CHECK(margin_membership(0.0));
  CHECK(margin_membership(1.0));
  CHECK(margin_membership(-1.0));
  CHECK_FALSE(margin_membership(-1.5));
  CHECK_FALSE(margin_membership(1.0000001));
}

TEST_CASE("geometric_scaling: binary margin indicators") {
  std::vector<double> r{0.5}, f{-0.5};
  ScalingFactors in = geometric_scaling(r, f);
  CHECK(in.t[0] == 1.0);
  CHECK(in.s[0] == 1.0);
  std::vector<double> r2{2}, f2{-2};
  ScalingFactors out = geometric_scaling(r2, f2);
  CHECK(out.t[0] == 0.0);
  CHECK(out.s[0] == 0.0);
  std::vector<double> rb{1}, fb{-1};
  ScalingFactors boundary = geometric_scaling(rb, fb);
  CHECK(boundary.t[0] == 1.0);
  CHECK(boundary.s[0] == 1.0);
}

TEST_CASE("gan_scaling: sigmoid factors and saturation") {
  std::vector<double> zero{0};
  ScalingFactors mid = gan_scaling(zero, zero);
  CHECK(mid.t[0] == doctest::Approx(0.5));
  CHECK(mid.s[0] == doctest::Approx(0.5));
  std::vector<double> low{-500}, high{500};
  ScalingFactors sat = gan_scaling(high, low);
  CHECK(sat.t[0] < 1e-200);  // saturated real side
  CHECK(sat.s[0] < 1e-200);  // vanishing generator signal
  for (double v : {sat.t[0], sat.s[0]}) CHECK(std::isfinite(v));
}

TEST_CASE("fgan closed forms: table spot values") {
  for (double u : {-3.0, -0.7, 0.2, 1.0, 4.0})
    CHECK(fgan_t(FDivergence::kl, u) == 1.0);
  CHECK(fgan_s(FDivergence::kl, 1.0) == doctest::Approx(1.0));
  CHECK(fgan_s(FDivergence::pearson_chi2, 0.0) == doctest::Approx(1.0));
  CHECK(fgan_t(FDivergence::jensen_shannon, 0.0) == doctest::Approx(0.5));
  CHECK(fgan_s(FDivergence::jensen_shannon, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("fgan closed forms: total variation symmetric, others asymmetric at u=1") {
  for (double u : {-2.0, -0.5, 0.3, 1.7})
    CHECK(fgan_t(FDivergence::total_variation, u) ==
          doctest::Approx(fgan_s(FDivergence::total_variation, u)));
  // KL is the one row whose factors coincide at exactly u = 1 (s = e^{u-1});
  // probe the asymmetry at u = 2 instead.
  for (FDivergence d : {FDivergence::kl, FDivergence::reverse_kl,
                        FDivergence::pearson_chi2, FDivergence::jensen_shannon,
                        FDivergence::gan})
    CHECK(fgan_t(d, 2.0) != fgan_s(d, 2.0));
}

TEST_CASE("fgan(gan) scaling coincides with the sigmoid gan_scaling") {
  std::vector<double> us{-4.0, -1.0, 0.0, 0.5, 3.0};
  ScalingFactors lhs = fgan_scaling(FDivergence::gan, us, us);
  ScalingFactors rhs = gan_scaling(us, us);
  for (std::size_t i = 0; i < us.size(); ++i) {
    CHECK(lhs.t[i] == doctest::Approx(rhs.t[i]).epsilon(1e-12));
    CHECK(lhs.s[i] == doctest::Approx(rhs.s[i]).epsilon(1e-12));
  }
}

TEST_CASE("fgan scaling factors match autodiff of the S_f / f* compositions") {
  // Acceptance-grade check: closed forms vs reverse-mode derivatives of the
  // same compositions the training losses use.
  RngStream rng(2024, 0);
  for (FDivergence d : {FDivergence::total_variation, FDivergence::kl,
                        FDivergence::reverse_kl, FDivergence::pearson_chi2,
                        FDivergence::jensen_shannon, FDivergence::gan}) {
    int checked = 0;
    while (checked < 100) {
      double u = rng.uniform(-8.0, 8.0);
      if (d == FDivergence::total_variation && std::fabs(u) < 1e-3) continue;
      ++checked;
      Graph g;
      NodeId un = g.parameter("u", Partition::zeta, Array::scalar(u));
      NodeId act = fgan_activation(g, d, un);
      g.forward(act);
      g.backward(act);
      double t_auto = g.param_grad("u").data[0];
      double t_closed = fgan_t(d, u);
      CHECK(std::fabs(t_auto - t_closed) / (std::fabs(t_closed) + 1e-12) < 1e-9);

      Graph g2;
      NodeId un2 = g2.parameter("u", Partition::zeta, Array::scalar(u));
      NodeId conj = fgan_conjugate_of_activation(g2, d, un2);
      g2.forward(conj);
      g2.backward(conj);
      double s_auto = g2.param_grad("u").data[0];
      double s_closed = fgan_s(d, u);
      CHECK(std::fabs(s_auto - s_closed) / (std::fabs(s_closed) + 1e-12) < 1e-9);
    }
  }
}

TEST_CASE("wgan_losses: means and symmetry") {
  std::vector<double> r{1}, f{0};
  LossValues lv = wgan_losses(r, f);
  CHECK(lv.d_loss == doctest::Approx(-1.0));
  CHECK(lv.g_loss == doctest::Approx(0.0));
  std::vector<double> same{0.3, -0.2};
  CHECK(wgan_losses(same, same).d_loss == doctest::Approx(0.0));
}

TEST_CASE("ebgan_losses: margin hinge on the fake side") {
  double m = 0.8;
  std::vector<double> r{0}, f{m};
  LossValues lv = ebgan_losses(r, f, m);
  CHECK(lv.d_loss == doctest::Approx(0.0));
  CHECK(lv.g_loss == doctest::Approx(m));
  std::vector<double> zero{0};
  CHECK(ebgan_losses(zero, zero, 1.0).d_loss == doctest::Approx(1.0));
  // Fake samples beyond the margin stop contributing to the hinge.
  std::vector<double> far1{1.5}, far2{30.0};
  CHECK(ebgan_losses(zero, far1, 1.0).d_loss ==
        doctest::Approx(ebgan_losses(zero, far2, 1.0).d_loss));
  CHECK_THROWS_AS(ebgan_losses(zero, zero, 0.0), std::invalid_argument);
}

TEST_CASE("vanilla_gan_losses: value at zero logits and stability at |logit|=500") {
  std::vector<double> zero{0, 0};
  LossValues lv = vanilla_gan_losses(zero, zero);
  CHECK(lv.d_loss == doctest::Approx(2.0 * std::log(2.0)));
  std::vector<double> hi{500}, lo{-500};
  LossValues perfect = vanilla_gan_losses(hi, lo);
  CHECK(perfect.d_loss == doctest::Approx(0.0));
  CHECK(std::isfinite(perfect.d_loss));
  CHECK(std::isfinite(perfect.g_loss));
  LossValues flipped = vanilla_gan_losses(lo, hi);
  CHECK(std::isfinite(flipped.d_loss));
  CHECK(std::isfinite(flipped.g_loss));
}

TEST_CASE("vanilla generator gradient vanishes as the fake logit drops") {
  auto grad_at = [](double logit) {
    Graph g;
    NodeId u = g.parameter("u", Partition::theta, Array::scalar(logit));
    NodeId g_loss = g.scale(g.mean(g.softplus(u)), -1.0);
    g.forward(g_loss);
    g.backward(g_loss);
    return std::fabs(g.param_grad("u").data[0]);
  };
  CHECK(grad_at(-2.0) > 0.1);
  CHECK(grad_at(-30.0) < 1e-10);
}

TEST_CASE("mean_difference_direction: means, zero, antisymmetry") {
  Array real = Array::matrix(2, 2, {1, 0, 1, 0});
  Array fake = Array::matrix(2, 2, {0, 0, 0, 0});
  Array dir = mean_difference_direction(real, fake);
  CHECK(dir.data[0] == doctest::Approx(1.0));
  CHECK(dir.data[1] == doctest::Approx(0.0));

  Array same = Array::matrix(2, 2, {0.3, -1, 0.4, 2});
  Array zero = mean_difference_direction(same, same);
  CHECK(zero.data[0] == 0.0);
  CHECK(zero.data[1] == 0.0);

  RngStream rng(7, 7);
  Array a = random_array({5, 3}, rng), b = random_array({5, 3}, rng);
  Array ab = mean_difference_direction(a, b);
  Array ba = mean_difference_direction(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab.data[i] == -ba.data[i]);

  CHECK_THROWS_AS(mean_difference_direction(a, random_array({5, 2}, rng)),
                  std::invalid_argument);
}

TEST_CASE("mcgan_losses and erm_pairwise_loss values") {
  Array same = Array::matrix(3, 2, {1, 2, 3, 4, 5, 6});
  LossValues both = mcgan_losses(same, same);
  CHECK(both.d_loss == 0.0);
  CHECK(both.g_loss == 0.0);
  Array real = Array::matrix(2, 1, {2, 2});
  Array fake = Array::matrix(2, 1, {0, 0});
  CHECK(mcgan_losses(real, fake).g_loss == doctest::Approx(2.0));

  CHECK(erm_pairwise_loss(same, same) == 0.0);
  Array r1 = Array::matrix(2, 1, {1, 0});
  Array f1 = Array::matrix(2, 1, {0, 0});
  CHECK(erm_pairwise_loss(r1, f1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(erm_pairwise_loss(r1, same), std::invalid_argument);
}

TEST_CASE("build_losses: geometric graph reproduces the closed-form svm losses") {
  Graph g;
  RngStream rng(31, 1);
  std::size_t n = 8;
  NodeId sr = g.input("sr");
  NodeId sf = g.input("sf");
  NodeId feats = g.input("feats");
  NodeId w = g.parameter("w", Partition::w, random_array({4, 1}, rng));
  VariantSpec v;
  v.kind = VariantKind::geometric;
  v.C = 0.7;
  LossPair lp = build_losses(g, v, sr, sf, feats, feats, w, n);
  Array scores_r = random_array({n, 1}, rng, 0.9);
  Array scores_f = random_array({n, 1}, rng, 0.9);
  g.bind("sr", scores_r);
  g.bind("sf", scores_f);
  double w_norm_sq = 0.0;
  for (double x : g.param_value("w").data) w_norm_sq += x * x;
  double expected_d =
      svm_discriminator_loss(scores_r.data, scores_f.data, w_norm_sq, v.C, n);
  double expected_g = svm_generator_loss(scores_f.data);
  CHECK(g.forward(lp.d_loss).data[0] == doctest::Approx(expected_d).epsilon(1e-12));
  CHECK(g.forward(lp.g_loss).data[0] == doctest::Approx(expected_g).epsilon(1e-12));
}

TEST_CASE("build_losses: wgan treats every sample with unit weight") {
  Graph g;
  std::size_t n = 5;
  NodeId sr = g.parameter("sr", Partition::zeta, Array({n, 1}, 0.4));
  NodeId sf = g.parameter("sf", Partition::zeta, Array({n, 1}, -0.2));
  VariantSpec v;
  v.kind = VariantKind::wgan;
  LossPair lp = build_losses(g, v, sr, sf, sr, sf, sr, n);
  g.forward(lp.d_loss);
  g.backward(lp.d_loss);
  // d(d_loss)/d(score): -1/n for every real sample, +1/n for every fake.
  for (double gr : g.param_grad("sr").data) CHECK(gr == doctest::Approx(-1.0 / n));
  for (double gf : g.param_grad("sf").data) CHECK(gf == doctest::Approx(1.0 / n));
}

TEST_CASE("per-variant graph losses agree with closed-form values") {
  std::size_t n = 6;
  for (VariantKind kind : {VariantKind::geometric, VariantKind::mean_difference,
                           VariantKind::wgan, VariantKind::vanilla_gan,
                           VariantKind::ebgan, VariantKind::erm}) {
    AdversarialModel m = small_model(kind, n, 123);
    bind_batch(m, n, 321);
    double d = m.graph.forward(m.losses.d_loss).data[0];
    double g = m.graph.forward(m.losses.g_loss).data[0];
    CHECK(std::isfinite(d));
    CHECK(std::isfinite(g));
    std::vector<double> sr = m.graph.value(m.scores_real).data;
    std::vector<double> sf = m.graph.value(m.scores_fake).data;
    const Array& fr = m.graph.value(m.features_real);
    const Array& ff = m.graph.value(m.features_fake);
    switch (kind) {
      case VariantKind::geometric: {
        double w2 = 0.0;
        for (double x : m.graph.param_value("d.L2.w").data) w2 += x * x;
        CHECK(d == doctest::Approx(svm_discriminator_loss(sr, sf, w2, 1.0, n)).epsilon(1e-12));
        CHECK(g == doctest::Approx(svm_generator_loss(sf)).epsilon(1e-12));
        break;
      }
      case VariantKind::mean_difference: {
        LossValues lv = mcgan_losses(fr, ff);
        CHECK(d == doctest::Approx(lv.d_loss).epsilon(1e-12));
        CHECK(g == doctest::Approx(lv.g_loss).epsilon(1e-12));
        break;
      }
      case VariantKind::wgan: {
        LossValues lv = wgan_losses(sr, sf);
        CHECK(d == doctest::Approx(lv.d_loss).epsilon(1e-12));
        CHECK(g == doctest::Approx(lv.g_loss).epsilon(1e-12));
        break;
      }
      case VariantKind::vanilla_gan: {
        LossValues lv = vanilla_gan_losses(sr, sf);
        CHECK(d == doctest::Approx(lv.d_loss).epsilon(1e-12));
        CHECK(g == doctest::Approx(lv.g_loss).epsilon(1e-12));
        break;
      }
      case VariantKind::ebgan: {
        LossValues lv = ebgan_losses(sr, sf, 1.0);
        CHECK(d == doctest::Approx(lv.d_loss).epsilon(1e-12));
        CHECK(g == doctest::Approx(lv.g_loss).epsilon(1e-12));
        break;
      }
      case VariantKind::erm: {
        double e = erm_pairwise_loss(fr, ff);
        CHECK(d == doctest::Approx(-e).epsilon(1e-12));
        CHECK(g == doctest::Approx(e).epsilon(1e-12));
        break;
      }
      default: break;
    }
  }
  for (FDivergence div : {FDivergence::total_variation, FDivergence::kl,
                          FDivergence::reverse_kl, FDivergence::pearson_chi2,
                          FDivergence::jensen_shannon, FDivergence::gan}) {
    AdversarialModel m = small_model(VariantKind::fgan, n, 123, div);
    bind_batch(m, n, 321);
    CHECK(std::isfinite(m.graph.forward(m.losses.d_loss).data[0]));
    CHECK(std::isfinite(m.graph.forward(m.losses.g_loss).data[0]));
  }
}

TEST_CASE("geometric: autodiff equals the scaled per-sample accumulation") {
  // Discriminator side (zeta), then generator side (theta). Valid whenever
  // no score sits on a margin boundary or beyond the opposite margin.
  std::size_t n = 6;
  AdversarialModel m = small_model(VariantKind::geometric, n, 99);
  bind_batch(m, n, 555, 0.5);
  m.graph.forward(m.losses.d_loss);
  std::vector<double> sr = m.graph.value(m.scores_real).data;
  std::vector<double> sf = m.graph.value(m.scores_fake).data;
  for (double s : sr) {
    REQUIRE(std::fabs(std::fabs(s) - 1.0) > 1e-3);
    REQUIRE(s > -1.0);  // no real sample beyond the fake-side margin
  }
  for (double s : sf) {
    REQUIRE(std::fabs(std::fabs(s) - 1.0) > 1e-3);
    REQUIRE(s < 1.0);
  }
  ScalingFactors factors = geometric_scaling(sr, sf);

  // Explicit accumulation sum_i [s_i grad score_fake_i - t_i grad score_real_i]/n
  // (the descent gradient of the hinge sum).
  std::vector<std::pair<std::string, Array>> accum;
  for (std::size_t i = 0; i < n; ++i) {
    auto gr = per_sample_grads(m.graph, m.scores_real, i, n);
    auto gf = per_sample_grads(m.graph, m.scores_fake, i, n);
    if (accum.empty()) {
      accum = gr;
      for (auto& [name, a] : accum) a = Array(a.shape, 0.0);
    }
    for (std::size_t k = 0; k < accum.size(); ++k) {
      for (std::size_t e = 0; e < accum[k].second.size(); ++e) {
        accum[k].second.data[e] +=
            (factors.s[i] * gf[k].second.data[e] - factors.t[i] * gr[k].second.data[e]) /
            static_cast<double>(n);
      }
    }
  }

  m.graph.forward(m.losses.d_loss);
  m.graph.backward(m.losses.d_loss);
  for (const auto& e : m.graph.params().entries()) {
    if (e.partition != Partition::zeta) continue;
    const Array& autodiff = m.graph.param_grad(e.name);
    for (const auto& [name, acc] : accum)
      if (name == e.name) CHECK(max_abs_diff(autodiff, acc) < 1e-8);
  }

  // Generator update: grad_theta g_loss = -sum_i grad_theta score_fake_i / n.
  std::vector<std::pair<std::string, Array>> gen_accum;
  for (std::size_t i = 0; i < n; ++i) {
    auto gf = per_sample_grads(m.graph, m.scores_fake, i, n);
    if (gen_accum.empty()) {
      gen_accum = gf;
      for (auto& [name, a] : gen_accum) a = Array(a.shape, 0.0);
    }
    for (std::size_t k = 0; k < gen_accum.size(); ++k)
      for (std::size_t e = 0; e < gen_accum[k].second.size(); ++e)
        gen_accum[k].second.data[e] -= gf[k].second.data[e] / static_cast<double>(n);
  }
  m.graph.forward(m.losses.g_loss);
  m.graph.backward(m.losses.g_loss);
  for (const auto& e : m.graph.params().entries()) {
    if (e.partition != Partition::theta) continue;
    const Array& autodiff = m.graph.param_grad(e.name);
    for (const auto& [name, acc] : gen_accum)
      if (name == e.name) CHECK(max_abs_diff(autodiff, acc) < 1e-8);
  }
}

TEST_CASE("geometric: zeta gradient is exactly zero when every score is outside the margins") {
  // Find a model whose feature clouds separate along the mean-difference
  // direction for real and latent batches drawn from disjoint regions.
  std::size_t n = 4;
  AdversarialModel m;
  double min_real = 0.0, max_fake = 0.0;
  bool separated = false;
  for (std::uint64_t seed = 17; seed < 47 && !separated; ++seed) {
    m = small_model(VariantKind::geometric, n, seed);
    RngStream rng(seed + 1, 50);
    Array x({n, 2});
    for (double& v : x.data) v = 2.0 + 0.05 * rng.normal();
    Array z({n, m.latent_dim});
    for (double& v : z.data) v = -2.0 + 0.05 * rng.normal();
    m.graph.bind("x", x);
    m.graph.bind("z", z);
    m.graph.forward(m.losses.d_loss);
    const Array& fr = m.graph.value(m.features_real);
    const Array& ff = m.graph.value(m.features_fake);
    Array delta = mean_difference_direction(fr, ff);
    min_real = std::numeric_limits<double>::infinity();
    max_fake = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double pr = 0.0, pf = 0.0;
      for (std::size_t j = 0; j < delta.size(); ++j) {
        pr += delta.data[j] * fr.at(i, j);
        pf += delta.data[j] * ff.at(i, j);
      }
      min_real = std::min(min_real, pr);
      max_fake = std::max(max_fake, pf);
    }
    separated = min_real > max_fake + 1e-6;
  }
  REQUIRE(separated);
  const Array& fr = m.graph.value(m.features_real);
  const Array& ff = m.graph.value(m.features_fake);
  Array delta = mean_difference_direction(fr, ff);
  // Affine-map the projections so real scores land at >= +2 and fakes at
  // <= -2: both hinges inactive, t = s = 0 for every sample.
  std::size_t dim = delta.size();
  double a = 4.0 / (min_real - max_fake);
  double b = -a * (min_real + max_fake) / 2.0;
  Array& w = m.graph.param_value("d.L2.w");
  for (std::size_t j = 0; j < dim; ++j) w.data[j] = a * delta.data[j];
  m.graph.param_value("d.L2.b").data[0] = b;

  m.graph.forward(m.losses.d_loss);
  for (double s : m.graph.value(m.scores_real).data) REQUIRE(s > 1.0);
  for (double s : m.graph.value(m.scores_fake).data) REQUIRE(s < -1.0);
  m.graph.backward(m.losses.d_loss);
  for (const auto& e : m.graph.params().entries()) {
    if (e.partition == Partition::zeta)
      for (double gz : m.graph.param_grad(e.name).data) CHECK(gz == 0.0);
  }
  // Only the ||w||^2/(2Cn) penalty survives: grad_w = w/(Cn).
  const Array& gw = m.graph.param_grad("d.L2.w");
  for (std::size_t j = 0; j < dim; ++j)
    CHECK(gw.data[j] ==
          doctest::Approx(w.data[j] / (1.0 * static_cast<double>(n))).epsilon(1e-12));
}

TEST_CASE("mcgan dual gradient matches the explicit w* accumulation") {
  std::size_t n = 6;
  AdversarialModel m = small_model(VariantKind::mean_difference, n, 77);
  bind_batch(m, n, 770);
  m.graph.forward(m.losses.g_loss);
  const Array& fr = m.graph.value(m.features_real);
  const Array& ff = m.graph.value(m.features_fake);
  Array delta = mean_difference_direction(fr, ff);
  double norm = 0.0;
  for (double v : delta.data) norm += v * v;
  norm = std::sqrt(norm);
  REQUIRE(norm > 1e-8);
  double c = std::sqrt(norm);  // Cauchy-Schwarz closed form scale
  Array w_star({delta.size()});
  for (std::size_t i = 0; i < delta.size(); ++i) w_star.data[i] = c * delta.data[i];

  // Explicit route: grad_theta <w*, mean_i phi(g(z_i))> with w* held fixed.
  NodeId probe =
      m.graph.inner_product(m.graph.constant(w_star), m.graph.mean_rows(m.features_fake));
  m.graph.forward(probe);
  m.graph.backward(probe);
  std::vector<std::pair<std::string, Array>> explicit_dir;
  for (const auto& e : m.graph.params().entries())
    if (e.partition == Partition::theta)
      explicit_dir.emplace_back(e.name, m.graph.param_grad(e.name));

  m.graph.forward(m.losses.g_loss);
  m.graph.backward(m.losses.g_loss);
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  std::size_t k = 0;
  for (const auto& e : m.graph.params().entries()) {
    if (e.partition != Partition::theta) continue;
    const Array& dual = m.graph.param_grad(e.name);
    const Array& dir = explicit_dir[k++].second;
    for (std::size_t i = 0; i < dual.size(); ++i) {
      // g_loss descends, the accumulation ascends: compare -grad to dir/c.
      double lhs = -dual.data[i] * c;
      CHECK(std::fabs(lhs - dir.data[i]) < 1e-10);
      dot += -dual.data[i] * dir.data[i];
      n1 += dual.data[i] * dual.data[i];
      n2 += dir.data[i] * dir.data[i];
    }
  }
  CHECK(dot / (std::sqrt(n1) * std::sqrt(n2)) > 1.0 - 1e-10);
}

TEST_CASE("erm generator gradient matches the per-sample pairwise directions") {
  std::size_t n = 5;
  AdversarialModel m = small_model(VariantKind::erm, n, 31);
  bind_batch(m, n, 13);
  m.graph.forward(m.losses.g_loss);
  Array fr = m.graph.value(m.features_real);
  Array ff = m.graph.value(m.features_fake);
  Array w_per_sample(fr.shape);
  for (std::size_t i = 0; i < fr.size(); ++i)
    w_per_sample.data[i] = fr.data[i] - ff.data[i];  // w_i, one per sample

  NodeId probe =
      m.graph.inner_product(m.graph.constant(w_per_sample), m.features_fake);
  m.graph.forward(probe);
  m.graph.backward(probe);
  std::vector<Array> explicit_dir;
  for (const auto& e : m.graph.params().entries())
    if (e.partition == Partition::theta)
      explicit_dir.push_back(m.graph.param_grad(e.name));

  m.graph.forward(m.losses.g_loss);
  m.graph.backward(m.losses.g_loss);
  std::size_t k = 0;
  for (const auto& e : m.graph.params().entries()) {
    if (e.partition != Partition::theta) continue;
    const Array& dual = m.graph.param_grad(e.name);
    const Array& dir = explicit_dir[k++];
    for (std::size_t i = 0; i < dual.size(); ++i)
      CHECK(std::fabs(dual.data[i] + dir.data[i]) < 1e-10);
  }
}

TEST_CASE("score translation: scaling unchanged, losses shift analytically") {
  std::vector<double> sr{0.2, -0.4, 0.6};
  std::vector<double> sf{-0.3, 0.1, -0.7};
  double delta = 0.2;  // keeps every score inside the margin set
  std::vector<double> sr2, sf2;
  for (double s : sr) sr2.push_back(s + delta);
  for (double s : sf) sf2.push_back(s + delta);
  ScalingFactors f1 = geometric_scaling(sr, sf);
  ScalingFactors f2 = geometric_scaling(sr2, sf2);
  for (std::size_t i = 0; i < sr.size(); ++i) {
    CHECK(f1.t[i] == f2.t[i]);
    CHECK(f1.s[i] == f2.s[i]);
  }
  // With all hinges active the real terms lose delta and the fake terms gain
  // delta, so the discriminator loss is unchanged and g_loss drops by delta.
  double d1 = svm_discriminator_loss(sr, sf, 0.0, 1.0, sr.size());
  double d2 = svm_discriminator_loss(sr2, sf2, 0.0, 1.0, sr.size());
  CHECK(d2 == doctest::Approx(d1).epsilon(1e-12));
  CHECK(svm_generator_loss(sf2) == doctest::Approx(svm_generator_loss(sf) - delta));
}

TEST_CASE("lines model: generator wiring g(z) = (theta, z)") {
  VariantSpec v;
  v.kind = VariantKind::geometric;
  AdversarialModel m = build_lines_model(v, 1, 2.0, 5);
  m.graph.bind("x", Array::matrix(1, 2, {0.0, 0.3}));
  m.graph.bind("z", Array::matrix(1, 1, {0.5}));
  const Array& out = m.graph.forward(m.gen_output);
  CHECK(out.at(0, 0) == doctest::Approx(2.0));
  CHECK(out.at(0, 1) == doctest::Approx(0.5));

  // d(mean first coordinate)/d(theta) = 1, second coordinate contributes 0.
  NodeId first = m.graph.inner_product(m.gen_output,
                                       m.graph.constant(Array::matrix(1, 2, {1, 0})));
  m.graph.forward(first);
  m.graph.backward(first);
  CHECK(m.graph.param_grad("g.theta").data[0] == doctest::Approx(1.0));
}

TEST_CASE("implied mean-difference scores separate the clouds symmetrically") {
  Array fr = Array::matrix(2, 2, {1, 0, 1, 0});
  Array ff = Array::matrix(2, 2, {-1, 0, -1, 0});
  std::vector<double> sr, sf;
  implied_md_scores(fr, ff, sr, sf);
  for (double s : sr) CHECK(s == doctest::Approx(2.0));   // <(2,0),(1,0)> + 0
  for (double s : sf) CHECK(s == doctest::Approx(-2.0));
}
