#include "geomgan/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace geomgan {

ModeReport mode_coverage(const Array& samples, const GridMixtureSpec& spec,
                         double radius_stds, int min_count) {
  if (samples.rows() < 1 || samples.cols() != 2)
    throw std::invalid_argument("mode_coverage: need n x 2 samples");
  if (radius_stds <= 0)
    throw std::invalid_argument("mode_coverage: radius must be positive");
  Array means = spec.mode_means();
  std::size_t modes = means.rows();
  ModeReport rep;
  rep.per_mode_counts.assign(modes, 0);
  double radius_sq = radius_stds * spec.std_dev * radius_stds * spec.std_dev;
  std::size_t hq = 0;
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < modes; ++k) {
      double dx = samples.at(i, 0) - means.at(k, 0);
      double dy = samples.at(i, 1) - means.at(k, 1);
      double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    if (best <= radius_sq) {
      ++hq;
      ++rep.per_mode_counts[best_k];
    }
  }
  for (int c : rep.per_mode_counts)
    if (c >= min_count) ++rep.covered_modes;
  rep.high_quality_fraction = static_cast<double>(hq) / static_cast<double>(samples.rows());
  return rep;
}

namespace {
// Kahan-compensated accumulator so reductions agree across evaluation orders.
struct Compensated {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};
}  // namespace

double support_vector_fraction(std::span<const double> scores_real,
                               std::span<const double> scores_fake) {
  if (scores_real.empty() && scores_fake.empty())
    throw std::invalid_argument("support_vector_fraction: empty scores");
  std::size_t inside = 0;
  for (double s : scores_real)
    if (std::fabs(s) <= 1.0) ++inside;
  for (double s : scores_fake)
    if (std::fabs(s) <= 1.0) ++inside;
  return static_cast<double>(inside) /
         static_cast<double>(scores_real.size() + scores_fake.size());
}

double hinge_cost(std::span<const double> scores_real,
                  std::span<const double> scores_fake) {
  if (scores_real.empty() || scores_fake.empty())
    throw std::invalid_argument("hinge_cost: empty scores");
  Compensated real_sum, fake_sum;
  for (double s : scores_real) real_sum.add(std::max(0.0, 1.0 - s));
  for (double s : scores_fake) fake_sum.add(std::max(0.0, 1.0 + s));
  return real_sum.sum / static_cast<double>(scores_real.size()) +
         fake_sum.sum / static_cast<double>(scores_fake.size());
}

double equilibrium_gap(double d_loss_hinge_only) {
  return std::fabs(d_loss_hinge_only - 2.0);
}

}  // namespace geomgan
