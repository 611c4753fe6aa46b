#include "geomgan/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace geomgan {

namespace {
double pos_part(double x) { return x > 0.0 ? x : 0.0; }
}

void DiscreteDensityPair::validate() const {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("DiscreteDensityPair: length mismatch");
  double sp = 0.0, sq = 0.0;
  for (double v : p) {
    if (v < 0) throw std::invalid_argument("DiscreteDensityPair: negative mass");
    sp += v;
  }
  for (double v : q) {
    if (v < 0) throw std::invalid_argument("DiscreteDensityPair: negative mass");
    sq += v;
  }
  if (std::fabs(sp - 1.0) > 1e-12 || std::fabs(sq - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteDensityPair: densities must sum to 1");
}

double phi_lemma1(double y, double m) {
  if (m <= 0) throw std::invalid_argument("phi_lemma1: m must be positive");
  return (m - y) + pos_part(m + y);
}

double phi_lemma2(double y, double alpha, double beta, double m) {
  if (alpha < 0 || beta < 0)
    throw std::invalid_argument("phi_lemma2: alpha and beta must be nonnegative");
  if (m <= 0) throw std::invalid_argument("phi_lemma2: m must be positive");
  return alpha * pos_part(m - y) + beta * pos_part(m + y);
}

double optimal_discriminator_cost(const DiscreteDensityPair& d) {
  d.validate();
  double acc = 0.0;
  for (std::size_t i = 0; i < d.bins(); ++i) acc += std::min(d.p[i], d.q[i]);
  return 2.0 * acc;
}

double brute_force_discriminator_cost(const DiscreteDensityPair& d, double grid_step) {
  d.validate();
  if (grid_step <= 0)
    throw std::invalid_argument("brute_force_discriminator_cost: grid step must be positive");
  // The proof's optimal per-bin values are +-1; the sweep extends to [-3, 3]
  // so the claim is checked rather than assumed.
  const double lo = -3.0, hi = 3.0;
  auto steps = static_cast<std::size_t>(std::floor((hi - lo) / grid_step)) + 1;
  double total = 0.0;
  for (std::size_t i = 0; i < d.bins(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < steps; ++k) {
      double v = lo + static_cast<double>(k) * grid_step;
      double cost = d.p[i] * pos_part(1.0 - v) + d.q[i] * pos_part(1.0 + v);
      if (cost < best) best = cost;
    }
    total += best;
  }
  return total;
}

Hyperplane2D parallel_lines_hyperplane(double theta) {
  if (theta >= 0) return {{-1.0, 0.0}, theta / 2.0};
  return {{1.0, 0.0}, -theta / 2.0};
}

double parallel_lines_generator_loss(double theta) { return std::fabs(theta) / 2.0; }

double parallel_lines_discriminator_cost(double theta) {
  return 2.0 * pos_part(1.0 - std::fabs(theta) / 2.0);
}

}  // namespace geomgan
