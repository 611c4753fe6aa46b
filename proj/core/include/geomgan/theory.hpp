#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "geomgan/array.hpp"

namespace geomgan {

// Closed-form and brute-force verifiers for the convergence theory,
// independent of the training stack.

// A pair of discrete densities on a shared finite grid.
struct DiscreteDensityPair {
  std::vector<double> p;
  std::vector<double> q;

  std::size_t bins() const { return p.size(); }
  void validate() const;
};

// phi(y) = (m - y) + [m + y]+ ; minimum 2m, attained at every y >= -m.
double phi_lemma1(double y, double m);

// phi(y) = alpha [m - y]+ + beta [m + y]+ ; minimum 2 min(alpha, beta) m.
double phi_lemma2(double y, double alpha, double beta, double m);

// Population hinge cost of the optimal discriminator: 2 sum_i min(p_i, q_i).
// Equals 2 exactly iff p == q elementwise.
double optimal_discriminator_cost(const DiscreteDensityPair& d);

// Exhaustive per-bin minimization of p_i [1 - d]+ + q_i [1 + d]+ over a grid
// of discriminator values; sweeps d in [-3, 3] to confirm nothing outside
// [-1, 1] does better. Agrees with the closed form within 2 * grid_step.
double brute_force_discriminator_cost(const DiscreteDensityPair& d, double grid_step);

// Parallel-lines closed forms: true data on the vertical line through the
// origin, generator samples on the line x = theta.
struct Hyperplane2D {
  double w[2];
  double b;
};

Hyperplane2D parallel_lines_hyperplane(double theta);   // w=(-1,0), b=theta/2 for theta >= 0
double parallel_lines_generator_loss(double theta);     // |theta| / 2
double parallel_lines_discriminator_cost(double theta); // 2 [1 - |theta|/2]+

}  // namespace geomgan
