#pragma once

#include <span>
#include <vector>

#include "geomgan/array.hpp"
#include "geomgan/data.hpp"

namespace geomgan {

// Quantitative mode-collapse and equilibrium diagnostics.

struct ModeReport {
  int covered_modes = 0;            // modes with >= min_count high-quality samples
  double high_quality_fraction = 0; // samples within radius_stds of their nearest mode
  std::vector<int> per_mode_counts; // high-quality samples nearest to each mode
};

// A sample is high-quality iff it lies within radius_stds * std of its
// nearest mode mean; a mode is covered iff at least min_count high-quality
// samples land nearest to it.
ModeReport mode_coverage(const Array& samples, const GridMixtureSpec& spec,
                         double radius_stds, int min_count);

// Fraction of all 2n scores inside the margin set |score| <= 1.
double support_vector_fraction(std::span<const double> scores_real,
                               std::span<const double> scores_fake);

// Penalty-free hinge cost mean[1-s_r]+ + mean[1+s_f]+, compensated summation.
double hinge_cost(std::span<const double> scores_real,
                  std::span<const double> scores_fake);

// |hinge cost - 2|: distance from the equilibrium value of the penalty-free
// discriminator objective. The input must not include the ||w||^2 penalty.
double equilibrium_gap(double d_loss_hinge_only);

}  // namespace geomgan
