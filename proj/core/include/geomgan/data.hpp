#pragma once

#include <span>
#include <string>
#include <vector>

#include "geomgan/array.hpp"
#include "geomgan/rng.hpp"

namespace geomgan {

// Seeded samplers for the synthetic datasets: the 5x5 Gaussian grid and the
// parallel-lines construction.

struct GridMixtureSpec {
  int grid_side = 5;
  double coord_min = -21.0;
  double coord_max = 21.0;
  double std_dev = 0.316;  // variance 0.1 per axis

  int modes() const { return grid_side * grid_side; }
  double spacing() const {
    return (coord_max - coord_min) / static_cast<double>(grid_side - 1);
  }
  // Mode means in row-major grid order, [modes x 2].
  Array mode_means() const;
};

// n points, each: pick one of the 25 means uniformly, add isotropic noise.
Array sample_grid_mixture(const GridMixtureSpec& spec, std::size_t n, RngStream& rng);

// n x dim i.i.d. standard normal latents.
Array sample_latent(std::size_t n, std::size_t dim, RngStream& rng);

// n points (0, u) with u ~ U[0, 1].
Array sample_parallel_lines_real(std::size_t n, RngStream& rng);

// n x 1 latents u ~ U[0, 1] for the parallel-lines generator.
Array sample_parallel_lines_latent(std::size_t n, RngStream& rng);

// Rows (theta, z_i).
Array parallel_lines_generator(double theta, std::span<const double> z);

// Fixed data pool with without-replacement minibatches; the pool is
// reshuffled at every epoch boundary.
class FixedPool {
 public:
  FixedPool(Array pool, RngStream shuffle_rng);
  Array next_batch(std::size_t batch);
  std::size_t size() const { return pool_.rows(); }

 private:
  void reshuffle();
  Array pool_;
  RngStream rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

// Two-column CSV dump with an "x,y" header and '.' decimal separator.
void dump_xy_csv(const Array& points, const std::string& path);

}  // namespace geomgan
