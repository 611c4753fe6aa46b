#include "geomgan/data.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace geomgan {

Array GridMixtureSpec::mode_means() const {
  Array means({static_cast<std::size_t>(modes()), 2});
  double step = spacing();
  std::size_t k = 0;
  for (int r = 0; r < grid_side; ++r)
    for (int c = 0; c < grid_side; ++c) {
      means.at(k, 0) = coord_min + step * static_cast<double>(c);
      means.at(k, 1) = coord_min + step * static_cast<double>(r);
      ++k;
    }
  return means;
}

Array sample_grid_mixture(const GridMixtureSpec& spec, std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_grid_mixture: n must be >= 1");
  Array means = spec.mode_means();
  Array out({n, 2});
  auto modes = static_cast<std::uint64_t>(spec.modes());
  for (std::size_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(rng.bounded(modes));
    out.at(i, 0) = means.at(k, 0) + spec.std_dev * rng.normal();
    out.at(i, 1) = means.at(k, 1) + spec.std_dev * rng.normal();
  }
  return out;
}

Array sample_latent(std::size_t n, std::size_t dim, RngStream& rng) {
  if (n < 1 || dim < 1) throw std::invalid_argument("sample_latent: n, dim must be >= 1");
  Array out({n, dim});
  for (double& v : out.data) v = rng.normal();
  return out;
}

Array sample_parallel_lines_real(std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_parallel_lines_real: n must be >= 1");
  Array out({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    out.at(i, 0) = 0.0;
    out.at(i, 1) = rng.uniform01();
  }
  return out;
}

Array sample_parallel_lines_latent(std::size_t n, RngStream& rng) {
  Array out({n, 1});
  for (double& v : out.data) v = rng.uniform01();
  return out;
}

Array parallel_lines_generator(double theta, std::span<const double> z) {
  Array out({z.size(), 2});
  for (std::size_t i = 0; i < z.size(); ++i) {
    out.at(i, 0) = theta;
    out.at(i, 1) = z[i];
  }
  return out;
}

FixedPool::FixedPool(Array pool, RngStream shuffle_rng)
    : pool_(std::move(pool)), rng_(shuffle_rng) {
  order_.resize(pool_.rows());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  reshuffle();
}

void FixedPool::reshuffle() {
  for (std::size_t i = order_.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng_.bounded(i));
    std::swap(order_[i - 1], order_[j]);
  }
  cursor_ = 0;
}

Array FixedPool::next_batch(std::size_t batch) {
  if (batch == 0 || batch > pool_.rows())
    throw std::invalid_argument("FixedPool: bad batch size");
  if (cursor_ + batch > pool_.rows()) reshuffle();
  std::size_t cols = pool_.cols();
  Array out({batch, cols});
  for (std::size_t i = 0; i < batch; ++i) {
    std::size_t src = order_[cursor_ + i];
    for (std::size_t j = 0; j < cols; ++j) out.at(i, j) = pool_.at(src, j);
  }
  cursor_ += batch;
  return out;
}

namespace {
std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}
}  // namespace

void dump_xy_csv(const Array& points, const std::string& path) {
  if (points.cols() != 2) throw std::invalid_argument("dump_xy_csv: need n x 2 points");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_xy_csv: cannot open " + path);
  out << "x,y\n";
  for (std::size_t i = 0; i < points.rows(); ++i)
    out << format_double(points.at(i, 0)) << ',' << format_double(points.at(i, 1)) << '\n';
  if (!out) throw std::runtime_error("dump_xy_csv: write failed for " + path);
}

}  // namespace geomgan
