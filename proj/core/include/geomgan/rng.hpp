#pragma once

#include <cmath>
#include <cstdint>

namespace geomgan {

// Splittable deterministic random stream built on splitmix64. A stream is
// fully determined by (seed, stream index); the same pair reproduces the
// same sequence bit-exactly on one build. Concurrent consumers must use
// distinct stream indices.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
    state_ = mix(state_ ^ mix(stream + 0xBF58476D1CE4E5B9ULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // Guard log(0); 2^-53 keeps the value well inside the finite range.
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n) without modulo bias (Lemire reduction).
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream index registry: every consumer of randomness inside one run draws
// from its own stream so runs stay reproducible when the call order shifts.
namespace rng_streams {
inline constexpr std::uint64_t kDataPool = 0;
inline constexpr std::uint64_t kDataBatch = 1;
inline constexpr std::uint64_t kLatentTrain = 2;
inline constexpr std::uint64_t kLatentEval = 3;
inline constexpr std::uint64_t kInitDiscriminator = 4;
inline constexpr std::uint64_t kInitGenerator = 5;
}  // namespace rng_streams

}  // namespace geomgan
