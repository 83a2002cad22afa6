#pragma once

#include <cstdint>

#include "vsp/types.hpp"

namespace vsp {

// Counter-based SplitMix64 stream.
//
// Draw i (0-based) of the stream keyed by `key` is
//   mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
// where mix64 is the SplitMix64 finalizer
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31).
// A stream key is derived from (seed, stream id) as
//   mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019)).
// The state is just the key and the counter, so any draw can be reproduced
// independently of platform or standard library. All samplers below are
// implemented here rather than through <random> distributions, whose output
// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  double normal();  // Box-Muller, pairs cached
  double exponential(double rate = 1.0);
  // Shape/scale parameterization: mean shape * scale.
  double gamma(double shape, double scale = 1.0);
  std::int64_t poisson(double mean);
  bool bernoulli(double p) { return uniform() < p; }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix64(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace vsp
