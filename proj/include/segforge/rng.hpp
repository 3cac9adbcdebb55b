#pragma once

#include <cstdint>
#include <string_view>

namespace segforge {

// Deterministic splitmix64 stream. All randomized pipeline steps draw from
// this generator with explicitly coded transforms so results are identical
// across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double next_double();

  // Uniform integer in [0, bound); bound 0 returns 0.
  std::uint64_t next_below(std::uint64_t bound);

  double next_uniform(double lo, double hi);

  // Box-Muller; draws two uniforms per call.
  double next_gaussian(double mean, double stddev);

  bool next_bernoulli(double p);

 private:
  std::uint64_t state_;
};

// Seed derivation for per-sample / per-transform streams:
// hash(master_seed, tag, ...) so results are schedule independent.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value);

}  // namespace segforge
