#include "segforge/rng.hpp"

#include <cmath>

namespace segforge {

namespace {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

}  // namespace

std::uint64_t Rng::next_u64() { return splitmix64_step(state_); }

double Rng::next_double() {
  // 53 high bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound == 0) return 0;
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

double Rng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double Rng::next_gaussian(double mean, double stddev) {
  double u1 = next_double();
  double u2 = next_double();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  return mean + stddev * r * std::cos(theta);
}

bool Rng::next_bernoulli(double p) { return next_double() < p; }

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : tag) {
    h ^= c;
    h *= kFnvPrime;
  }
  std::uint64_t state = seed ^ h;
  return splitmix64_step(state);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t state = seed ^ (value * kFnvPrime + 0x9E3779B97F4A7C15ULL);
  return splitmix64_step(state);
}

}  // namespace segforge
