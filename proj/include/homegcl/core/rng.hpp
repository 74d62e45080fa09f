#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace homegcl {

// Seeded generator with platform-stable draws. The standard distributions are
// implementation-defined, so the conversions below are spelled out.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller.
  double normal();

  // Index drawn proportionally to non-negative weights.
  std::size_t categorical(const std::vector<double>& weights);

  // Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n);

  // Child seed for an independent stream.
  std::uint64_t derive_seed() { return engine_() ^ 0x9e3779b97f4a7c15ULL; }

  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

}  // namespace homegcl
