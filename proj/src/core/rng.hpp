#pragma once

#include <cstdint>

namespace interformer {

// Deterministic random source with explicit transforms so that streams are
// reproducible independent of the standard library's distribution
// implementations. Sub-streams derived with derive() are statistically
// independent of the parent stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double sd);

  // Deterministic child stream keyed by `key`.
  Rng derive(std::uint64_t key) const;

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace interformer
