#pragma once

#include <cstdint>
#include <random>

namespace smssvd {

// Deterministic random source. Uniforms come from mt19937_64 through an
// explicit bit-level conversion and gaussians from the polar Box-Muller
// transform, so byte-identical streams do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal draw.
  double gaussian();

  // Independent stream derived from (seed, key). Does not consume state
  // from this stream, so substreams are schedule-independent.
  Rng substream(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace smssvd
