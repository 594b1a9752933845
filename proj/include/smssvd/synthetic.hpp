#pragma once

#include <filesystem>

#include "smssvd/linalg.hpp"
#include "smssvd/rng.hpp"

namespace smssvd {

// Planted-signal generator: K mutually orthogonal low-rank signals with
// sparse variable support, a fixed power decay, plus gaussian noise.
struct SyntheticSpec {
  Index n_samples = 100;
  Index n_variables = 1000;
  Index support_size = 64;
  Index n_signals = 8;
  Index rank_per_signal = 2;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  bool disjoint_supports = true;
};

struct PlantedSignal {
  Matrix u;       // P x d, zero off support
  Vector sigma;   // d, power schedule 0.6^{k-1} * 0.9^{i-1}
  Matrix v;       // N x d
  std::vector<Index> support;

  Matrix dense() const { return u * sigma.asDiagonal() * v.transpose(); }
  double strength() const { return sigma.norm(); }  // == Frobenius norm of dense()
};

struct GroundTruth {
  SyntheticSpec spec;
  std::vector<PlantedSignal> signals;
  Matrix clean;
  Matrix noisy;
};

GroundTruth generate(const SyntheticSpec& spec);

// Per-entry noise standard deviations (P x N); overrides spec.noise_sigma.
GroundTruth generate(const SyntheticSpec& spec, const Matrix& noise_sigma_matrix);

// The two-signal wide-matrix scenario: 32 samples, 5000 variables, two
// rank-2 signals supported on 64 variables each.
enum class BiplotMode { NoNoise, NoiseOffSupport, NoiseAll };

inline constexpr double kBiplotNoiseOffSupportSigma = 0.005;
inline constexpr double kBiplotNoiseAllSigma = 0.005;

GroundTruth biplot_scenario(BiplotMode mode, std::uint64_t seed = 1);

// Directory layout: X.tsv, Y_<k>.tsv, support_<k>.txt, spec.json.
void write_ground_truth(const std::filesystem::path& dir, const GroundTruth& truth);
GroundTruth read_ground_truth(const std::filesystem::path& dir);

}  // namespace smssvd
