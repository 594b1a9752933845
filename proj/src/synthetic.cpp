#include "smssvd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "smssvd/tsv.hpp"

namespace smssvd {

namespace {

using nlohmann::json;

constexpr int kMaxResampleAttempts = 100;

void check_feasible(const SyntheticSpec& s) {
  if (s.n_samples < 1 || s.n_variables < 1) {
    throw std::invalid_argument("synthetic: N and P must be positive");
  }
  if (s.n_signals < 1 || s.rank_per_signal < 1) {
    throw std::invalid_argument("synthetic: K and d must be positive");
  }
  if (s.support_size < s.rank_per_signal) {
    throw std::invalid_argument("synthetic: support size L must be at least the signal rank d");
  }
  const Index total = s.n_signals * s.rank_per_signal;
  if (total > std::min(s.n_samples, s.n_variables)) {
    throw std::invalid_argument("synthetic: K*d exceeds min(N, P)");
  }
  if (s.disjoint_supports && s.n_signals * s.support_size > s.n_variables) {
    throw std::invalid_argument("synthetic: K*L exceeds P, disjoint supports infeasible");
  }
  if (s.noise_sigma < 0.0) throw std::invalid_argument("synthetic: noise sigma must be >= 0");
}

Vector gaussian_vector(Index n, Rng& rng) {
  Vector g(n);
  for (Index i = 0; i < n; ++i) g(i) = rng.gaussian();
  return g;
}

// Draws, projects off the span of `taken` columns (twice, for clean
// orthogonality), normalizes; resamples on degeneracy.
Vector orthogonal_unit_column(Index n, const Matrix& taken, Index n_taken, Rng& rng) {
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    Vector g = gaussian_vector(n, rng);
    if (n_taken > 0) {
      const auto prior = taken.leftCols(n_taken);
      g.noalias() -= prior * (prior.transpose() * g);
      g.noalias() -= prior * (prior.transpose() * g);
    }
    const double norm = g.norm();
    if (norm > 1e-8) return g / norm;
  }
  throw std::runtime_error("synthetic: projection degeneracy persisted after resampling");
}

std::vector<Index> sample_without_replacement(std::vector<Index>& pool, Index count, Rng& rng) {
  std::vector<Index> picked;
  picked.reserve(static_cast<size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const size_t j = static_cast<size_t>(rng.uniform() * static_cast<double>(pool.size()));
    const size_t at = std::min(j, pool.size() - 1);
    picked.push_back(pool[at]);
    pool[at] = pool.back();
    pool.pop_back();
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

GroundTruth generate_impl(const SyntheticSpec& spec, const Matrix* sigma_matrix) {
  check_feasible(spec);
  if (sigma_matrix != nullptr &&
      (sigma_matrix->rows() != spec.n_variables || sigma_matrix->cols() != spec.n_samples)) {
    throw std::invalid_argument("synthetic: noise sigma matrix shape mismatch");
  }

  const Index n = spec.n_samples;
  const Index p = spec.n_variables;
  const Index l = spec.support_size;
  const Index k_signals = spec.n_signals;
  const Index d = spec.rank_per_signal;
  Rng rng(spec.seed);

  GroundTruth truth;
  truth.spec = spec;

  std::vector<Index> disjoint_pool(static_cast<size_t>(p));
  std::iota(disjoint_pool.begin(), disjoint_pool.end(), Index{0});

  Matrix v_taken(n, k_signals * d);
  Matrix u_taken(p, k_signals * d);
  Index taken = 0;

  for (Index k = 0; k < k_signals; ++k) {
    PlantedSignal sig;
    if (spec.disjoint_supports) {
      sig.support = sample_without_replacement(disjoint_pool, l, rng);
    } else {
      std::vector<Index> pool(static_cast<size_t>(p));
      std::iota(pool.begin(), pool.end(), Index{0});
      sig.support = sample_without_replacement(pool, l, rng);
    }

    sig.v.resize(n, d);
    for (Index i = 0; i < d; ++i) {
      sig.v.col(i) = orthogonal_unit_column(n, v_taken, taken + i, rng);
      v_taken.col(taken + i) = sig.v.col(i);
    }

    // Basis for prior u columns restricted to this support; orthogonality
    // inside the L-dimensional coordinate space gives full-space
    // orthogonality because the new column is zero elsewhere.
    std::vector<Vector> restricted_basis;
    for (Index c = 0; c < taken; ++c) {
      Vector r(l);
      for (Index i = 0; i < l; ++i) r(i) = u_taken(sig.support[static_cast<size_t>(i)], c);
      for (const Vector& q : restricted_basis) r -= q * q.dot(r);
      for (const Vector& q : restricted_basis) r -= q * q.dot(r);
      if (r.norm() > 1e-10) restricted_basis.push_back(r / r.norm());
    }

    sig.u = Matrix::Zero(p, d);
    for (Index i = 0; i < d; ++i) {
      Vector local(l);
      bool placed = false;
      for (int attempt = 0; attempt < kMaxResampleAttempts && !placed; ++attempt) {
        local = gaussian_vector(l, rng);
        for (const Vector& q : restricted_basis) local -= q * q.dot(local);
        for (const Vector& q : restricted_basis) local -= q * q.dot(local);
        placed = local.norm() > 1e-8;
      }
      if (!placed) throw std::runtime_error("synthetic: support projection degeneracy");
      local /= local.norm();
      restricted_basis.push_back(local);
      for (Index r = 0; r < l; ++r) sig.u(sig.support[static_cast<size_t>(r)], i) = local(r);
      u_taken.col(taken + i) = sig.u.col(i);
    }

    sig.sigma.resize(d);
    for (Index i = 0; i < d; ++i) {
      sig.sigma(i) = std::pow(0.6, static_cast<double>(k)) * std::pow(0.9, static_cast<double>(i));
    }
    taken += d;
    truth.signals.push_back(std::move(sig));
  }

  truth.clean = Matrix::Zero(p, n);
  for (const auto& sig : truth.signals) truth.clean += sig.dense();

  if (sigma_matrix != nullptr) {
    truth.noisy = truth.clean;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < p; ++i) {
        truth.noisy(i, j) += (*sigma_matrix)(i, j) * rng.gaussian();
      }
    }
  } else if (spec.noise_sigma > 0.0) {
    truth.noisy = truth.clean;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < p; ++i) {
        truth.noisy(i, j) += spec.noise_sigma * rng.gaussian();
      }
    }
  } else {
    truth.noisy = truth.clean;
  }
  return truth;
}

}  // namespace

GroundTruth generate(const SyntheticSpec& spec) {
  return generate_impl(spec, nullptr);
}

GroundTruth generate(const SyntheticSpec& spec, const Matrix& noise_sigma_matrix) {
  return generate_impl(spec, &noise_sigma_matrix);
}

GroundTruth biplot_scenario(BiplotMode mode, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_samples = 32;
  spec.n_variables = 5000;
  spec.support_size = 64;
  spec.n_signals = 2;
  spec.rank_per_signal = 2;
  spec.seed = seed;
  spec.disjoint_supports = true;

  switch (mode) {
    case BiplotMode::NoNoise:
      spec.noise_sigma = 0.0;
      return generate(spec);
    case BiplotMode::NoiseAll:
      spec.noise_sigma = kBiplotNoiseAllSigma;
      return generate(spec);
    case BiplotMode::NoiseOffSupport: {
      // The support rows are determined by the spec and seed alone, so a
      // noise-free pre-pass gives the mask without disturbing the stream.
      spec.noise_sigma = 0.0;
      const GroundTruth dry = generate(spec);
      Matrix mask = Matrix::Constant(spec.n_variables, spec.n_samples, kBiplotNoiseOffSupportSigma);
      for (const auto& sig : dry.signals) {
        for (Index row : sig.support) mask.row(row).setZero();
      }
      return generate(spec, mask);
    }
  }
  throw std::invalid_argument("biplot_scenario: unknown mode");
}

void write_ground_truth(const std::filesystem::path& dir, const GroundTruth& truth) {
  std::filesystem::create_directories(dir);
  write_tsv_matrix(dir / "X.tsv", make_data_matrix(truth.noisy));
  for (size_t k = 0; k < truth.signals.size(); ++k) {
    const auto& sig = truth.signals[k];
    write_tsv_matrix(dir / ("Y_" + std::to_string(k + 1) + ".tsv"), make_data_matrix(sig.dense()));
    std::ofstream support(dir / ("support_" + std::to_string(k + 1) + ".txt"));
    for (Index row : sig.support) support << row << '\n';
  }
  json j;
  j["n_samples"] = truth.spec.n_samples;
  j["n_variables"] = truth.spec.n_variables;
  j["support_size"] = truth.spec.support_size;
  j["n_signals"] = truth.spec.n_signals;
  j["rank_per_signal"] = truth.spec.rank_per_signal;
  j["noise_sigma"] = truth.spec.noise_sigma;
  j["seed"] = truth.spec.seed;
  j["disjoint_supports"] = truth.spec.disjoint_supports;
  std::ofstream out(dir / "spec.json");
  out << j.dump(2) << '\n';
}

GroundTruth read_ground_truth(const std::filesystem::path& dir) {
  std::ifstream spec_in(dir / "spec.json");
  if (!spec_in) throw std::runtime_error("missing spec.json in " + dir.string());
  json j = json::parse(spec_in);

  GroundTruth truth;
  truth.spec.n_samples = j.at("n_samples").get<Index>();
  truth.spec.n_variables = j.at("n_variables").get<Index>();
  truth.spec.support_size = j.at("support_size").get<Index>();
  truth.spec.n_signals = j.at("n_signals").get<Index>();
  truth.spec.rank_per_signal = j.at("rank_per_signal").get<Index>();
  truth.spec.noise_sigma = j.at("noise_sigma").get<double>();
  truth.spec.seed = j.at("seed").get<std::uint64_t>();
  truth.spec.disjoint_supports = j.at("disjoint_supports").get<bool>();

  truth.noisy = read_tsv_matrix(dir / "X.tsv").values;
  truth.clean = Matrix::Zero(truth.spec.n_variables, truth.spec.n_samples);
  for (Index k = 0; k < truth.spec.n_signals; ++k) {
    PlantedSignal sig;
    const Matrix y = read_tsv_matrix(dir / ("Y_" + std::to_string(k + 1) + ".tsv")).values;
    std::ifstream support_in(dir / ("support_" + std::to_string(k + 1) + ".txt"));
    if (!support_in) {
      throw std::runtime_error("missing support file for signal " + std::to_string(k + 1));
    }
    Index row;
    while (support_in >> row) sig.support.push_back(row);

    const SvdFactors f = svd_truncated(y, truth.spec.rank_per_signal);
    sig.u = f.u;
    sig.sigma = f.sigma;
    sig.v = f.v;
    truth.clean += y;
    truth.signals.push_back(std::move(sig));
  }
  return truth;
}

}  // namespace smssvd
