#include "smssvd/evaluation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "smssvd/tsv.hpp"

namespace smssvd {

std::vector<RankOneComponent> split_components(const SvdFactors& f) {
  std::vector<RankOneComponent> out;
  out.reserve(static_cast<size_t>(f.dim()));
  for (Index i = 0; i < f.dim(); ++i) {
    out.push_back({f.u.col(i), f.sigma(i), f.v.col(i)});
  }
  return out;
}

std::vector<RankOneComponent> split_components(const Decomposition& dec) {
  std::vector<RankOneComponent> out;
  out.reserve(static_cast<size_t>(dec.total_dim));
  for (const auto& b : dec.blocks) {
    for (Index i = 0; i < b.dim(); ++i) {
      out.push_back({b.u.col(i), b.sigma(i), b.v.col(i)});
    }
  }
  return out;
}

std::vector<RankOneComponent> split_components(const SpcFactors& f) {
  std::vector<RankOneComponent> out;
  out.reserve(static_cast<size_t>(f.count()));
  for (Index i = 0; i < f.count(); ++i) {
    out.push_back({f.u.col(i), f.sigma(i), f.v.col(i)});
  }
  return out;
}

MatchResult greedy_match(const std::vector<RankOneComponent>& components,
                         const GroundTruth& truth) {
  const size_t n_signals = truth.signals.size();
  const size_t n_comp = components.size();

  std::vector<Index> capacity(n_signals);
  std::vector<Matrix> gap(n_signals);  // support rows of Y_k minus assigned terms
  std::vector<double> err(n_signals);
  size_t total_capacity = 0;
  for (size_t k = 0; k < n_signals; ++k) {
    const auto& sig = truth.signals[k];
    capacity[k] = sig.sigma.size();
    total_capacity += static_cast<size_t>(capacity[k]);
    SelectionMap rows{sig.support};
    gap[k] = select_rows(sig.dense(), rows);
    err[k] = gap[k].norm();
  }

  // component factors restricted to each support, cached
  std::vector<std::vector<Vector>> restricted(n_comp, std::vector<Vector>(n_signals));
  for (size_t i = 0; i < n_comp; ++i) {
    for (size_t k = 0; k < n_signals; ++k) {
      const auto& support = truth.signals[k].support;
      Vector r(static_cast<Index>(support.size()));
      for (size_t s = 0; s < support.size(); ++s) r(static_cast<Index>(s)) = components[i].u(support[s]);
      restricted[i][k] = components[i].sigma * r;
    }
  }

  MatchResult result;
  result.assignment.assign(n_comp, -1);
  std::vector<bool> used(n_comp, false);
  size_t assigned = 0;
  while (assigned < std::min(n_comp, total_capacity)) {
    double best_decrease = -std::numeric_limits<double>::infinity();
    size_t best_i = 0, best_k = 0;
    double best_err = 0.0;
    for (size_t i = 0; i < n_comp; ++i) {
      if (used[i]) continue;
      for (size_t k = 0; k < n_signals; ++k) {
        if (capacity[k] == 0) continue;
        const double cand =
            (gap[k] - restricted[i][k] * components[i].v.transpose()).norm();
        const double decrease = err[k] - cand;
        if (decrease > best_decrease) {
          best_decrease = decrease;
          best_i = i;
          best_k = k;
          best_err = cand;
        }
      }
    }
    used[best_i] = true;
    result.assignment[best_i] = static_cast<int>(best_k);
    gap[best_k] -= restricted[best_i][best_k] * components[best_i].v.transpose();
    err[best_k] = best_err;
    --capacity[best_k];
    ++assigned;
  }

  result.per_signal_error = err;
  result.signal_strength.resize(n_signals);
  for (size_t k = 0; k < n_signals; ++k) result.signal_strength[k] = truth.signals[k].strength();
  result.total_error = std::accumulate(err.begin(), err.end(), 0.0);
  return result;
}

namespace {

struct GaussianComponent {
  double log_prior;
  Vector mean;
  Eigen::LLT<Matrix> chol;
  double log_det;
};

}  // namespace

AicResult aic_gmm(const Matrix& coords, const std::vector<std::string>& labels) {
  const Index n = coords.rows();
  const Index m = coords.cols();
  if (static_cast<Index>(labels.size()) != n) {
    throw std::invalid_argument("aic_gmm: one label per sample required");
  }
  if (n < 1 || m < 1) throw std::invalid_argument("aic_gmm: empty input");

  // groups in order of first appearance
  std::vector<std::string> group_names;
  std::vector<int> group_of(labels.size());
  {
    std::map<std::string, int> index;
    for (size_t i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = index.try_emplace(labels[i], static_cast<int>(group_names.size()));
      if (inserted) group_names.push_back(labels[i]);
      group_of[i] = it->second;
    }
  }
  const int n_groups = static_cast<int>(group_names.size());

  AicResult result;
  std::vector<GaussianComponent> comps;
  comps.reserve(static_cast<size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    std::vector<Index> members;
    for (Index i = 0; i < n; ++i) {
      if (group_of[static_cast<size_t>(i)] == g) members.push_back(i);
    }
    const double ng = static_cast<double>(members.size());
    Vector mean = Vector::Zero(m);
    for (Index i : members) mean += coords.row(i).transpose();
    mean /= ng;

    Matrix cov = Matrix::Zero(m, m);
    for (Index i : members) {
      const Vector centered = coords.row(i).transpose() - mean;
      cov.noalias() += centered * centered.transpose();
    }
    cov /= ng;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    const double max_eig = eig.eigenvalues().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (max_eig <= 0.0 || min_eig < 1e-10 * max_eig) {
      const double trace = cov.trace();
      const double ridge = trace > 0.0 ? 1e-6 * trace / static_cast<double>(m) : 1e-12;
      cov += ridge * Matrix::Identity(m, m);
      result.covariance_regularized = true;
    }

    GaussianComponent comp;
    comp.log_prior = std::log(ng / static_cast<double>(n));
    comp.mean = std::move(mean);
    comp.chol.compute(cov);
    if (comp.chol.info() != Eigen::Success) {
      throw std::runtime_error("aic_gmm: covariance factorization failed");
    }
    double log_det = 0.0;
    for (Index i = 0; i < m; ++i) log_det += std::log(comp.chol.matrixL()(i, i));
    comp.log_det = 2.0 * log_det;
    comps.push_back(std::move(comp));
  }

  const double log_2pi = std::log(2.0 * M_PI);
  double cond = 0.0;
  double joint = 0.0;
  Vector scores(n_groups);
  for (Index i = 0; i < n; ++i) {
    const Vector x = coords.row(i).transpose();
    for (int g = 0; g < n_groups; ++g) {
      const auto& comp = comps[static_cast<size_t>(g)];
      const Vector centered = x - comp.mean;
      const double maha = centered.dot(comp.chol.solve(centered));
      scores(g) = comp.log_prior -
                  0.5 * (static_cast<double>(m) * log_2pi + comp.log_det + maha);
    }
    const double top = scores.maxCoeff();
    const double log_norm = top + std::log((scores.array() - top).exp().sum());
    const int g = group_of[static_cast<size_t>(i)];
    joint += scores(g);
    cond += scores(g) - log_norm;
  }

  result.loglik = cond;
  result.loglik_joint = joint;
  result.n_params = n_groups * (static_cast<int>(m) + static_cast<int>(m * (m + 1) / 2));
  result.aic = 2.0 * result.n_params - 2.0 * result.loglik;
  return result;
}

MethodSpec parse_method(const std::string& text) {
  MethodSpec spec;
  spec.label = text;
  if (text == "svd") {
    spec.kind = MethodSpec::Kind::Svd;
    return spec;
  }
  if (text == "smssvd") {
    spec.kind = MethodSpec::Kind::Smssvd;
    return spec;
  }
  if (text.rfind("spc:c=", 0) == 0) {
    spec.kind = MethodSpec::Kind::Spc;
    std::string value = text.substr(6);
    if (!value.empty() && value[0] == 'r') {
      spec.c_relative = true;
      value = value.substr(1);
    }
    spec.c = parse_double(value);
    if (spec.c <= 0.0) throw InputError("method '" + text + "': c must be positive");
    return spec;
  }
  throw InputError("unknown method '" + text + "' (expected svd, smssvd or spc:c=...)");
}

std::vector<CompareRow> compare_methods(const GroundTruth& truth,
                                        const std::vector<MethodSpec>& methods,
                                        const EngineConfig& engine_config,
                                        const SpcConfig& spc_base) {
  Index capacity = 0;
  for (const auto& sig : truth.signals) capacity += sig.sigma.size();
  if (capacity < 1) throw std::invalid_argument("compare_methods: no planted signals");

  std::vector<CompareRow> rows;
  for (const auto& method : methods) {
    std::vector<RankOneComponent> components;
    switch (method.kind) {
      case MethodSpec::Kind::Svd:
        components = split_components(svd_truncated(truth.noisy, capacity));
        break;
      case MethodSpec::Kind::Smssvd: {
        EngineConfig cfg = engine_config;
        cfg.max_components = static_cast<int>(capacity);
        components = split_components(decompose(truth.noisy, cfg, Rng(cfg.seed)));
        break;
      }
      case MethodSpec::Kind::Spc: {
        SpcConfig cfg = spc_base;
        cfg.c = method.c_relative
                    ? method.c * std::sqrt(static_cast<double>(truth.noisy.rows()))
                    : method.c;
        cfg.n_factors = static_cast<int>(capacity);
        components = split_components(spc(truth.noisy, cfg));
        break;
      }
    }
    const MatchResult match = greedy_match(components, truth);
    for (size_t k = 0; k < truth.signals.size(); ++k) {
      CompareRow row;
      row.method = method.label;
      row.signal = static_cast<int>(k) + 1;
      row.err = match.per_signal_error[k];
      row.strength = match.signal_strength[k];
      row.flagged = row.err > row.strength;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace smssvd
