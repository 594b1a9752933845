#pragma once

#include "smssvd/engine.hpp"
#include "smssvd/spc.hpp"
#include "smssvd/synthetic.hpp"

namespace smssvd {

struct RankOneComponent {
  Vector u;  // P
  double sigma = 0.0;
  Vector v;  // N
};

std::vector<RankOneComponent> split_components(const SvdFactors& f);
std::vector<RankOneComponent> split_components(const Decomposition& dec);
std::vector<RankOneComponent> split_components(const SpcFactors& f);

// Capacity-constrained greedy assignment of rank-1 components to planted
// signals: repeatedly commit the (component, signal) pair that lowers the
// total support-restricted error the most, until capacities (= each
// signal's rank) or the components run out. Errors are Frobenius norms
// over support rows only.
struct MatchResult {
  std::vector<int> assignment;            // component index -> signal index, -1 unassigned
  std::vector<double> per_signal_error;   // err(k)
  std::vector<double> signal_strength;    // ||Y_k||_F
  double total_error = 0.0;
};

MatchResult greedy_match(const std::vector<RankOneComponent>& components,
                         const GroundTruth& truth);

// Gaussian mixture scoring of a labeled sample representation: one MLE
// gaussian per label, priors proportional to label counts. loglik is the
// conditional (posterior) label likelihood; the joint variant is also
// reported. aic = 2 * n_params - 2 * loglik.
struct AicResult {
  double loglik = 0.0;
  int n_params = 0;
  double aic = 0.0;
  double loglik_joint = 0.0;
  bool covariance_regularized = false;
};

AicResult aic_gmm(const Matrix& coords, const std::vector<std::string>& labels);

// Method selector for comparisons; parse accepts "svd", "smssvd",
// "spc:c=<value>" and "spc:c=r<fraction>" (fraction of sqrt(P)).
struct MethodSpec {
  enum class Kind { Svd, Smssvd, Spc };
  Kind kind = Kind::Svd;
  double c = 0.0;
  bool c_relative = false;
  std::string label;
};

MethodSpec parse_method(const std::string& text);  // throws InputError

struct CompareRow {
  std::string method;
  int signal = 0;  // 1-based
  double err = 0.0;
  double strength = 0.0;
  bool flagged = false;  // err exceeds the signal strength
};

// Runs each method on truth.noisy with enough components to cover the
// planted ranks, splits into rank-1 terms, greedy-matches, and reports
// err(k) per signal.
std::vector<CompareRow> compare_methods(const GroundTruth& truth,
                                        const std::vector<MethodSpec>& methods,
                                        const EngineConfig& engine_config,
                                        const SpcConfig& spc_base);

}  // namespace smssvd
