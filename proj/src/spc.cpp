#include "smssvd/spc.hpp"

#include <cmath>
#include <stdexcept>

namespace smssvd {

namespace {

constexpr int kBisectionSteps = 50;

double l1_of_unit(const Vector& x) {
  const double norm = x.norm();
  return norm > 0.0 ? x.lpNorm<1>() / norm : 0.0;
}

// Smallest lambda such that soft_threshold(z, lambda) normalized to unit
// L2 has L1 norm <= bound. The map is monotone in lambda, so a fixed
// bisection count gives a bit-stable answer.
double find_threshold(const Vector& z, double bound) {
  if (l1_of_unit(z) <= bound) return 0.0;
  double lo = 0.0;
  double hi = z.cwiseAbs().maxCoeff();
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Vector candidate = soft_threshold(z, mid);
    const double l1 = candidate.norm() > 0.0 ? l1_of_unit(candidate) : 1.0;
    if (l1 > bound) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

Vector soft_threshold(const Vector& x, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("soft_threshold: lambda must be nonnegative");
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double shrunk = std::abs(x(i)) - lambda;
    out(i) = shrunk > 0.0 ? (x(i) > 0.0 ? shrunk : -shrunk) : 0.0;
  }
  return out;
}

SpcFactors spc(const Matrix& x, const SpcConfig& config) {
  if (!all_finite(x)) throw std::invalid_argument("spc: non-finite input");
  const Index p = x.rows();
  const Index n = x.cols();
  const double c_max = std::sqrt(static_cast<double>(p));
  if (!(config.c >= 1.0 && config.c <= c_max + 1e-12)) {
    throw std::invalid_argument("spc: c must be in [1, sqrt(P)]");
  }
  if (config.n_factors < 1) throw std::invalid_argument("spc: n_factors must be >= 1");

  const Index m_max = std::min({static_cast<Index>(config.n_factors), p, n});
  Matrix u_all(p, m_max);
  Matrix v_all(n, m_max);
  Vector sigma_all(m_max);
  std::vector<bool> converged;
  std::vector<std::vector<double>> traces;

  Matrix residual = x;
  const double scale = x.norm();
  Index m = 0;
  for (; m < m_max; ++m) {
    if (residual.norm() <= 1e-12 * scale) break;

    Vector v = svd_truncated(residual, 1).v.col(0);
    Vector u = Vector::Zero(p);
    bool ok = false;
    std::vector<double> trace;
    for (int iter = 0; iter < config.max_iter; ++iter) {
      const Vector z = residual * v;
      const double lambda = find_threshold(z, config.c);
      Vector u_next = soft_threshold(z, lambda);
      const double u_norm = u_next.norm();
      if (u_norm == 0.0) break;
      u_next /= u_norm;

      Vector w = residual.transpose() * u_next;
      if (m > 0) {
        const auto prior = v_all.leftCols(m);
        w.noalias() -= prior * (prior.transpose() * w);
      }
      const double w_norm = w.norm();
      if (w_norm == 0.0) break;
      v = w / w_norm;
      trace.push_back(u_next.dot(residual * v));

      const double change = (u_next - u).norm();
      u = u_next;
      if (iter > 0 && change < config.conv_tol) {
        ok = true;
        break;
      }
    }
    if (u.norm() == 0.0) break;  // nothing left to extract

    const double sigma = u.dot(residual * v);
    u_all.col(m) = u;
    v_all.col(m) = v;
    sigma_all(m) = sigma;
    converged.push_back(ok);
    traces.push_back(std::move(trace));
    residual.noalias() -= sigma * u * v.transpose();
  }

  SpcFactors out;
  out.u = u_all.leftCols(m);
  out.sigma = sigma_all.head(m);
  out.v = v_all.leftCols(m);
  out.converged = std::move(converged);
  out.objective_trace = std::move(traces);
  return out;
}

}  // namespace smssvd
