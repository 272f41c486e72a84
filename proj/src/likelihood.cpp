#include "embcal/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace embcal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double neg_inf() { return -std::numeric_limits<double>::infinity(); }

void check_summary(const MomentSummary& ms, const Eigen::VectorXd& y) {
  if (y.size() == 0) throw std::invalid_argument("likelihood: no observations");
  if (ms.mu.size() != y.size() || ms.sigma.size() != y.size())
    throw std::invalid_argument("likelihood: moment/observation size mismatch");
  if (ms.noise_std < 0.0) throw std::invalid_argument("likelihood: negative noise_std");
}

}  // namespace

double log_abc(const MomentSummary& ms, const Eigen::VectorXd& y, double epsilon, double gamma) {
  check_summary(ms, y);
  if (!(epsilon > 0.0)) throw std::invalid_argument("log_abc: epsilon must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("log_abc: gamma must be > 0");
  if (!(ms.noise_std > 0.0)) throw std::invalid_argument("log_abc: noise_std must be > 0");
  const auto n = y.size();
  const double sn = ms.noise_std;
  double ll = -0.5 * n * std::log(kTwoPi * epsilon * epsilon * sn * sn);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double du = ms.mu[i] - y[i];
    const double spread = ms.sigma[i] + sn - gamma * std::abs(du);
    ll -= du * du / (2.0 * sn * sn) + spread * spread / (2.0 * epsilon * epsilon);
  }
  return ll;
}

double log_in(const MomentSummary& ms, const Eigen::VectorXd& y) {
  check_summary(ms, y);
  const auto n = y.size();
  double ll = -0.5 * n * std::log(kTwoPi);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = ms.sigma[i] * ms.sigma[i] + ms.noise_std * ms.noise_std;
    if (!(var > 0.0)) throw std::invalid_argument("log_in: zero predictive variance");
    const double du = y[i] - ms.mu[i];
    ll -= 0.5 * std::log(var) + du * du / (2.0 * var);
  }
  return ll;
}

ResidualStats residual_stats(const MomentSummary& ms, const Eigen::VectorXd& y, bool centered) {
  check_summary(ms, y);
  const auto n = y.size();
  if (n < 2) throw std::invalid_argument("residual_stats: need at least two observations");
  const Eigen::VectorXd u = y - ms.mu;
  ResidualStats stats;
  stats.u_mean = u.mean();
  stats.u_var = centered ? (u.array() - stats.u_mean).square().sum() / double(n - 1)
                         : u.squaredNorm() / double(n - 1);
  stats.var_f = ms.sigma.squaredNorm() / double(n) + ms.noise_std * ms.noise_std;

  const Eigen::ArrayXd var = ms.sigma.array().square() + ms.noise_std * ms.noise_std;
  if ((var > 0.0).all()) {
    const Eigen::ArrayXd ur = u.array() / var.sqrt();
    stats.ur_mean = ur.mean();
    const double ssq = centered ? (ur - stats.ur_mean).square().sum() : ur.square().sum();
    stats.ur_var = ssq / double(n - 1);
  } else {
    stats.ur_mean = std::numeric_limits<double>::quiet_NaN();
    stats.ur_var = std::numeric_limits<double>::quiet_NaN();
  }
  return stats;
}

namespace {

// Mean term: u_mean ~ N(0, var_f / n). Spread term: n*u_var/var_f follows a
// chi-squared with n - 1 degrees of freedom; its density is evaluated as
// printed, without a change-of-variable factor.
double log_moment_pair(double u_mean, double u_var, double var_f, Eigen::Index n_y) {
  if (n_y < 2) throw std::invalid_argument("log_gmm: need at least two observations");
  if (!(var_f > 0.0)) throw std::invalid_argument("log_gmm: pooled variance must be > 0");
  if (!std::isfinite(u_mean) || !std::isfinite(u_var))
    throw std::invalid_argument("log_gmm: non-finite residual statistics");
  if (!(u_var > 0.0)) return neg_inf();
  const double n = static_cast<double>(n_y);
  const double half_dof = 0.5 * (n - 1.0);
  const double l1 = -0.5 * std::log(kTwoPi * var_f / n) - n * u_mean * u_mean / (2.0 * var_f);
  const double ratio = n * u_var / var_f;
  const double l2 = -half_dof * std::log(2.0) - std::lgamma(half_dof) - 0.5 * ratio +
                    (half_dof - 1.0) * std::log(ratio);
  return l1 + l2;
}

}  // namespace

double log_gmm(const ResidualStats& stats, Eigen::Index n_y) {
  return log_moment_pair(stats.u_mean, stats.u_var, stats.var_f, n_y);
}

double log_rgmm(const ResidualStats& stats, Eigen::Index n_y) {
  return log_moment_pair(stats.ur_mean, stats.ur_var, 1.0, n_y);
}

MomentSummary response_moments(const InferenceProblem& problem, const Eigen::VectorXd& sample) {
  Eigen::VectorXd means, scales;
  model_inputs(problem, sample, means, scales);
  const HermiteBasis basis = build_basis(problem.model_dim(), problem.pce_degree);
  const QuadratureRule quad = build_quadrature(problem.model_dim(), problem.quad_order);
  const StochasticResponse response = project(*problem.model, means, scales, basis, quad);
  MomentSummary ms;
  moments(response, ms.mu, ms.sigma);
  ms.noise_std = problem.observations.noise_std;
  return ms;
}

double log_likelihood(const InferenceProblem& problem, const Eigen::VectorXd& sample) {
  if (problem.observations.y.size() == 0)
    throw std::invalid_argument("log_likelihood: no observations");
  Eigen::VectorXd means, scales;
  model_inputs(problem, sample, means, scales);
  if (scales.minCoeff() < 0.0) return neg_inf();

  MomentSummary ms;
  try {
    ms = response_moments(problem, sample);
  } catch (const ModelDomainError&) {
    return neg_inf();
  }

  const Eigen::VectorXd& y = problem.observations.y;
  switch (problem.likelihood.kind) {
    case LikelihoodKind::Abc:
      return log_abc(ms, y, problem.likelihood.epsilon, problem.likelihood.gamma);
    case LikelihoodKind::IndependentNormal:
      return log_in(ms, y);
    case LikelihoodKind::GlobalMoments:
      return log_gmm(residual_stats(ms, y, problem.likelihood.center_spread_at_mean), y.size());
    case LikelihoodKind::RelativeMoments:
      return log_rgmm(residual_stats(ms, y, problem.likelihood.center_spread_at_mean), y.size());
  }
  throw std::logic_error("unreachable");
}

double log_posterior(const InferenceProblem& problem, const Eigen::VectorXd& sample) {
  const double lp = log_prior(problem, sample);
  if (!std::isfinite(lp)) return neg_inf();
  const double ll = log_likelihood(problem, sample);
  return std::isfinite(ll) ? lp + ll : neg_inf();
}

}  // namespace embcal
