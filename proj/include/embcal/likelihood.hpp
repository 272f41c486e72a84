#pragma once

#include <Eigen/Core>

#include "embcal/pce.hpp"
#include "embcal/problem.hpp"

namespace embcal {

// Predictive first/second moments of the stochastic response at each
// observation point, plus the prescribed measurement noise.
struct MomentSummary {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;  // response std only, excludes noise
  double noise_std = 0.0;
};

// Pooled residual statistics shared by the moment likelihoods.
struct ResidualStats {
  double u_mean = 0.0;
  double u_var = 0.0;  // spread of raw residuals, unbiased denominator
  double ur_mean = 0.0;
  double ur_var = 0.0;  // spread of residuals scaled by predictive std
  double var_f = 0.0;   // mean(sigma^2) + noise_std^2
};

// Distance-based likelihood: matches means against the noise scale and the
// response spread against gamma-scaled absolute residuals, with tolerance
// epsilon on the spread term. Requires noise_std > 0, epsilon > 0, gamma > 0.
double log_abc(const MomentSummary& ms, const Eigen::VectorXd& y, double epsilon, double gamma);

// Independent heteroscedastic normal with variance sigma_i^2 + noise^2.
double log_in(const MomentSummary& ms, const Eigen::VectorXd& y);

// Residual pooling; requires y.size() >= 2. Spread is measured about zero
// unless centered is set. The scaled statistics are NaN when any predictive
// variance vanishes.
ResidualStats residual_stats(const MomentSummary& ms, const Eigen::VectorXd& y,
                             bool centered = false);

// Moment likelihood on pooled residuals: normal density for the mean plus
// the exact sampling density of the scaled spread (chi-squared with n_y - 1
// degrees of freedom). Returns -inf when the spread is zero.
double log_gmm(const ResidualStats& stats, Eigen::Index n_y);

// Same construction on per-point standardized residuals, unit pooled variance.
double log_rgmm(const ResidualStats& stats, Eigen::Index n_y);

// Full dispatch: propagates the embedded perturbations through the model by
// PCE projection and evaluates the configured likelihood. Returns -inf when
// a scale is negative or the model rejects a quadrature point as out of
// domain. Throws on structural errors (no observations, bad sizes).
double log_likelihood(const InferenceProblem& problem, const Eigen::VectorXd& sample);

// log_prior + log_likelihood with early exit at -inf.
double log_posterior(const InferenceProblem& problem, const Eigen::VectorXd& sample);

// Predictive moments at one sample, via the problem's PCE configuration.
MomentSummary response_moments(const InferenceProblem& problem, const Eigen::VectorXd& sample);

}  // namespace embcal
