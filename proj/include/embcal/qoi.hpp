#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "embcal/ensemble.hpp"
#include "embcal/forward_model.hpp"
#include "embcal/problem.hpp"

namespace embcal {

// Evenly spaced selection of `want` indices from [0, total); returns all of
// them when total <= want.  The first and last available indices are always
// included so the selection spans the chain.
std::vector<Eigen::Index> thin_indices(Eigen::Index total, Eigen::Index want);

// |mu - y| / sigma.  sigma == 0 collapses to 0 when the prediction is exact
// and +inf otherwise.
double z_value(double mu, double sigma, double y);

struct PushForwardOptions {
  int max_draws = 1000;      // thinning target when using the whole posterior
  bool map_only = false;     // evaluate only the best-scoring stored sample
  double noise_std = 0.0;    // observation noise folded into the spread
  int pce_degree = -1;       // <0: reuse the calibration setting
  int quad_order = -1;       // <0: reuse the calibration setting
  std::uint64_t seed = 1;    // stream for predictive realizations
};

struct PushForwardResult {
  Eigen::MatrixXd mu;                   // draws x outputs, surrogate mean
  Eigen::MatrixXd sigma;                // draws x outputs, total spread
  Eigen::MatrixXd draw;                 // draws x outputs, y* ~ N(mu, sigma)
  std::vector<Eigen::Index> rows;       // flat chain rows behind each draw
};

// Push posterior samples through a prediction model sharing the calibration
// parameterization.  `qoi_model` must take problem.model_dim() inputs; the
// embedded-parameter germ structure of the calibration is reused, so each
// posterior draw yields a mean and spread per output.
PushForwardResult push_forward(const InferenceProblem& problem, const ForwardModel& qoi_model,
                               const EnsembleChain& chain, const PushForwardOptions& opts);

// Per-output z-scores of every draw against reference values (size = outputs).
Eigen::MatrixXd z_scores(const PushForwardResult& result, const Eigen::VectorXd& reference);

// Scalar reduction of a series-valued push-forward: trapezoid-integrate the
// mean and the spread band over `times`, then score against a reference
// integral.  Integrating the spread treats the band as enveloping whole
// trajectories rather than pointwise-independent errors.
struct IntegratedSeriesQoi {
  Eigen::VectorXd mu;     // per draw
  Eigen::VectorXd sigma;  // per draw
  Eigen::VectorXd z;      // per draw, vs. the reference integral
};

IntegratedSeriesQoi integrate_series_qoi(const PushForwardResult& result,
                                         const Eigen::VectorXd& times, double reference);

// Simple sample statistics used in scan/QoI summaries.
double sample_mean(const Eigen::VectorXd& v);
double sample_std(const Eigen::VectorXd& v);
// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double sample_quantile(const Eigen::VectorXd& v, double q);
// Fraction of entries strictly below `limit`.
double fraction_below(const Eigen::VectorXd& v, double limit);

}  // namespace embcal
