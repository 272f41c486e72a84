#pragma once

#include <Eigen/Core>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "embcal/distributions.hpp"
#include "embcal/forward_model.hpp"

namespace embcal {

// gamma default for the ABC likelihood: with this value the spread target
// gamma*E|u| equals the standard deviation of a centred normal residual.
inline double default_abc_gamma() { return std::sqrt(3.141592653589793238462643 / 2.0); }

// Latent pair (theta_m, theta_b): a model parameter and the standard
// deviation of the zero-mean perturbation embedded in it.
struct EmbeddedParameter {
  std::string name;
  Distribution1D mean_prior;
  Distribution1D scale_prior;  // support must lie in (0, inf)
};

// Parameter passed to the model as-is, no embedded perturbation.
struct PlainParameter {
  std::string name;
  Distribution1D prior;
};

struct ObservationSet {
  Eigen::VectorXd x;  // input coordinate per observation (model-defined units)
  Eigen::VectorXd y;
  Eigen::VectorXi sensor;  // optional sensor id per observation; empty if unused
  double noise_std = 0.0;  // prescribed measurement noise, never estimated
};

enum class LikelihoodKind { Abc, IndependentNormal, GlobalMoments, RelativeMoments };

const char* to_string(LikelihoodKind kind);
LikelihoodKind likelihood_kind_from_string(const std::string& s);

struct LikelihoodSpec {
  LikelihoodKind kind = LikelihoodKind::IndependentNormal;
  double epsilon = 0.05;               // ABC tolerance, output units
  double gamma = default_abc_gamma();  // ABC spread-matching factor
  bool center_spread_at_mean = false;  // moment spreads about u_mean instead of 0
};

// Calibration setup: latent parameters (embedded pairs first, plain last),
// the forward model, observations, likelihood choice, and the PCE orders
// used to propagate the embedded perturbations.
//
// Sample vector layout: (m1, b1, m2, b2, ..., plain...).
struct InferenceProblem {
  std::vector<EmbeddedParameter> embedded;
  std::vector<PlainParameter> plain;
  std::shared_ptr<const ForwardModel> model;
  ObservationSet observations;
  LikelihoodSpec likelihood;
  int pce_degree = 1;
  int quad_order = 2;

  int sample_dim() const { return 2 * static_cast<int>(embedded.size()) + static_cast<int>(plain.size()); }
  int model_dim() const { return static_cast<int>(embedded.size() + plain.size()); }

  std::vector<std::string> sample_names() const;

  // Priors in sample layout order, used for walker seeding.
  std::vector<Distribution1D> sample_priors() const;

  // Throws if the setup is inconsistent (dims, prior supports, orders).
  void validate() const;
};

// Embedded components of a sample, in declaration order.
void split_sample(const InferenceProblem& problem, const Eigen::VectorXd& sample,
                  Eigen::VectorXd& means, Eigen::VectorXd& scales);

// Model input vector and matching germ scales: embedded entries contribute
// (theta_m, theta_b), plain entries (value, 0).
void model_inputs(const InferenceProblem& problem, const Eigen::VectorXd& sample,
                  Eigen::VectorXd& means, Eigen::VectorXd& scales);

// Sum of prior log densities; -inf when any theta_b <= 0 or any prior
// support is violated. Throws on dimension mismatch.
double log_prior(const InferenceProblem& problem, const Eigen::VectorXd& sample);

}  // namespace embcal
