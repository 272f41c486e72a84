#pragma once

#include <Eigen/Core>

#include "embcal/forward_model.hpp"

namespace embcal {

// Orthonormal probabilists' Hermite basis over independent standard normal
// germs, truncated at total degree `degree`. Multi-indices are stored by
// ascending total degree, lexicographic within a degree; row 0 is constant.
struct HermiteBasis {
  int dims = 0;
  int degree = 0;
  Eigen::MatrixXi index;  // size() x dims

  int size() const { return static_cast<int>(index.rows()); }

  // All basis values at one germ point.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& xi) const;
};

HermiteBasis build_basis(int dims, int degree);

// Full tensor Gauss-Hermite rule; weights absorb the Gaussian density and
// sum to 1. Node rows enumerate the tensor grid with germ 0 slowest.
struct QuadratureRule {
  Eigen::MatrixXd nodes;    // points() x dims
  Eigen::VectorXd weights;  // points()

  int points() const { return static_cast<int>(nodes.rows()); }
  int dims() const { return static_cast<int>(nodes.cols()); }
};

QuadratureRule build_quadrature(int dims, int order);

// Chaos coefficients of each model output; column 0 carries the mean.
struct StochasticResponse {
  Eigen::MatrixXd coeff;  // outputs x basis size
};

// Pseudo-spectral projection of model(theta) where theta = means + scales*xi
// componentwise. Scales must be non-negative; model evaluation failures are
// rethrown tagged with the quadrature node index (domain errors keep their
// type so callers can map them to zero likelihood).
StochasticResponse project(const ForwardModel& model, const Eigen::VectorXd& means,
                           const Eigen::VectorXd& scales, const HermiteBasis& basis,
                           const QuadratureRule& quad);

// Per-output mean and standard deviation implied by the coefficients.
void moments(const StochasticResponse& response, Eigen::VectorXd& mu, Eigen::VectorXd& sigma);

}  // namespace embcal
