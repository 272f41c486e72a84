#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace embcal {

// Raised when a parameter vector leaves the model's physical domain.
// Calibration treats it as zero likelihood rather than a hard failure.
struct ModelDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic map from a parameter vector to predicted observables.
// evaluate() must be pure: no internal state, safe to call repeatedly.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const = 0;
};

}  // namespace embcal
