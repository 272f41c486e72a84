#pragma once

#include <Eigen/Core>

#include "embcal/forward_model.hpp"

namespace embcal {

// Straight line through the origin evaluated on fixed design points:
// f_i(t) = t * x_i.
class LinearModel : public ForwardModel {
 public:
  explicit LinearModel(Eigen::VectorXd x) : x_(std::move(x)) {}

  int input_dim() const override { return 1; }
  int output_dim() const override { return static_cast<int>(x_.size()); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const override;

  const Eigen::VectorXd& design() const { return x_; }

 private:
  Eigen::VectorXd x_;
};

// Closed-form response moments of the embedded slope: mu = t*x,
// sigma = scale*|x|. Requires scale >= 0.
void linear_eval(double t, double scale, const Eigen::VectorXd& x, Eigen::VectorXd& mu,
                 Eigen::VectorXd& sigma);

// Equidistant design points on [lo, hi], endpoints included.
Eigen::VectorXd linspace(double lo, double hi, int n);

}  // namespace embcal
