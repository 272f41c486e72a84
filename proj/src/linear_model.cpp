#include "embcal/linear_model.hpp"

#include <stdexcept>

namespace embcal {

Eigen::VectorXd LinearModel::evaluate(const Eigen::VectorXd& theta) const {
  if (theta.size() != 1) throw std::invalid_argument("LinearModel: expects one parameter");
  return theta[0] * x_;
}

void linear_eval(double t, double scale, const Eigen::VectorXd& x, Eigen::VectorXd& mu,
                 Eigen::VectorXd& sigma) {
  if (scale < 0.0) throw std::invalid_argument("linear_eval: scale must be >= 0");
  mu = t * x;
  sigma = scale * x.cwiseAbs();
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least two points");
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

}  // namespace embcal
