#include "embcal/autocorr.hpp"

#include <algorithm>
#include <stdexcept>

namespace embcal {

double integrated_autocorrelation_time(const Eigen::MatrixXd& series, double c) {
  const Eigen::Index n = series.rows();
  const Eigen::Index m = series.cols();
  if (n < 2 || m < 1) throw std::invalid_argument("autocorr: series too short");
  if (!(c > 0.0)) throw std::invalid_argument("autocorr: c must be positive");

  Eigen::MatrixXd f = series;
  Eigen::VectorXd norm(m);
  for (Eigen::Index w = 0; w < m; ++w) {
    f.col(w).array() -= f.col(w).mean();
    norm[w] = f.col(w).squaredNorm();
    if (!(norm[w] > 0.0)) throw std::invalid_argument("autocorr: constant walker series");
  }

  double tau = 1.0;
  for (Eigen::Index t = 1; t < n; ++t) {
    double rho = 0.0;
    for (Eigen::Index w = 0; w < m; ++w)
      rho += f.col(w).head(n - t).dot(f.col(w).tail(n - t)) / norm[w];
    rho /= double(m);
    tau += 2.0 * rho;
    if (double(t) >= c * tau) break;  // Sokal window reached
  }
  return std::max(tau, 1.0);
}

}  // namespace embcal
