#pragma once

#include <Eigen/Core>

namespace embcal {

// Integrated autocorrelation time of an ensemble series (iterations x
// walkers), Sokal-windowed: per-walker normalized autocorrelations are
// averaged, tau(W) = 1 + 2*sum_{t<=W} rho(t), and the window is the
// smallest W with W >= c*tau(W). Clamped below at 1. Throws when any
// walker column has zero variance.
double integrated_autocorrelation_time(const Eigen::MatrixXd& series, double c = 5.0);

}  // namespace embcal
