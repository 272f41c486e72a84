#pragma once

namespace embcal {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

// Chi-squared CDF with k degrees of freedom.
double chi_squared_cdf(double x, double k);

// Inverse chi-squared CDF by bisection on the CDF, tolerance 1e-10.
double chi_squared_quantile(double prob, double k);

}  // namespace embcal
