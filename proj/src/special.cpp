#include "embcal/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace embcal {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 3.0e-16;
constexpr double kTiny = 1.0e-300;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n <= kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("gamma_p: series did not converge");
}

// Continued fraction for Q(a, x) = 1 - P(a, x), modified Lentz.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("gamma_p: continued fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double chi_squared_cdf(double x, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("chi_squared_cdf: k must be positive");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * k, 0.5 * x);
}

double chi_squared_quantile(double prob, double k) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("chi_squared_quantile: prob must be in (0, 1)");
  if (!(k > 0.0)) throw std::invalid_argument("chi_squared_quantile: k must be positive");
  double lo = 0.0;
  double hi = k + 10.0;
  while (chi_squared_cdf(hi, k) < prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("chi_squared_quantile: bracket failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double c = chi_squared_cdf(mid, k);
    if (std::abs(c - prob) < 1e-10 && (hi - lo) < 1e-10 * (1.0 + mid)) return mid;
    (c < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace embcal
