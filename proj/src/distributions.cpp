#include "embcal/distributions.hpp"

#include <cmath>
#include <limits>

namespace embcal {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;  // log(sqrt(2*pi))
}

Distribution1D Distribution1D::normal(double mean, double std) {
  if (!(std > 0.0)) throw std::invalid_argument("normal: std must be positive");
  return {Kind::Normal, mean, std};
}

Distribution1D Distribution1D::lognormal(double log_mean, double log_std) {
  if (!(log_std > 0.0)) throw std::invalid_argument("lognormal: log_std must be positive");
  return {Kind::LogNormal, log_mean, log_std};
}

Distribution1D Distribution1D::uniform(double low, double high) {
  if (!(low < high)) throw std::invalid_argument("uniform: low must be below high");
  return {Kind::Uniform, low, high};
}

double Distribution1D::log_pdf(double x) const {
  switch (kind) {
    case Kind::Normal: {
      const double z = (x - a) / b;
      return -0.5 * z * z - std::log(b) - kLogSqrt2Pi;
    }
    case Kind::LogNormal: {
      if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
      const double lx = std::log(x);
      const double z = (lx - a) / b;
      return -0.5 * z * z - lx - std::log(b) - kLogSqrt2Pi;
    }
    case Kind::Uniform:
      if (x < a || x > b) return -std::numeric_limits<double>::infinity();
      return -std::log(b - a);
  }
  throw std::logic_error("unreachable");
}

double Distribution1D::sample(CounterRng& rng) const {
  switch (kind) {
    case Kind::Normal:
      return rng.normal(a, b);
    case Kind::LogNormal:
      return std::exp(rng.normal(a, b));
    case Kind::Uniform:
      return rng.uniform(a, b);
  }
  throw std::logic_error("unreachable");
}

bool Distribution1D::positive_support() const {
  switch (kind) {
    case Kind::Normal:
      return false;
    case Kind::LogNormal:
      return true;
    case Kind::Uniform:
      return a >= 0.0;
  }
  return false;
}

}  // namespace embcal
