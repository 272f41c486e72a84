#pragma once

#include <stdexcept>

#include "embcal/rng.hpp"

namespace embcal {

// One-dimensional prior. log_pdf is -inf outside the support.
struct Distribution1D {
  enum class Kind { Normal, LogNormal, Uniform };

  Kind kind;
  double a;  // mean | log-mean | lower bound
  double b;  // std  | log-std  | upper bound

  static Distribution1D normal(double mean, double std);
  static Distribution1D lognormal(double log_mean, double log_std);
  static Distribution1D uniform(double low, double high);

  double log_pdf(double x) const;
  double sample(CounterRng& rng) const;

  // True when the support is contained in (0, inf).
  bool positive_support() const;
};

}  // namespace embcal
