#include "embcal/problem.hpp"

#include <limits>
#include <stdexcept>

namespace embcal {

const char* to_string(LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::Abc:
      return "abc";
    case LikelihoodKind::IndependentNormal:
      return "in";
    case LikelihoodKind::GlobalMoments:
      return "gmm";
    case LikelihoodKind::RelativeMoments:
      return "rgmm";
  }
  throw std::logic_error("unreachable");
}

LikelihoodKind likelihood_kind_from_string(const std::string& s) {
  if (s == "abc") return LikelihoodKind::Abc;
  if (s == "in" || s == "independent-normal") return LikelihoodKind::IndependentNormal;
  if (s == "gmm" || s == "global-moments") return LikelihoodKind::GlobalMoments;
  if (s == "rgmm" || s == "relative-moments") return LikelihoodKind::RelativeMoments;
  throw std::invalid_argument("unknown likelihood kind: " + s);
}

std::vector<std::string> InferenceProblem::sample_names() const {
  std::vector<std::string> names;
  names.reserve(sample_dim());
  for (const auto& p : embedded) {
    names.push_back(p.name);
    names.push_back(p.name + "_scale");
  }
  for (const auto& p : plain) names.push_back(p.name);
  return names;
}

std::vector<Distribution1D> InferenceProblem::sample_priors() const {
  std::vector<Distribution1D> priors;
  priors.reserve(sample_dim());
  for (const auto& p : embedded) {
    priors.push_back(p.mean_prior);
    priors.push_back(p.scale_prior);
  }
  for (const auto& p : plain) priors.push_back(p.prior);
  return priors;
}

void InferenceProblem::validate() const {
  if (embedded.empty() && plain.empty()) throw std::invalid_argument("problem: no parameters");
  for (const auto& p : embedded) {
    if (!p.scale_prior.positive_support())
      throw std::invalid_argument("problem: scale prior of '" + p.name +
                                  "' must have positive support");
  }
  if (!model) throw std::invalid_argument("problem: forward model not set");
  if (model->input_dim() != model_dim())
    throw std::invalid_argument("problem: model input dim does not match parameter count");
  if (observations.y.size() > 0 && model->output_dim() != observations.y.size())
    throw std::invalid_argument("problem: model output dim does not match observation count");
  if (pce_degree < 0) throw std::invalid_argument("problem: pce_degree must be >= 0");
  if (quad_order < 1) throw std::invalid_argument("problem: quad_order must be >= 1");
  if (likelihood.kind == LikelihoodKind::Abc) {
    if (!(likelihood.epsilon > 0.0)) throw std::invalid_argument("problem: epsilon must be > 0");
    if (!(likelihood.gamma > 0.0)) throw std::invalid_argument("problem: gamma must be > 0");
  }
}

void split_sample(const InferenceProblem& problem, const Eigen::VectorXd& sample,
                  Eigen::VectorXd& means, Eigen::VectorXd& scales) {
  if (sample.size() != problem.sample_dim())
    throw std::invalid_argument("split_sample: wrong sample length");
  const auto n = static_cast<Eigen::Index>(problem.embedded.size());
  means.resize(n);
  scales.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    means[i] = sample[2 * i];
    scales[i] = sample[2 * i + 1];
  }
}

void model_inputs(const InferenceProblem& problem, const Eigen::VectorXd& sample,
                  Eigen::VectorXd& means, Eigen::VectorXd& scales) {
  if (sample.size() != problem.sample_dim())
    throw std::invalid_argument("model_inputs: wrong sample length");
  const auto ne = static_cast<Eigen::Index>(problem.embedded.size());
  const auto np = static_cast<Eigen::Index>(problem.plain.size());
  means.resize(ne + np);
  scales.setZero(ne + np);
  for (Eigen::Index i = 0; i < ne; ++i) {
    means[i] = sample[2 * i];
    scales[i] = sample[2 * i + 1];
  }
  for (Eigen::Index i = 0; i < np; ++i) means[ne + i] = sample[2 * ne + i];
}

double log_prior(const InferenceProblem& problem, const Eigen::VectorXd& sample) {
  if (sample.size() != problem.sample_dim())
    throw std::invalid_argument("log_prior: wrong sample length");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  Eigen::Index k = 0;
  for (const auto& p : problem.embedded) {
    const double m = sample[k++];
    const double b = sample[k++];
    if (!(b > 0.0)) return neg_inf;  // embedding requires a positive std
    total += p.mean_prior.log_pdf(m) + p.scale_prior.log_pdf(b);
  }
  for (const auto& p : problem.plain) total += p.prior.log_pdf(sample[k++]);
  return std::isnan(total) ? neg_inf : total;
}

}  // namespace embcal
