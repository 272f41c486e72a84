#include "embcal/qoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "embcal/pce.hpp"
#include "embcal/rng.hpp"

namespace embcal {
namespace {

constexpr std::uint64_t kPushForwardStream = 0x71f09d5u;

double trapezoid(const Eigen::VectorXd& values, const Eigen::VectorXd& times) {
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < times.size(); ++i)
    total += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
  return total;
}

}  // namespace

std::vector<Eigen::Index> thin_indices(Eigen::Index total, Eigen::Index want) {
  if (total <= 0) throw std::invalid_argument("thin_indices: empty range");
  if (want <= 0) throw std::invalid_argument("thin_indices: must keep at least one index");
  std::vector<Eigen::Index> out;
  if (total <= want) {
    out.resize(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
  }
  out.reserve(static_cast<std::size_t>(want));
  if (want == 1) {
    out.push_back(total - 1);
    return out;
  }
  const double stride = static_cast<double>(total - 1) / static_cast<double>(want - 1);
  Eigen::Index prev = -1;
  for (Eigen::Index i = 0; i < want; ++i) {
    Eigen::Index idx = static_cast<Eigen::Index>(std::llround(i * stride));
    idx = std::min(idx, total - 1);
    if (idx <= prev) idx = prev + 1;  // strictly increasing even under rounding
    out.push_back(idx);
    prev = idx;
  }
  return out;
}

double z_value(double mu, double sigma, double y) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("z_value: spread must be >= 0");
  const double gap = std::abs(mu - y);
  if (sigma == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return gap / sigma;
}

PushForwardResult push_forward(const InferenceProblem& problem, const ForwardModel& qoi_model,
                               const EnsembleChain& chain, const PushForwardOptions& opts) {
  if (qoi_model.input_dim() != problem.model_dim())
    throw std::invalid_argument("push_forward: prediction model arity mismatch");
  if (chain.iterations <= chain.burn_in)
    throw std::invalid_argument("push_forward: chain has no post-warmup samples");
  if (opts.noise_std < 0.0) throw std::invalid_argument("push_forward: negative noise level");

  const int degree = opts.pce_degree > 0 ? opts.pce_degree : problem.pce_degree;
  const int order = opts.quad_order > 0 ? opts.quad_order : problem.quad_order;
  const HermiteBasis basis = build_basis(problem.model_dim(), degree);
  const QuadratureRule quad = build_quadrature(problem.model_dim(), order);

  PushForwardResult result;
  if (opts.map_only) {
    result.rows.push_back(chain.map_row());
  } else {
    const Eigen::Index first = static_cast<Eigen::Index>(chain.burn_in) * chain.walkers;
    const Eigen::Index total = static_cast<Eigen::Index>(chain.iterations) * chain.walkers - first;
    result.rows = thin_indices(total, opts.max_draws);
    for (auto& r : result.rows) r += first;
  }

  const Eigen::Index n_draws = static_cast<Eigen::Index>(result.rows.size());
  const Eigen::Index n_out = qoi_model.output_dim();
  result.mu.resize(n_draws, n_out);
  result.sigma.resize(n_draws, n_out);
  result.draw.resize(n_draws, n_out);

  CounterRng rng(opts.seed, kPushForwardStream);
  Eigen::VectorXd means, scales, mu, sigma;
  for (Eigen::Index d = 0; d < n_draws; ++d) {
    const Eigen::VectorXd sample = chain.samples.row(result.rows[static_cast<std::size_t>(d)]);
    model_inputs(problem, sample, means, scales);
    const StochasticResponse resp = project(qoi_model, means, scales, basis, quad);
    moments(resp, mu, sigma);
    for (Eigen::Index j = 0; j < n_out; ++j) {
      const double total_sd = std::hypot(sigma[j], opts.noise_std);
      result.mu(d, j) = mu[j];
      result.sigma(d, j) = total_sd;
      result.draw(d, j) = rng.normal(mu[j], total_sd);
    }
  }
  return result;
}

Eigen::MatrixXd z_scores(const PushForwardResult& result, const Eigen::VectorXd& reference) {
  if (reference.size() != result.mu.cols())
    throw std::invalid_argument("z_scores: reference length mismatch");
  Eigen::MatrixXd z(result.mu.rows(), result.mu.cols());
  for (Eigen::Index d = 0; d < z.rows(); ++d)
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      z(d, j) = z_value(result.mu(d, j), result.sigma(d, j), reference[j]);
  return z;
}

IntegratedSeriesQoi integrate_series_qoi(const PushForwardResult& result,
                                         const Eigen::VectorXd& times, double reference) {
  if (times.size() != result.mu.cols())
    throw std::invalid_argument("integrate_series_qoi: time grid length mismatch");
  if (times.size() < 2)
    throw std::invalid_argument("integrate_series_qoi: need at least two time points");
  IntegratedSeriesQoi out;
  const Eigen::Index n = result.mu.rows();
  out.mu.resize(n);
  out.sigma.resize(n);
  out.z.resize(n);
  for (Eigen::Index d = 0; d < n; ++d) {
    out.mu[d] = trapezoid(result.mu.row(d), times);
    out.sigma[d] = trapezoid(result.sigma.row(d), times);
    out.z[d] = z_value(out.mu[d], out.sigma[d], reference);
  }
  return out;
}

double sample_mean(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw std::invalid_argument("sample_mean: empty sample");
  return v.mean();
}

double sample_std(const Eigen::VectorXd& v) {
  if (v.size() < 2) throw std::invalid_argument("sample_std: need at least two values");
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

double sample_quantile(const Eigen::VectorXd& v, double q) {
  if (v.size() == 0) throw std::invalid_argument("sample_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("sample_quantile: q outside [0, 1]");
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

double fraction_below(const Eigen::VectorXd& v, double limit) {
  if (v.size() == 0) throw std::invalid_argument("fraction_below: empty sample");
  return static_cast<double>((v.array() < limit).count()) / static_cast<double>(v.size());
}

}  // namespace embcal
