#include "embcal/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "embcal/autocorr.hpp"
#include "embcal/special.hpp"

namespace embcal {

namespace {
constexpr double neg_inf() { return -std::numeric_limits<double>::infinity(); }
}

Eigen::MatrixXd EnsembleChain::parameter_series(int param) const {
  const long n = post_burn_iterations();
  Eigen::MatrixXd series(n, walkers);
  for (long i = 0; i < n; ++i)
    for (int w = 0; w < walkers; ++w)
      series(i, w) = samples((burn_in + i) * walkers + w, param);
  return series;
}

Eigen::MatrixXd EnsembleChain::flat_samples() const {
  return samples.bottomRows(post_burn_iterations() * walkers);
}

Eigen::VectorXd EnsembleChain::posterior_mean() const {
  return flat_samples().colwise().mean();
}

Eigen::VectorXd EnsembleChain::posterior_std() const {
  const Eigen::MatrixXd flat = flat_samples();
  const Eigen::RowVectorXd mean = flat.colwise().mean();
  return ((flat.rowwise() - mean).colwise().squaredNorm() / double(flat.rows() - 1))
      .cwiseSqrt()
      .transpose();
}

Eigen::Index EnsembleChain::map_row() const {
  Eigen::Index best = 0;
  log_density.maxCoeff(&best);
  return best;
}

Eigen::VectorXd EnsembleChain::map_sample() const {
  return samples.row(map_row()).transpose();
}

double ess_threshold(int p, double alpha, double precision) {
  if (p < 1) throw std::invalid_argument("ess_threshold: p must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("ess_threshold: alpha must be in (0, 1)");
  if (!(precision > 0.0)) throw std::invalid_argument("ess_threshold: precision must be > 0");
  const double pd = static_cast<double>(p);
  const double shell = std::pow(2.0, 2.0 / pd) * 3.141592653589793238462643 /
                       std::pow(pd * std::tgamma(0.5 * pd), 2.0 / pd);
  return shell * chi_squared_quantile(1.0 - alpha, pd) / (precision * precision);
}

namespace {

class EnsembleState {
 public:
  EnsembleState(const LogDensity& density, const SamplerConfig& cfg, int dim)
      : density_(density),
        cfg_(cfg),
        dim_(dim),
        rng_(cfg.seed, 0x5a6d706c65724e47ULL),
        positions_(cfg.walkers, dim),
        log_density_(cfg.walkers) {}

  void initialize(const std::vector<Distribution1D>& init) {
    for (int w = 0; w < cfg_.walkers; ++w) {
      bool ok = false;
      for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        for (int d = 0; d < dim_; ++d) positions_(w, d) = init[d].sample(rng_);
        log_density_[w] = density_(positions_.row(w).transpose());
        ok = std::isfinite(log_density_[w]);
      }
      if (!ok)
        throw std::runtime_error("run_ensemble: walker " + std::to_string(w) +
                                 " found no finite-density start in 100 prior draws");
    }
  }

  // One sweep: update each half with companions drawn from the other,
  // frozen half first so moves within a sweep stay valid.
  long sweep() {
    if (!log_density_.array().isFinite().any())
      throw std::runtime_error("run_ensemble: no walker has finite density");
    long accepted = 0;
    const int split = cfg_.walkers / 2;
    accepted += update_range(0, split, split, cfg_.walkers);
    accepted += update_range(split, cfg_.walkers, 0, split);
    return accepted;
  }

  const Eigen::MatrixXd& positions() const { return positions_; }
  const Eigen::VectorXd& current_log_density() const { return log_density_; }

 private:
  long update_range(int begin, int end, int other_begin, int other_end) {
    long accepted = 0;
    const double a = cfg_.stretch;
    for (int w = begin; w < end; ++w) {
      const int other = other_begin +
          static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(other_end - other_begin)));
      // z ~ g(z) proportional to 1/sqrt(z) on [1/a, a], by inverse CDF.
      const double u = rng_.uniform();
      const double t = (a - 1.0) * u + 1.0;
      const double z = t * t / a;
      const Eigen::VectorXd proposal =
          (positions_.row(other) + z * (positions_.row(w) - positions_.row(other))).transpose();
      const double lp = density_(proposal);
      const double log_accept = (dim_ - 1) * std::log(z) + lp - log_density_[w];
      if (std::log(rng_.uniform()) < log_accept) {
        positions_.row(w) = proposal.transpose();
        log_density_[w] = lp;
        ++accepted;
      }
    }
    return accepted;
  }

  const LogDensity& density_;
  const SamplerConfig& cfg_;
  int dim_;
  CounterRng rng_;
  Eigen::MatrixXd positions_;
  Eigen::VectorXd log_density_;
};

void append_state(EnsembleChain& chain, const EnsembleState& state) {
  const long row = chain.iterations * chain.walkers;
  if (chain.samples.rows() < row + chain.walkers) {
    const long grown = std::max<long>(2 * chain.samples.rows(), row + chain.walkers);
    chain.samples.conservativeResize(grown, Eigen::NoChange);
    chain.log_density.conservativeResize(grown);
  }
  chain.samples.middleRows(row, chain.walkers) = state.positions();
  chain.log_density.segment(row, chain.walkers) = state.current_log_density();
  ++chain.iterations;
}

// ESS per parameter: post-burn-in iterations * walkers / tau.
bool update_ess(EnsembleChain& chain, double target) {
  const long n = chain.post_burn_iterations();
  if (n < 2) return false;
  bool all_above = true;
  for (int d = 0; d < chain.dim; ++d) {
    double tau;
    try {
      tau = integrated_autocorrelation_time(chain.parameter_series(d));
    } catch (const std::invalid_argument&) {
      tau = double(n);  // degenerate series: no usable ESS yet
    }
    chain.ess[d] = double(n) * chain.walkers / tau;
    all_above = all_above && chain.ess[d] >= target;
  }
  return all_above;
}

}  // namespace

EnsembleChain run_ensemble(const LogDensity& log_density,
                           const std::vector<Distribution1D>& init,
                           const SamplerConfig& cfg) {
  const int dim = static_cast<int>(init.size());
  if (dim < 1) throw std::invalid_argument("run_ensemble: empty init");
  if (cfg.walkers < std::max(2, 2 * dim))
    throw std::invalid_argument("run_ensemble: need at least max(2, 2*dim) walkers");
  if (!(cfg.stretch > 1.0)) throw std::invalid_argument("run_ensemble: stretch must exceed 1");
  if (cfg.burn_in < 0 || cfg.batch < 1) throw std::invalid_argument("run_ensemble: bad schedule");

  const double target =
      cfg.ess_target > 0.0 ? cfg.ess_target : ess_threshold(dim, cfg.ess_alpha, cfg.ess_precision);

  EnsembleChain chain;
  chain.walkers = cfg.walkers;
  chain.dim = dim;
  chain.burn_in = cfg.burn_in;
  chain.ess = Eigen::VectorXd::Zero(dim);
  chain.samples.resize(cfg.walkers * 64, dim);
  chain.log_density.resize(cfg.walkers * 64);

  EnsembleState state(log_density, cfg, dim);
  state.initialize(init);
  append_state(chain, state);

  long accepted = 0;
  long proposed = 0;
  while (chain.iterations < cfg.max_iterations && !chain.converged) {
    long batch_accepted = 0;
    const long steps = std::min<long>(cfg.batch, cfg.max_iterations - chain.iterations);
    for (long s = 0; s < steps; ++s) {
      batch_accepted += state.sweep();
      append_state(chain, state);
    }
    accepted += batch_accepted;
    proposed += steps * cfg.walkers;
    if (batch_accepted == 0)
      throw std::runtime_error("run_ensemble: ensemble stuck, no accepted move in a full batch");
    if (chain.iterations > cfg.burn_in) chain.converged = update_ess(chain, target);
  }

  chain.samples.conservativeResize(chain.iterations * chain.walkers, Eigen::NoChange);
  chain.log_density.conservativeResize(chain.iterations * chain.walkers);
  chain.acceptance_rate = proposed > 0 ? double(accepted) / double(proposed) : 0.0;
  if (chain.burn_in >= chain.iterations) chain.burn_in = 0;  // keep summaries defined
  return chain;
}

void save_chain_csv(const EnsembleChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iteration,walker";
  for (int d = 0; d < chain.dim; ++d)
    out << ',' << (d < static_cast<int>(chain.names.size()) ? chain.names[d]
                                                            : "p" + std::to_string(d));
  out << ",log_density\n";
  char buf[32];
  for (long i = 0; i < chain.iterations; ++i) {
    for (int w = 0; w < chain.walkers; ++w) {
      const long row = i * chain.walkers + w;
      out << i << ',' << w;
      for (int d = 0; d < chain.dim; ++d) {
        std::snprintf(buf, sizeof buf, "%.17g", chain.samples(row, d));
        out << ',' << buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g", chain.log_density[row]);
      out << ',' << buf << '\n';
    }
  }
}

void save_chain_binary(const EnsembleChain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::uint64_t header[4] = {static_cast<std::uint64_t>(chain.iterations),
                                   static_cast<std::uint64_t>(chain.walkers),
                                   static_cast<std::uint64_t>(chain.dim),
                                   static_cast<std::uint64_t>(chain.burn_in)};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (long row = 0; row < chain.iterations * chain.walkers; ++row) {
    for (int d = 0; d < chain.dim; ++d) {
      const double v = chain.samples(row, d);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    const double lp = chain.log_density[row];
    out.write(reinterpret_cast<const char*>(&lp), sizeof lp);
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

EnsembleChain load_chain_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t header[4] = {0, 0, 0, 0};
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in) throw std::runtime_error("truncated chain file " + path);
  EnsembleChain chain;
  chain.iterations = static_cast<long>(header[0]);
  chain.walkers = static_cast<int>(header[1]);
  chain.dim = static_cast<int>(header[2]);
  chain.burn_in = static_cast<int>(header[3]);
  if (chain.iterations < 1 || chain.walkers < 1 || chain.dim < 1 ||
      chain.burn_in >= chain.iterations)
    throw std::runtime_error("inconsistent chain header in " + path);
  const long rows = chain.iterations * chain.walkers;
  chain.samples.resize(rows, chain.dim);
  chain.log_density.resize(rows);
  for (long row = 0; row < rows; ++row) {
    for (int d = 0; d < chain.dim; ++d)
      in.read(reinterpret_cast<char*>(&chain.samples(row, d)), sizeof(double));
    in.read(reinterpret_cast<char*>(&chain.log_density[row]), sizeof(double));
  }
  if (!in) throw std::runtime_error("truncated chain file " + path);
  return chain;
}

}  // namespace embcal
