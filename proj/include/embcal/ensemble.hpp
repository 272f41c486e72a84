#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "embcal/distributions.hpp"
#include "embcal/rng.hpp"

namespace embcal {

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct SamplerConfig {
  int walkers = 10;
  double stretch = 2.0;  // stretch-move scale a; z ~ 1/sqrt(z) on [1/a, a]
  int burn_in = 200;     // iterations excluded from ESS and summaries
  int batch = 100;       // iterations between convergence checks
  long max_iterations = 10000;  // total iteration cap, including burn-in
  double ess_target = 0.0;      // 0: derive from (dim, ess_alpha, ess_precision)
  double ess_alpha = 0.05;
  double ess_precision = 0.15;
  std::uint64_t seed = 1;
};

// Full sampling history. Row r of `samples` is walker (r % walkers) at
// iteration (r / walkers); iteration 0 is the initial ensemble.
struct EnsembleChain {
  long iterations = 0;
  int walkers = 0;
  int dim = 0;
  int burn_in = 0;
  Eigen::MatrixXd samples;        // (iterations * walkers) x dim
  Eigen::VectorXd log_density;    // one entry per row of samples
  Eigen::VectorXd ess;            // per parameter, post-burn-in
  bool converged = false;
  double acceptance_rate = 0.0;   // over all proposals
  std::vector<std::string> names; // optional parameter names

  long post_burn_iterations() const { return iterations - burn_in; }

  // Post-burn-in series of one parameter, iterations x walkers.
  Eigen::MatrixXd parameter_series(int param) const;

  // Flattened post-burn-in samples, rows = draws.
  Eigen::MatrixXd flat_samples() const;

  Eigen::VectorXd posterior_mean() const;
  Eigen::VectorXd posterior_std() const;

  // Row index / sample with the highest stored log density (whole history).
  Eigen::Index map_row() const;
  Eigen::VectorXd map_sample() const;
};

// Minimum effective sample size for estimating a p-dimensional mean to
// relative precision `precision` at confidence 1 - alpha.
double ess_threshold(int p, double alpha, double precision);

// Affine-invariant ensemble sampler, stretch moves over complementary
// halves. Walkers start from `init` draws (redrawn until the density is
// finite, at most 100 attempts each). Runs in batches until every
// parameter's ESS reaches the target or max_iterations is hit.
EnsembleChain run_ensemble(const LogDensity& log_density,
                           const std::vector<Distribution1D>& init,
                           const SamplerConfig& config);

// iteration,walker,<params...>,log_density rows.
void save_chain_csv(const EnsembleChain& chain, const std::string& path);

// Little-endian binary dump: four u64 (iterations, walkers, dim, burn_in)
// then iterations*walkers records of dim+1 f64 (parameters, log density).
void save_chain_binary(const EnsembleChain& chain, const std::string& path);
EnsembleChain load_chain_binary(const std::string& path);

}  // namespace embcal
