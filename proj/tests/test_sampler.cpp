#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "embcal/autocorr.hpp"
#include "embcal/ensemble.hpp"
#include "embcal/rng.hpp"
#include "embcal/special.hpp"

using namespace embcal;

namespace {

std::vector<Distribution1D> standard_normal_init(int dim) {
  return std::vector<Distribution1D>(dim, Distribution1D::normal(0.0, 1.0));
}

double max_abs_ks_against_standard_normal(const Eigen::VectorXd& samples) {
  std::vector<double> v(samples.data(), samples.data() + samples.size());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-v[i] / std::sqrt(2.0));
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
  }
  return d;
}

}  // namespace

TEST_CASE("ess threshold closed form") {
  // p=2: the shell factor collapses to pi, so the threshold is
  // pi * chi2_quantile(0.95, 2) / precision^2.
  CHECK(ess_threshold(2, 0.05, 0.15) == doctest::Approx(836.5662669083612).epsilon(1e-10));
  CHECK(ess_threshold(2, 0.05, 0.15) > 836.0);
  CHECK(ess_threshold(2, 0.05, 0.15) < 838.0);
  CHECK(ess_threshold(2, 0.05, 1.0) == doctest::Approx(18.822741005438125).epsilon(1e-10));
  // p=1: shell = 4*pi/Gamma(1/2)^2 = 4.
  CHECK(ess_threshold(1, 0.05, 0.1) == doctest::Approx(1536.5835282776497).epsilon(1e-10));
  CHECK(ess_threshold(1, 0.05, 0.1) ==
        doctest::Approx(4.0 * chi_squared_quantile(0.95, 1.0) / 0.01).epsilon(1e-12));

  CHECK_THROWS_AS(ess_threshold(0, 0.05, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ess_threshold(2, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ess_threshold(2, 0.05, 0.0), std::invalid_argument);
}

TEST_CASE("autocorrelation time of white noise is near one") {
  CounterRng rng(100);
  Eigen::MatrixXd series(100000, 4);
  for (Eigen::Index i = 0; i < series.rows(); ++i)
    for (Eigen::Index w = 0; w < series.cols(); ++w) series(i, w) = rng.normal();
  const double tau = integrated_autocorrelation_time(series);
  CHECK(tau == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("autocorrelation time of an AR(1) process matches the analytic value") {
  // rho(t) = phi^t gives tau = (1 + phi) / (1 - phi) = 19 for phi = 0.9.
  const double phi = 0.9;
  CounterRng rng(7);
  const Eigen::Index n = 1000000;
  Eigen::MatrixXd series(n, 1);
  double x = 0.0;
  const double innovation = std::sqrt(1.0 - phi * phi);
  for (Eigen::Index i = 0; i < n; ++i) {
    x = phi * x + innovation * rng.normal();
    series(i, 0) = x;
  }
  const double tau = integrated_autocorrelation_time(series);
  CHECK(tau == doctest::Approx(19.0).epsilon(0.2));
}

TEST_CASE("autocorrelation time clamps antithetic series at one") {
  Eigen::MatrixXd series(1000, 1);
  for (Eigen::Index i = 0; i < series.rows(); ++i) series(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(integrated_autocorrelation_time(series) == 1.0);
}

TEST_CASE("autocorrelation time rejects constant or empty series") {
  CHECK_THROWS_AS(integrated_autocorrelation_time(Eigen::MatrixXd::Ones(100, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrated_autocorrelation_time(Eigen::MatrixXd::Zero(1, 1)),
                  std::invalid_argument);
}

TEST_CASE("flat targets accept every one-dimensional proposal") {
  SamplerConfig cfg;
  cfg.walkers = 8;
  cfg.burn_in = 0;
  cfg.max_iterations = 50;
  cfg.ess_target = 1e12;  // never reached; run to the cap
  const EnsembleChain chain =
      run_ensemble([](const Eigen::VectorXd&) { return 0.0; }, standard_normal_init(1), cfg);
  CHECK(chain.iterations == 50);
  CHECK(chain.acceptance_rate == 1.0);
  CHECK_FALSE(chain.converged);
}

TEST_CASE("flat targets in two dimensions accept at the stretch-kernel rate") {
  // Acceptance probability is E[min(1, z)] with z = ((1+u)^2)/2, u~U(0,1),
  // which evaluates to about 0.8905.
  SamplerConfig cfg;
  cfg.walkers = 32;
  cfg.burn_in = 0;
  cfg.max_iterations = 200;
  cfg.ess_target = 1e12;
  const EnsembleChain chain =
      run_ensemble([](const Eigen::VectorXd&) { return 0.0; }, standard_normal_init(2), cfg);
  CHECK(chain.acceptance_rate > 0.85);
  CHECK(chain.acceptance_rate < 0.93);
}

TEST_CASE("two-dimensional gaussian target is sampled correctly") {
  SamplerConfig cfg;
  cfg.walkers = 32;
  cfg.burn_in = 500;
  cfg.batch = 500;
  cfg.max_iterations = 4000;
  cfg.ess_target = 1e12;  // run the full budget
  cfg.seed = 3;
  const LogDensity target = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
  const EnsembleChain chain = run_ensemble(target, standard_normal_init(2), cfg);
  REQUIRE(chain.iterations == 4000);

  const Eigen::MatrixXd flat = chain.flat_samples();
  const double n_eff = chain.ess.minCoeff();
  REQUIRE(n_eff > 1000.0);
  const double se_mean = 3.0 / std::sqrt(n_eff);
  const Eigen::VectorXd mean = chain.posterior_mean();
  CHECK(std::abs(mean[0]) < se_mean);
  CHECK(std::abs(mean[1]) < se_mean);

  const Eigen::MatrixXd centered = flat.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(flat.rows() - 1);
  CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::abs(cov(0, 1)) < 0.1);

  // Long-run marginals match the analytic distribution.
  CHECK(max_abs_ks_against_standard_normal(flat.col(0)) < 0.02);
  CHECK(max_abs_ks_against_standard_normal(flat.col(1)) < 0.02);
}

TEST_CASE("identical seed and config give bit-identical chains") {
  SamplerConfig cfg;
  cfg.walkers = 10;
  cfg.burn_in = 50;
  cfg.max_iterations = 300;
  cfg.seed = 42;
  const LogDensity target = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
  const EnsembleChain a = run_ensemble(target, standard_normal_init(2), cfg);
  const EnsembleChain b = run_ensemble(target, standard_normal_init(2), cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.converged == b.converged);
  CHECK(a.acceptance_rate == b.acceptance_rate);
  CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.log_density - b.log_density).cwiseAbs().maxCoeff() == 0.0);

  SamplerConfig other = cfg;
  other.seed = 43;
  const EnsembleChain c = run_ensemble(target, standard_normal_init(2), other);
  CHECK((a.samples - c.samples).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("ess stopping rule halts well before the iteration cap") {
  SamplerConfig cfg;
  cfg.walkers = 16;
  cfg.burn_in = 200;
  cfg.batch = 100;
  cfg.max_iterations = 10000;
  cfg.seed = 11;
  // Default target for dim=2 is the 836.57 threshold.
  const LogDensity target = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
  const EnsembleChain chain = run_ensemble(target, standard_normal_init(2), cfg);
  CHECK(chain.converged);
  CHECK(chain.iterations < 10000);
  CHECK(chain.ess.minCoeff() >= ess_threshold(2, cfg.ess_alpha, cfg.ess_precision));
}

TEST_CASE("zero iteration budget returns the initial ensemble unconverged") {
  SamplerConfig cfg;
  cfg.walkers = 8;
  cfg.burn_in = 200;
  cfg.max_iterations = 0;
  const EnsembleChain chain = run_ensemble(
      [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); },
      standard_normal_init(1), cfg);
  CHECK(chain.iterations == 1);
  CHECK_FALSE(chain.converged);
  CHECK(chain.flat_samples().rows() == 8);
}

TEST_CASE("walkers that cannot find finite density fail initialization") {
  SamplerConfig cfg;
  cfg.walkers = 4;
  const LogDensity impossible = [](const Eigen::VectorXd&) {
    return -std::numeric_limits<double>::infinity();
  };
  CHECK_THROWS_WITH_AS(run_ensemble(impossible, standard_normal_init(1), cfg),
                       doctest::Contains("no finite-density start"), std::runtime_error);
}

TEST_CASE("an ensemble with no accepted move in a batch aborts") {
  SamplerConfig cfg;
  cfg.walkers = 6;
  cfg.batch = 20;
  cfg.max_iterations = 100;
  // Finite density for the six initialization calls, impossible afterwards:
  // every proposal is rejected and the batch triggers the stuck diagnostic.
  int calls = 0;
  const LogDensity trap = [&calls](const Eigen::VectorXd&) {
    return ++calls <= 6 ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  CHECK_THROWS_WITH_AS(run_ensemble(trap, standard_normal_init(1), cfg),
                       doctest::Contains("stuck"), std::runtime_error);
}

TEST_CASE("sampler configuration is validated") {
  const LogDensity target = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
  SamplerConfig cfg;
  cfg.walkers = 3;  // below 2*dim for dim=2
  CHECK_THROWS_AS(run_ensemble(target, standard_normal_init(2), cfg), std::invalid_argument);
  cfg = SamplerConfig{};
  cfg.stretch = 1.0;
  CHECK_THROWS_AS(run_ensemble(target, standard_normal_init(1), cfg), std::invalid_argument);
  cfg = SamplerConfig{};
  cfg.batch = 0;
  CHECK_THROWS_AS(run_ensemble(target, standard_normal_init(1), cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(target, {}, SamplerConfig{}), std::invalid_argument);
}

TEST_CASE("chain accessors slice the history consistently") {
  SamplerConfig cfg;
  cfg.walkers = 6;
  cfg.burn_in = 10;
  cfg.max_iterations = 40;
  cfg.ess_target = 1e12;
  cfg.seed = 5;
  const EnsembleChain chain = run_ensemble(
      [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); },
      standard_normal_init(2), cfg);
  REQUIRE(chain.iterations == 40);
  CHECK(chain.post_burn_iterations() == 30);
  CHECK(chain.flat_samples().rows() == 30 * 6);
  const Eigen::MatrixXd series = chain.parameter_series(1);
  CHECK(series.rows() == 30);
  CHECK(series.cols() == 6);
  // Series entries come from the matching flat rows.
  CHECK(series(0, 3) == chain.samples(10 * 6 + 3, 1));

  const Eigen::Index best = chain.map_row();
  CHECK(chain.log_density[best] == chain.log_density.maxCoeff());
  CHECK((chain.map_sample() - chain.samples.row(best).transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binary chain files round-trip exactly") {
  SamplerConfig cfg;
  cfg.walkers = 6;
  cfg.burn_in = 5;
  cfg.max_iterations = 25;
  cfg.ess_target = 1e12;
  const EnsembleChain chain = run_ensemble(
      [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); },
      standard_normal_init(2), cfg);
  const std::string path = "test_chain_roundtrip.bin";
  save_chain_binary(chain, path);
  const EnsembleChain loaded = load_chain_binary(path);
  CHECK(loaded.iterations == chain.iterations);
  CHECK(loaded.walkers == chain.walkers);
  CHECK(loaded.dim == chain.dim);
  CHECK(loaded.burn_in == chain.burn_in);
  CHECK((loaded.samples - chain.samples).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.log_density - chain.log_density).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_chain_binary("does_not_exist.bin"), std::runtime_error);
}
