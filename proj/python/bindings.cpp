#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>

#include "embcal/ensemble.hpp"
#include "embcal/experiments.hpp"
#include "embcal/likelihood.hpp"
#include "embcal/qoi.hpp"
#include "embcal/special.hpp"

namespace py = pybind11;
using namespace embcal;

namespace {

LinearDataSpec line_spec(int n_points, double x_lo, double x_hi, double slope_mean,
                         double slope_std, double noise_std, const std::string& variant,
                         double shift, std::uint64_t seed) {
  LinearDataSpec spec;
  spec.n_points = n_points;
  spec.x_lo = x_lo;
  spec.x_hi = x_hi;
  spec.slope_mean = slope_mean;
  spec.slope_std = slope_std;
  spec.noise_std = noise_std;
  if (variant == "plain")
    spec.variant = LinearDataSpec::Variant::Plain;
  else if (variant == "offset")
    spec.variant = LinearDataSpec::Variant::Offset;
  else if (variant == "outliers")
    spec.variant = LinearDataSpec::Variant::Outliers;
  else
    throw std::invalid_argument("variant must be plain, offset, or outliers");
  spec.shift = shift;
  spec.seed = seed;
  return spec;
}

py::dict chain_dict(const EnsembleChain& chain) {
  py::dict d;
  d["samples"] = chain.flat_samples();
  d["names"] = chain.names;
  d["mean"] = chain.posterior_mean();
  d["std"] = chain.posterior_std();
  d["ess"] = chain.ess;
  d["converged"] = chain.converged;
  d["iterations"] = chain.iterations;
  d["burn_in"] = chain.burn_in;
  d["walkers"] = chain.walkers;
  d["acceptance_rate"] = chain.acceptance_rate;
  d["map"] = chain.map_sample();
  return d;
}

}  // namespace

PYBIND11_MODULE(_embcal, m) {
  m.doc() = "Bayesian model calibration with embedded model-form uncertainty";

  m.def("ess_threshold", &ess_threshold, py::arg("p"), py::arg("alpha") = 0.05,
        py::arg("precision") = 0.15,
        "Effective-sample-size target for a p-dimensional posterior mean");

  m.def("z_value", &z_value, py::arg("mu"), py::arg("sigma"), py::arg("y"),
        "|mu - y| / sigma, the standardized prediction residual");

  m.def("chi_squared_quantile", &chi_squared_quantile, py::arg("p"), py::arg("dof"),
        "Inverse chi-squared CDF");

  m.def(
      "generate_line_data",
      [](int n_points, double x_lo, double x_hi, double slope_mean, double slope_std,
         double noise_std, const std::string& variant, double shift, std::uint64_t seed) {
        const ObservationSet obs = generate_linear(
            line_spec(n_points, x_lo, x_hi, slope_mean, slope_std, noise_std, variant, shift,
                      seed));
        return py::make_tuple(obs.x, obs.y);
      },
      py::arg("n_points") = 120, py::arg("x_lo") = 0.4, py::arg("x_hi") = 1.0,
      py::arg("slope_mean") = 4.0, py::arg("slope_std") = 1.0, py::arg("noise_std") = 0.01,
      py::arg("variant") = "plain", py::arg("shift") = 0.0, py::arg("seed") = 1,
      "Synthetic line data with a latent slope redrawn per point; returns (x, y)");

  m.def(
      "calibrate_line",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, double noise_std,
         const std::string& likelihood, std::uint64_t seed, int walkers, int burn_in,
         long max_iterations, double epsilon) {
        ObservationSet obs;
        obs.x = x;
        obs.y = y;
        LikelihoodSpec lik;
        lik.kind = likelihood_kind_from_string(likelihood);
        lik.epsilon = epsilon;
        const InferenceProblem problem = linear_problem(obs, noise_std, lik);
        SamplerConfig config;
        config.walkers = walkers;
        config.burn_in = burn_in;
        config.max_iterations = max_iterations;
        config.seed = seed;
        const LogDensity target = [&problem](const Eigen::VectorXd& sample) {
          return log_posterior(problem, sample);
        };
        EnsembleChain chain = run_ensemble(target, problem.sample_priors(), config);
        chain.names = problem.sample_names();
        return chain_dict(chain);
      },
      py::arg("x"), py::arg("y"), py::arg("noise_std") = 0.01, py::arg("likelihood") = "abc",
      py::arg("seed") = 1, py::arg("walkers") = 10, py::arg("burn_in") = 200,
      py::arg("max_iterations") = 10000, py::arg("epsilon") = 0.05,
      "Calibrate the embedded line model on (x, y); returns the chain summary");

  m.def(
      "line_predictive_moments",
      [](const Eigen::MatrixXd& samples, double x_eval, double noise_std) {
        if (samples.cols() != 2)
          throw std::invalid_argument("samples must have columns (t, t_scale)");
        Eigen::VectorXd mu(samples.rows()), sigma(samples.rows());
        for (Eigen::Index i = 0; i < samples.rows(); ++i) {
          mu[i] = samples(i, 0) * x_eval;
          sigma[i] = std::hypot(samples(i, 1) * x_eval, noise_std);
        }
        return py::make_tuple(mu, sigma);
      },
      py::arg("samples"), py::arg("x_eval") = 1.0, py::arg("noise_std") = 0.0,
      "Closed-form predictive moments of the embedded line model per posterior draw");

  m.def(
      "run_experiment",
      [](const std::string& command, const std::string& config_text, const std::string& out_dir,
         std::uint64_t seed, int jobs) {
        ExperimentConfig config =
            config_text.empty() ? default_config(ExperimentKind::Linear)
                                : parse_config(config_text);
        if (seed != 0) apply_seed(config, seed);
        if (jobs > 0) config.jobs = jobs;
        config.output_dir = resolve_output_dir(config, out_dir);
        if (command == "generate") return run_generate(config);
        if (command == "calibrate") return run_calibrate(config);
        if (command == "scan") return run_scan(config);
        if (command == "push") return run_push(config);
        if (command == "all") return run_all(config);
        throw std::invalid_argument("command must be generate, calibrate, scan, push, or all");
      },
      py::arg("command"), py::arg("config_text") = "", py::arg("out_dir") = "",
      py::arg("seed") = 0, py::arg("jobs") = 0,
      "Run a built-in study end to end; returns the driver exit status (0 ok, 2 flagged)");
}
