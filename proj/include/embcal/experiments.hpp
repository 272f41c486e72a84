#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "embcal/datagen.hpp"
#include "embcal/ensemble.hpp"
#include "embcal/problem.hpp"

namespace embcal {

// Built-in studies: single-dataset calibrations for the line and heat
// examples, plus the line-example sensitivity scans.
enum class ExperimentKind {
  Linear,
  LinearNoiseScan,
  LinearOffsetScan,
  LinearOutlierScan,
  LinearSeedReplication,
  Thermal,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Linear;
  std::vector<LikelihoodKind> likelihoods = {
      LikelihoodKind::Abc, LikelihoodKind::IndependentNormal, LikelihoodKind::GlobalMoments,
      LikelihoodKind::RelativeMoments};
  std::uint64_t seed = 1;
  int replication_count = 20;  // datasets in the seed-replication study
  std::string output_dir;     // resolved by the command-line driver

  LinearDataSpec linear;
  ThermalDataSpec thermal;

  double prescribed_noise_std = -1.0;  // <0: use the generating noise level
  LikelihoodSpec likelihood;           // epsilon/gamma/centering; kind set per run

  // Prior overrides; empty means the built-in study priors.
  std::vector<EmbeddedParameter> parameters;
  std::vector<PlainParameter> plain_parameters;
  std::string observations_path;  // external dataset instead of data/observations.csv

  int pce_degree = -1;  // <0: study default (1 line, 2 heat)
  int quad_order = -1;  // <0: pce_degree + 1

  SamplerConfig sampler;  // seed field is derived per run, not taken from here

  int scan_points = -1;  // <0: per-scan default (noise 20, offset 11, outlier 21)
  int push_draws = 1000;
  bool push_map_only = false;
  int jobs = 1;

  std::string echo;  // configuration text echoed into every output
};

// Study defaults (sampler burn-in, PCE orders, output subdirectory name).
ExperimentConfig default_config(ExperimentKind kind);

// JSON text/file -> config; unknown keys are rejected. Empty path -> defaults.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON rendering of the effective configuration.
std::string config_json(const ExperimentConfig& config);

// Set the top-level seed and propagate it to the data generators.
void apply_seed(ExperimentConfig& config, std::uint64_t seed);

// Deterministic per-job stream derivation from the experiment seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b);

// Output directory resolution: explicit override, then config "output", then
// $EMBCAL_OUT_ROOT/<experiment>, then ./out/<experiment>.
std::string resolve_output_dir(const ExperimentConfig& config, const std::string& override_dir);

// ---- calibration setups -------------------------------------------------

// Line-through-origin setup: embedded slope with N(4.5, 0.5^2) mean prior
// and LN(-1, 0.5) spread prior.
InferenceProblem linear_problem(const ObservationSet& data, double noise_std,
                                LikelihoodSpec likelihood, int pce_degree = -1,
                                int quad_order = -1);

// Same data with no embedded perturbation: one plain slope parameter, so the
// predictive spread comes from the prescribed noise alone.
InferenceProblem linear_baseline_problem(const ObservationSet& data, double noise_std,
                                         LikelihoodSpec likelihood);

// Isotropic heat-conduction setup on the training window: embedded
// diffusivity with N(1e-6, (1e-7)^2) mean prior and LN(-16, 0.1) spread
// prior. `t_ext_full` follows the dataset convention (entry s = boundary
// value at minute s * step).
InferenceProblem thermal_problem(const ThermalDataSpec& spec, const Eigen::VectorXd& t_ext_full,
                                 const ObservationSet& train, double noise_std,
                                 LikelihoodSpec likelihood, int pce_degree = -1,
                                 int quad_order = -1);

// Full-horizon midline heat-rate model sharing thermal_problem's
// parameterization (one diffusivity input).
std::shared_ptr<const ForwardModel> thermal_heat_model(const ThermalDataSpec& spec,
                                                       const Eigen::VectorXd& t_ext_full);

// Single-point line model for predictive scoring at x.
std::shared_ptr<const ForwardModel> linear_point_model(double x);

// ---- drivers --------------------------------------------------------------

// Exit status contract: 0 = success, 2 = finished with flagged rows
// (non-converged or failed points); hard errors throw.
int run_generate(const ExperimentConfig& config);
int run_calibrate(const ExperimentConfig& config);
int run_scan(const ExperimentConfig& config);
int run_push(const ExperimentConfig& config);
int run_all(const ExperimentConfig& config);

// Work queue: invokes fn(0..count-1) from up to `jobs` threads; the first
// exception escaping fn is rethrown after all workers finish.
void run_jobs(int jobs, int count, const std::function<void(int)>& fn);

}  // namespace embcal
