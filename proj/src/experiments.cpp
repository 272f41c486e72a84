#include "embcal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "embcal/io.hpp"
#include "embcal/likelihood.hpp"
#include "embcal/linear_model.hpp"
#include "embcal/qoi.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace embcal {
namespace {

using nlohmann::json;

int step_of_minute(double minutes, double step_minutes) {
  return static_cast<int>(std::llround(minutes / step_minutes));
}

json parsed_echo(const ExperimentConfig& config) {
  return json::parse(config.echo.empty() ? config_json(config) : config.echo);
}

json run_header(const ExperimentConfig& config) {
  json j;
  j["experiment"] = to_string(config.kind);
  j["seed"] = config.seed;
  j["config"] = parsed_echo(config);
  return j;
}

void apply_parameter_overrides(const ExperimentConfig& config, InferenceProblem& problem) {
  if (!config.parameters.empty()) problem.embedded = config.parameters;
  if (!config.plain_parameters.empty()) problem.plain = config.plain_parameters;
  problem.validate();
}

struct RunPaths {
  fs::path root, data, calibrate, push, scan;

  explicit RunPaths(const std::string& out)
      : root(out), data(root / "data"), calibrate(root / "calibrate"), push(root / "push"),
        scan(root / "scan") {}

  fs::path observations() const { return data / "observations.csv"; }
  fs::path test_observations() const { return data / "test_observations.csv"; }
  fs::path boundary() const { return data / "boundary_series.csv"; }
  fs::path truth_heat() const { return data / "truth_heat.csv"; }
  fs::path meta() const { return data / "meta.json"; }
  fs::path chain_csv(LikelihoodKind k) const {
    return calibrate / (std::string("chain_") + to_string(k) + ".csv");
  }
  fs::path chain_bin(LikelihoodKind k) const {
    return calibrate / (std::string("chain_") + to_string(k) + ".bin");
  }
  fs::path qoi_csv(LikelihoodKind k) const {
    return push / (std::string("qoi_") + to_string(k) + ".csv");
  }
};

bool is_scan_kind(ExperimentKind kind) {
  return kind != ExperimentKind::Linear && kind != ExperimentKind::Thermal;
}

// ---- dataset loading ------------------------------------------------------

struct LinearInputs {
  ObservationSet obs;
  double noise = 0.0;
};

LinearInputs load_linear_inputs(const ExperimentConfig& config, const RunPaths& paths) {
  const std::string path = config.observations_path.empty() ? paths.observations().string()
                                                            : config.observations_path;
  if (!fs::exists(path))
    throw std::runtime_error("dataset not found at " + path + "; run the generate step first");
  LinearInputs in;
  in.obs = load_observations(path);
  in.noise =
      config.prescribed_noise_std >= 0.0 ? config.prescribed_noise_std : config.linear.noise_std;
  in.obs.noise_std = in.noise;
  return in;
}

struct ThermalInputs {
  ObservationSet train;
  Eigen::VectorXd t_ext_full;
  Eigen::VectorXd truth_times;
  double q_final = 0.0;
  double noise = 0.0;
};

ThermalInputs load_thermal_inputs(const ExperimentConfig& config, const RunPaths& paths,
                                  bool need_truth) {
  const fs::path obs_path = config.observations_path.empty()
                                ? paths.observations()
                                : fs::path(config.observations_path);
  if (!fs::exists(obs_path))
    throw std::runtime_error("dataset not found at " + obs_path.string() +
                             "; run the generate step first");
  ThermalInputs in;
  in.train = load_observations(obs_path.string());
  const fs::path boundary = obs_path.parent_path() / "boundary_series.csv";
  if (!fs::exists(boundary))
    throw std::runtime_error("boundary series not found at " + boundary.string());
  const Table b = load_table(boundary.string());
  const int temp_col = b.column("temperature");
  if (temp_col < 0)
    throw std::runtime_error("boundary series lacks a temperature column: " + boundary.string());
  in.t_ext_full = b.data.col(temp_col);
  in.noise = config.prescribed_noise_std >= 0.0 ? config.prescribed_noise_std
                                                : config.thermal.output_noise_std;
  in.train.noise_std = in.noise;
  if (need_truth) {
    const fs::path truth = obs_path.parent_path() / "truth_heat.csv";
    if (!fs::exists(truth))
      throw std::runtime_error("truth heat record not found at " + truth.string());
    const Table t = load_table(truth.string());
    const int time_col = t.column("time_min");
    const int cum_col = t.column("cumulative_heat_w_min");
    if (time_col < 0 || cum_col < 0)
      throw std::runtime_error("truth heat record has unexpected columns: " + truth.string());
    in.truth_times = t.data.col(time_col);
    in.q_final = t.data(t.data.rows() - 1, cum_col);
  }
  return in;
}

// ---- calibration ------------------------------------------------------------

struct FitResult {
  LikelihoodKind kind = LikelihoodKind::Abc;
  bool ok = false;
  EnsembleChain chain;
  std::string error;
};

FitResult fit_one(const InferenceProblem& problem, const SamplerConfig& sampler) {
  FitResult result;
  result.kind = problem.likelihood.kind;
  try {
    const LogDensity target = [&problem](const Eigen::VectorXd& sample) {
      return log_posterior(problem, sample);
    };
    result.chain = run_ensemble(target, problem.sample_priors(), sampler);
    result.chain.names = problem.sample_names();
    result.ok = true;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

void append_fit_rows(std::vector<std::vector<std::string>>& rows,
                     const std::vector<std::string>& prefix, const FitResult& fit,
                     const std::vector<std::string>& names) {
  const std::string nan = "nan";
  for (std::size_t p = 0; p < names.size(); ++p) {
    std::vector<std::string> row = prefix;
    row.push_back(to_string(fit.kind));
    row.push_back(names[p]);
    if (fit.ok) {
      const Eigen::VectorXd mean = fit.chain.posterior_mean();
      const Eigen::VectorXd std_dev = fit.chain.posterior_std();
      row.push_back(format_double(mean[static_cast<Eigen::Index>(p)]));
      row.push_back(format_double(std_dev[static_cast<Eigen::Index>(p)]));
      row.push_back(format_double(fit.chain.ess[static_cast<Eigen::Index>(p)]));
      row.push_back(fit.chain.converged ? "1" : "0");
    } else {
      row.push_back(nan);
      row.push_back(nan);
      row.push_back(nan);
      row.push_back("0");
    }
    rows.push_back(std::move(row));
  }
}

json fit_json(const FitResult& fit, std::uint64_t sampler_seed,
              const std::vector<std::string>& names) {
  json j;
  j["sampler_seed"] = sampler_seed;
  if (!fit.ok) {
    j["converged"] = false;
    j["error"] = fit.error;
    return j;
  }
  const EnsembleChain& c = fit.chain;
  j["converged"] = c.converged;
  j["iterations"] = c.iterations;
  j["burn_in"] = c.burn_in;
  j["walkers"] = c.walkers;
  j["acceptance_rate"] = c.acceptance_rate;
  j["ess_min"] = c.ess.minCoeff();
  const Eigen::VectorXd mean = c.posterior_mean();
  const Eigen::VectorXd std_dev = c.posterior_std();
  json params;
  for (std::size_t p = 0; p < names.size(); ++p) {
    const auto i = static_cast<Eigen::Index>(p);
    params[names[p]] = {{"mean", mean[i]}, {"std", std_dev[i]}, {"ess", c.ess[i]}};
  }
  j["parameters"] = params;
  return j;
}

InferenceProblem build_problem(const ExperimentConfig& config, LikelihoodKind kind,
                               const LinearInputs* lin, const ThermalInputs* th) {
  LikelihoodSpec lik = config.likelihood;
  lik.kind = kind;
  InferenceProblem problem =
      th ? thermal_problem(config.thermal, th->t_ext_full, th->train, th->noise, lik,
                           config.pce_degree, config.quad_order)
         : linear_problem(lin->obs, lin->noise, lik, config.pce_degree, config.quad_order);
  apply_parameter_overrides(config, problem);
  return problem;
}

// ---- QoI summaries ---------------------------------------------------------

json qoi_block(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma,
               const Eigen::VectorXd& draws, const Eigen::VectorXd& z) {
  json j;
  j["draws"] = draws.size();
  j["mean"] = sample_mean(draws);
  j["std"] = draws.size() > 1 ? sample_std(draws) : 0.0;
  j["q05"] = sample_quantile(draws, 0.05);
  j["q50"] = sample_quantile(draws, 0.50);
  j["q95"] = sample_quantile(draws, 0.95);
  j["z_fraction_below_1.96"] = fraction_below(z, 1.96);
  j["z_max"] = z.maxCoeff();
  j["mu_mean"] = sample_mean(mu);
  j["sigma_mean"] = sample_mean(sigma);
  return j;
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& config, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (!config.output_dir.empty()) return config.output_dir;
  std::string root = "out";
  if (const char* env = std::getenv("EMBCAL_OUT_ROOT"); env != nullptr && *env != '\0') root = env;
  return (fs::path(root) / to_string(config.kind)).string();
}

InferenceProblem linear_problem(const ObservationSet& data, double noise_std,
                                LikelihoodSpec likelihood, int pce_degree, int quad_order) {
  InferenceProblem p;
  p.embedded.push_back(
      {"t", Distribution1D::normal(4.5, 0.5), Distribution1D::lognormal(-1.0, 0.5)});
  p.model = std::make_shared<LinearModel>(data.x);
  p.observations = data;
  p.observations.noise_std = noise_std;
  p.likelihood = likelihood;
  p.pce_degree = pce_degree > 0 ? pce_degree : 1;
  p.quad_order = quad_order > 0 ? quad_order : p.pce_degree + 1;
  p.validate();
  return p;
}

InferenceProblem linear_baseline_problem(const ObservationSet& data, double noise_std,
                                         LikelihoodSpec likelihood) {
  InferenceProblem p;
  p.plain.push_back({"t", Distribution1D::normal(4.5, 0.5)});
  p.model = std::make_shared<LinearModel>(data.x);
  p.observations = data;
  p.observations.noise_std = noise_std;
  p.likelihood = likelihood;
  p.pce_degree = 1;
  p.quad_order = 2;
  p.validate();
  return p;
}

InferenceProblem thermal_problem(const ThermalDataSpec& spec, const Eigen::VectorXd& t_ext_full,
                                 const ObservationSet& train, double noise_std,
                                 LikelihoodSpec likelihood, int pce_degree, int quad_order) {
  const double step = spec.series.step_minutes;
  const int first = step_of_minute(spec.train_start_min, step);
  const int last = step_of_minute(spec.train_end_min, step);
  if (t_ext_full.size() < last + 1)
    throw std::invalid_argument("thermal_problem: boundary series shorter than training window");
  std::vector<int> sample_steps(static_cast<std::size_t>(last - first + 1));
  std::iota(sample_steps.begin(), sample_steps.end(), first);
  // The calibration model is the homogeneous concrete plate; the unknown
  // diffusivity absorbs the reinforcement band's effect.
  const Material con = concrete_material();

  InferenceProblem p;
  p.embedded.push_back(
      {"alpha", Distribution1D::normal(1e-6, 1e-7), Distribution1D::lognormal(-16.0, 0.1)});
  p.model = std::make_shared<IsotropicSensorModel>(
      spec.mesh, spec.side, con.rho, con.cp, Eigen::VectorXd(t_ext_full.segment(1, last)),
      spec.dt_seconds, spec.series.t0, default_sensor_layout(), sample_steps);
  p.observations = train;
  p.observations.noise_std = noise_std;
  p.likelihood = likelihood;
  p.pce_degree = pce_degree > 0 ? pce_degree : 2;
  p.quad_order = quad_order > 0 ? quad_order : p.pce_degree + 1;
  p.validate();
  return p;
}

std::shared_ptr<const ForwardModel> thermal_heat_model(const ThermalDataSpec& spec,
                                                       const Eigen::VectorXd& t_ext_full) {
  // Same homogeneous concrete plate as the calibration model: the heat-rate
  // conversion k = alpha * rho * c_p uses the concrete volumetric capacity.
  const Material con = concrete_material();
  const Eigen::Index full = t_ext_full.size() - 1;
  return std::make_shared<IsotropicMidlineHeatModel>(
      spec.mesh, spec.side, con.rho, con.cp, Eigen::VectorXd(t_ext_full.tail(full)),
      spec.dt_seconds, spec.series.t0, spec.x_mid);
}

std::shared_ptr<const ForwardModel> linear_point_model(double x) {
  return std::make_shared<LinearModel>(Eigen::VectorXd::Constant(1, x));
}

void run_jobs(int jobs, int count, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

int run_generate(const ExperimentConfig& config) {
  const RunPaths paths(config.output_dir);
  fs::create_directories(paths.data);
  json meta = run_header(config);
  if (config.kind == ExperimentKind::Thermal) {
    const ThermalDataset ds = generate_thermal(config.thermal);
    save_observations(paths.observations().string(), ds.train);
    save_observations(paths.test_observations().string(), ds.test);

    const double step_min = config.thermal.series.step_minutes;
    Eigen::MatrixXd boundary(ds.t_ext_full.size(), 2);
    boundary.col(0) =
        Eigen::VectorXd::LinSpaced(ds.t_ext_full.size(), 0.0,
                                   static_cast<double>(ds.t_ext_full.size() - 1) * step_min);
    boundary.col(1) = ds.t_ext_full;
    save_table(paths.boundary().string(), {"time_min", "temperature"}, boundary);

    Eigen::MatrixXd truth(ds.truth_times_min.size(), 3);
    truth.col(0) = ds.truth_times_min;
    truth.col(1) = ds.truth_heat_rate;
    truth.col(2) = ds.truth_cumulative;
    save_table(paths.truth_heat().string(), {"time_min", "heat_rate_w", "cumulative_heat_w_min"},
               truth);

    meta["noise_std"] = config.thermal.output_noise_std;
    meta["truth"] = {{"q_final_w_min", ds.q_final},
                     {"horizon_min", config.thermal.full_horizon_min}};
    meta["files"] = {{"observations", "observations.csv"},
                     {"test_observations", "test_observations.csv"},
                     {"boundary_series", "boundary_series.csv"},
                     {"truth_heat", "truth_heat.csv"}};
  } else {
    const ObservationSet obs = generate_linear(config.linear);
    save_observations(paths.observations().string(), obs);
    meta["noise_std"] = config.linear.noise_std;
    meta["files"] = {{"observations", "observations.csv"}};
  }
  write_text_file(paths.meta().string(), meta.dump(2) + "\n");
  return 0;
}

int run_calibrate(const ExperimentConfig& config) {
  if (is_scan_kind(config.kind))
    throw std::invalid_argument("calibrate applies to the linear and thermal experiments; "
                                "scan experiments use the scan command");
  const RunPaths paths(config.output_dir);
  fs::create_directories(paths.calibrate);

  LinearInputs lin;
  ThermalInputs th;
  const bool thermal = config.kind == ExperimentKind::Thermal;
  if (thermal)
    th = load_thermal_inputs(config, paths, false);
  else
    lin = load_linear_inputs(config, paths);

  const int n = static_cast<int>(config.likelihoods.size());
  std::vector<FitResult> fits(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
  run_jobs(config.jobs, n, [&](int i) {
    const LikelihoodKind kind = config.likelihoods[static_cast<std::size_t>(i)];
    const InferenceProblem problem =
        build_problem(config, kind, thermal ? nullptr : &lin, thermal ? &th : nullptr);
    SamplerConfig sampler = config.sampler;
    sampler.seed = derive_seed(config.seed, 0, static_cast<std::uint64_t>(kind));
    seeds[static_cast<std::size_t>(i)] = sampler.seed;
    fits[static_cast<std::size_t>(i)] = fit_one(problem, sampler);
  });

  const std::vector<std::string> names =
      build_problem(config, config.likelihoods[0], thermal ? nullptr : &lin,
                    thermal ? &th : nullptr)
          .sample_names();

  bool flagged = false;
  std::vector<std::vector<std::string>> rows;
  json results;
  for (int i = 0; i < n; ++i) {
    const FitResult& fit = fits[static_cast<std::size_t>(i)];
    if (fit.ok) {
      save_chain_csv(fit.chain, paths.chain_csv(fit.kind).string());
      save_chain_binary(fit.chain, paths.chain_bin(fit.kind).string());
      flagged = flagged || !fit.chain.converged;
    } else {
      flagged = true;
    }
    append_fit_rows(rows, {}, fit, names);
    results[to_string(fit.kind)] = fit_json(fit, seeds[static_cast<std::size_t>(i)], names);
  }
  save_text_table((paths.calibrate / "summary.csv").string(),
                  {"likelihood", "param", "mean", "std", "ess", "converged"}, rows);
  json summary = run_header(config);
  summary["results"] = results;
  write_text_file((paths.calibrate / "summary.json").string(), summary.dump(2) + "\n");
  return flagged ? 2 : 0;
}

int run_scan(const ExperimentConfig& config) {
  if (!is_scan_kind(config.kind))
    throw std::invalid_argument("scan applies to the scan experiments; "
                                "single calibrations use the calibrate command");
  const RunPaths paths(config.output_dir);
  fs::create_directories(paths.scan);

  std::vector<double> grid;
  switch (config.kind) {
    case ExperimentKind::LinearNoiseScan: {
      const int n = config.scan_points > 0 ? config.scan_points : 20;
      if (n < 2) throw std::invalid_argument("noise scan needs at least two points");
      const double lo = std::log(0.001), hi = std::log(10.0);
      for (int i = 0; i < n; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / (n - 1)));
      break;
    }
    case ExperimentKind::LinearOffsetScan: {
      const int n = config.scan_points > 0 ? config.scan_points : 11;
      if (n < 2) throw std::invalid_argument("offset scan needs at least two points");
      for (int i = 0; i < n; ++i) grid.push_back(1.0 * static_cast<double>(i) / (n - 1));
      break;
    }
    case ExperimentKind::LinearOutlierScan: {
      const int n = config.scan_points > 0 ? config.scan_points : 21;
      if (n < 2) throw std::invalid_argument("outlier scan needs at least two points");
      for (int i = 0; i < n; ++i) grid.push_back(2.0 * static_cast<double>(i) / (n - 1));
      break;
    }
    case ExperimentKind::LinearSeedReplication: {
      const int n = config.scan_points > 0 ? config.scan_points : config.replication_count;
      if (n < 1) throw std::invalid_argument("seed replication needs at least one seed");
      for (int i = 0; i < n; ++i) grid.push_back(static_cast<double>(i + 1));
      break;
    }
    default:
      throw std::logic_error("unhandled scan kind");
  }

  const int n_lik = static_cast<int>(config.likelihoods.size());
  const int total = static_cast<int>(grid.size()) * n_lik;
  std::vector<FitResult> fits(static_cast<std::size_t>(total));

  run_jobs(config.jobs, total, [&](int idx) {
    const int point = idx / n_lik;
    const int li = idx % n_lik;
    const LikelihoodKind kind = config.likelihoods[static_cast<std::size_t>(li)];
    FitResult& slot = fits[static_cast<std::size_t>(idx)];
    slot.kind = kind;
    try {
      LinearDataSpec spec = config.linear;
      double noise = config.prescribed_noise_std >= 0.0 ? config.prescribed_noise_std
                                                        : spec.noise_std;
      switch (config.kind) {
        case ExperimentKind::LinearNoiseScan:
          noise = grid[static_cast<std::size_t>(point)];
          break;
        case ExperimentKind::LinearOffsetScan:
          spec.variant = LinearDataSpec::Variant::Offset;
          spec.shift = grid[static_cast<std::size_t>(point)];
          break;
        case ExperimentKind::LinearOutlierScan:
          spec.variant = LinearDataSpec::Variant::Outliers;
          spec.shift = grid[static_cast<std::size_t>(point)];
          break;
        case ExperimentKind::LinearSeedReplication:
          spec.seed = static_cast<std::uint64_t>(grid[static_cast<std::size_t>(point)]);
          break;
        default:
          break;
      }
      const ObservationSet obs = generate_linear(spec);
      LikelihoodSpec lik = config.likelihood;
      lik.kind = kind;
      InferenceProblem problem =
          linear_problem(obs, noise, lik, config.pce_degree, config.quad_order);
      apply_parameter_overrides(config, problem);
      SamplerConfig sampler = config.sampler;
      sampler.seed = derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(point),
                                 static_cast<std::uint64_t>(kind));
      slot = fit_one(problem, sampler);
    } catch (const std::exception& e) {
      slot.ok = false;
      slot.error = e.what();
    }
  });

  std::vector<std::string> names;
  {
    const ObservationSet obs = generate_linear(config.linear);
    LikelihoodSpec lik = config.likelihood;
    lik.kind = config.likelihoods[0];
    InferenceProblem problem =
        linear_problem(obs, 1.0, lik, config.pce_degree, config.quad_order);
    apply_parameter_overrides(config, problem);
    names = problem.sample_names();
  }

  bool flagged = false;
  std::vector<std::vector<std::string>> rows;
  for (int idx = 0; idx < total; ++idx) {
    const int point = idx / n_lik;
    const FitResult& fit = fits[static_cast<std::size_t>(idx)];
    flagged = flagged || !fit.ok || !fit.chain.converged;
    append_fit_rows(rows, {format_double(grid[static_cast<std::size_t>(point)])}, fit, names);
  }
  save_text_table((paths.scan / "scan.csv").string(),
                  {"scan_value", "likelihood", "param", "mean", "std", "ess", "converged"}, rows);

  json summary = run_header(config);
  summary["scan"] = {{"kind", to_string(config.kind)},
                     {"values", grid},
                     {"flagged", flagged}};
  write_text_file((paths.scan / "summary.json").string(), summary.dump(2) + "\n");
  return flagged ? 2 : 0;
}

int run_push(const ExperimentConfig& config) {
  if (is_scan_kind(config.kind))
    throw std::invalid_argument("push applies to the linear and thermal experiments");
  const RunPaths paths(config.output_dir);
  fs::create_directories(paths.push);
  const bool thermal = config.kind == ExperimentKind::Thermal;

  LinearInputs lin;
  ThermalInputs th;
  if (thermal)
    th = load_thermal_inputs(config, paths, true);
  else
    lin = load_linear_inputs(config, paths);

  // Convergence flags recorded by the calibrate step, when present.
  std::map<std::string, bool> converged;
  const fs::path cal_summary = paths.calibrate / "summary.json";
  if (fs::exists(cal_summary)) {
    const json s = json::parse(read_text_file(cal_summary.string()));
    if (s.contains("results"))
      for (const auto& [key, value] : s.at("results").items())
        converged[key] = value.value("converged", false);
  }

  double reference = 0.0;
  double reference_x = 0.0;
  if (thermal) {
    reference = th.q_final;
  } else {
    Eigen::Index ref_row = 0;
    lin.obs.x.maxCoeff(&ref_row);
    reference = lin.obs.y[ref_row];
    reference_x = lin.obs.x[ref_row];
  }

  const int n = static_cast<int>(config.likelihoods.size());
  std::vector<json> blocks(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  bool flagged = false;
  std::mutex flag_mutex;

  run_jobs(config.jobs, n, [&](int i) {
    const LikelihoodKind kind = config.likelihoods[static_cast<std::size_t>(i)];
    try {
      const fs::path chain_path = paths.chain_bin(kind);
      if (!fs::exists(chain_path))
        throw std::runtime_error("no chain for " + std::string(to_string(kind)) +
                                 "; run the calibrate step first");
      EnsembleChain chain = load_chain_binary(chain_path.string());
      const InferenceProblem problem =
          build_problem(config, kind, thermal ? nullptr : &lin, thermal ? &th : nullptr);
      if (chain.dim != problem.sample_dim())
        throw std::runtime_error("stored chain dimension does not match the configuration");

      PushForwardOptions opts;
      opts.max_draws = config.push_draws;
      opts.map_only = config.push_map_only;
      opts.pce_degree = problem.pce_degree;
      opts.quad_order = problem.quad_order;
      opts.seed = derive_seed(config.seed, 1, static_cast<std::uint64_t>(kind));
      opts.noise_std = thermal ? 0.0 : lin.noise;

      const std::shared_ptr<const ForwardModel> qoi_model =
          thermal ? thermal_heat_model(config.thermal, th.t_ext_full)
                  : linear_point_model(reference_x);

      Eigen::VectorXd mu, sigma, draws, z;
      json map_block;
      if (thermal) {
        const PushForwardResult pf = push_forward(problem, *qoi_model, chain, opts);
        const IntegratedSeriesQoi iq = integrate_series_qoi(pf, th.truth_times, reference);
        mu = iq.mu;
        sigma = iq.sigma;
        z = iq.z;
        CounterRng rng(derive_seed(config.seed, 2, static_cast<std::uint64_t>(kind)));
        draws.resize(mu.size());
        for (Eigen::Index d = 0; d < mu.size(); ++d) draws[d] = rng.normal(mu[d], sigma[d]);

        PushForwardOptions map_opts = opts;
        map_opts.map_only = true;
        const PushForwardResult pm = push_forward(problem, *qoi_model, chain, map_opts);
        const IntegratedSeriesQoi im = integrate_series_qoi(pm, th.truth_times, reference);
        map_block = {{"mu", im.mu[0]}, {"sigma", im.sigma[0]}, {"z", im.z[0]}};
      } else {
        const PushForwardResult pf = push_forward(problem, *qoi_model, chain, opts);
        mu = pf.mu.col(0);
        sigma = pf.sigma.col(0);
        draws = pf.draw.col(0);
        z = z_scores(pf, Eigen::VectorXd::Constant(1, reference)).col(0);

        PushForwardOptions map_opts = opts;
        map_opts.map_only = true;
        const PushForwardResult pm = push_forward(problem, *qoi_model, chain, map_opts);
        map_block = {{"mu", pm.mu(0, 0)},
                     {"sigma", pm.sigma(0, 0)},
                     {"z", z_value(pm.mu(0, 0), pm.sigma(0, 0), reference)}};
      }

      Eigen::MatrixXd table(mu.size(), 4);
      table.col(0) = mu;
      table.col(1) = sigma;
      table.col(2) = draws;
      table.col(3) = z;
      save_table(paths.qoi_csv(kind).string(), {"mu", "sigma", "draw", "z"}, table);

      json block = qoi_block(mu, sigma, draws, z);
      block["map"] = map_block;
      const auto it = converged.find(to_string(kind));
      if (it != converged.end()) {
        block["converged"] = it->second;
        if (!it->second) {
          const std::lock_guard<std::mutex> lock(flag_mutex);
          flagged = true;
        }
      }
      blocks[static_cast<std::size_t>(i)] = std::move(block);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
      const std::lock_guard<std::mutex> lock(flag_mutex);
      flagged = true;
    }
  });

  json results;
  for (int i = 0; i < n; ++i) {
    const std::string key = to_string(config.likelihoods[static_cast<std::size_t>(i)]);
    if (!errors[static_cast<std::size_t>(i)].empty())
      results[key] = {{"error", errors[static_cast<std::size_t>(i)]}};
    else
      results[key] = blocks[static_cast<std::size_t>(i)];
  }
  json summary = run_header(config);
  summary["mode"] = config.push_map_only ? "map" : "full";
  if (thermal) {
    summary["qoi"] = "cumulative_heat";
    summary["reference"] = {{"value", reference},
                            {"horizon_min", config.thermal.full_horizon_min}};
  } else {
    summary["qoi"] = "line_prediction";
    summary["reference"] = {{"value", reference}, {"x", reference_x}};
  }
  summary["results"] = results;
  write_text_file((paths.push / "summary.json").string(), summary.dump(2) + "\n");
  return flagged ? 2 : 0;
}

int run_all(const ExperimentConfig& config) {
  int rc = run_generate(config);
  if (is_scan_kind(config.kind)) {
    rc = std::max(rc, run_scan(config));
  } else {
    rc = std::max(rc, run_calibrate(config));
    rc = std::max(rc, run_push(config));
  }
  return rc;
}

}  // namespace embcal
