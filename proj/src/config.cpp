#include <initializer_list>
#include <stdexcept>
#include <string>

#include "embcal/experiments.hpp"
#include "embcal/io.hpp"
#include "embcal/rng.hpp"
#include "json.hpp"

namespace embcal {
namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

Distribution1D parse_distribution(const json& j, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  require_keys(j, where, {"kind", "mean", "std", "log_mean", "log_std", "low", "high"});
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "normal")
    return Distribution1D::normal(j.at("mean").get<double>(), j.at("std").get<double>());
  if (kind == "lognormal")
    return Distribution1D::lognormal(j.at("log_mean").get<double>(),
                                     j.at("log_std").get<double>());
  if (kind == "uniform")
    return Distribution1D::uniform(j.at("low").get<double>(), j.at("high").get<double>());
  throw std::invalid_argument("config: unknown distribution kind \"" + kind + "\" in " + where);
}

json distribution_json(const Distribution1D& d) {
  switch (d.kind) {
    case Distribution1D::Kind::Normal:
      return {{"kind", "normal"}, {"mean", d.a}, {"std", d.b}};
    case Distribution1D::Kind::LogNormal:
      return {{"kind", "lognormal"}, {"log_mean", d.a}, {"log_std", d.b}};
    case Distribution1D::Kind::Uniform:
      return {{"kind", "uniform"}, {"low", d.a}, {"high", d.b}};
  }
  throw std::logic_error("distribution_json: unhandled kind");
}

const char* to_string(LinearDataSpec::Variant v) {
  switch (v) {
    case LinearDataSpec::Variant::Plain:
      return "plain";
    case LinearDataSpec::Variant::Offset:
      return "offset";
    case LinearDataSpec::Variant::Outliers:
      return "outliers";
  }
  throw std::logic_error("unhandled data variant");
}

LinearDataSpec::Variant variant_from_string(const std::string& s) {
  if (s == "plain") return LinearDataSpec::Variant::Plain;
  if (s == "offset") return LinearDataSpec::Variant::Offset;
  if (s == "outliers") return LinearDataSpec::Variant::Outliers;
  throw std::invalid_argument("config: unknown data variant \"" + s + "\"");
}

void parse_linear_data(const json& j, LinearDataSpec& spec) {
  require_keys(j, "data", {"n_points", "x_lo", "x_hi", "slope_mean", "slope_std", "noise_std",
                           "variant", "shift", "outlier_lo", "outlier_hi"});
  spec.n_points = j.value("n_points", spec.n_points);
  spec.x_lo = j.value("x_lo", spec.x_lo);
  spec.x_hi = j.value("x_hi", spec.x_hi);
  spec.slope_mean = j.value("slope_mean", spec.slope_mean);
  spec.slope_std = j.value("slope_std", spec.slope_std);
  spec.noise_std = j.value("noise_std", spec.noise_std);
  if (j.contains("variant")) spec.variant = variant_from_string(j.at("variant").get<std::string>());
  spec.shift = j.value("shift", spec.shift);
  spec.outlier_lo = j.value("outlier_lo", spec.outlier_lo);
  spec.outlier_hi = j.value("outlier_hi", spec.outlier_hi);
}

void parse_thermal_data(const json& j, ThermalDataSpec& spec) {
  require_keys(j, "data",
               {"mesh", "side", "dt_seconds", "train_start_min", "train_end_min", "test_end_min",
                "full_horizon_min", "band_lo", "band_hi", "output_noise_std", "x_mid", "series"});
  spec.mesh = j.value("mesh", spec.mesh);
  spec.side = j.value("side", spec.side);
  spec.dt_seconds = j.value("dt_seconds", spec.dt_seconds);
  spec.train_start_min = j.value("train_start_min", spec.train_start_min);
  spec.train_end_min = j.value("train_end_min", spec.train_end_min);
  spec.test_end_min = j.value("test_end_min", spec.test_end_min);
  spec.full_horizon_min = j.value("full_horizon_min", spec.full_horizon_min);
  spec.band_lo = j.value("band_lo", spec.band_lo);
  spec.band_hi = j.value("band_hi", spec.band_hi);
  spec.output_noise_std = j.value("output_noise_std", spec.output_noise_std);
  spec.x_mid = j.value("x_mid", spec.x_mid);
  if (j.contains("series")) {
    const json& s = j.at("series");
    require_keys(s, "data.series",
                 {"t0", "t_hot", "ramp_minutes", "step_minutes", "short_noise_std",
                  "knot_noise_std", "knot_every", "noiseless"});
    spec.series.t0 = s.value("t0", spec.series.t0);
    spec.series.t_hot = s.value("t_hot", spec.series.t_hot);
    spec.series.ramp_minutes = s.value("ramp_minutes", spec.series.ramp_minutes);
    spec.series.step_minutes = s.value("step_minutes", spec.series.step_minutes);
    spec.series.short_noise_std = s.value("short_noise_std", spec.series.short_noise_std);
    spec.series.knot_noise_std = s.value("knot_noise_std", spec.series.knot_noise_std);
    spec.series.knot_every = s.value("knot_every", spec.series.knot_every);
    spec.series.noiseless = s.value("noiseless", spec.series.noiseless);
  }
}

json linear_data_json(const LinearDataSpec& spec) {
  return {{"n_points", spec.n_points},   {"x_lo", spec.x_lo},
          {"x_hi", spec.x_hi},           {"slope_mean", spec.slope_mean},
          {"slope_std", spec.slope_std}, {"noise_std", spec.noise_std},
          {"variant", to_string(spec.variant)}, {"shift", spec.shift},
          {"outlier_lo", spec.outlier_lo},      {"outlier_hi", spec.outlier_hi}};
}

json thermal_data_json(const ThermalDataSpec& spec) {
  return {{"mesh", spec.mesh},
          {"side", spec.side},
          {"dt_seconds", spec.dt_seconds},
          {"train_start_min", spec.train_start_min},
          {"train_end_min", spec.train_end_min},
          {"test_end_min", spec.test_end_min},
          {"full_horizon_min", spec.full_horizon_min},
          {"band_lo", spec.band_lo},
          {"band_hi", spec.band_hi},
          {"output_noise_std", spec.output_noise_std},
          {"x_mid", spec.x_mid},
          {"series",
           {{"t0", spec.series.t0},
            {"t_hot", spec.series.t_hot},
            {"ramp_minutes", spec.series.ramp_minutes},
            {"step_minutes", spec.series.step_minutes},
            {"short_noise_std", spec.series.short_noise_std},
            {"knot_noise_std", spec.series.knot_noise_std},
            {"knot_every", spec.series.knot_every},
            {"noiseless", spec.series.noiseless}}}};
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Linear:
      return "linear";
    case ExperimentKind::LinearNoiseScan:
      return "linear_noise_scan";
    case ExperimentKind::LinearOffsetScan:
      return "linear_offset_scan";
    case ExperimentKind::LinearOutlierScan:
      return "linear_outlier_scan";
    case ExperimentKind::LinearSeedReplication:
      return "linear_seed_replication";
    case ExperimentKind::Thermal:
      return "thermal";
  }
  throw std::logic_error("unhandled experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (ExperimentKind kind :
       {ExperimentKind::Linear, ExperimentKind::LinearNoiseScan, ExperimentKind::LinearOffsetScan,
        ExperimentKind::LinearOutlierScan, ExperimentKind::LinearSeedReplication,
        ExperimentKind::Thermal})
    if (s == to_string(kind)) return kind;
  throw std::invalid_argument("unknown experiment \"" + s + "\"");
}

void apply_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.linear.seed = seed;
  config.thermal.seed = seed;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  CounterRng rng = CounterRng(root, 0x5eedu).substream(a).substream(b);
  return rng.next_u64();
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  if (kind == ExperimentKind::Thermal) config.sampler.burn_in = 250;
  apply_seed(config, 1);
  return config;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  require_keys(j, "top level",
               {"experiment", "likelihoods", "seed", "output", "jobs", "noise_std", "data",
                "likelihood", "observations", "pce", "sampler", "scan", "push", "replication",
                "parameters"});

  ExperimentConfig config =
      default_config(experiment_kind_from_string(j.value("experiment", "linear")));
  config.echo = json_text;
  apply_seed(config, j.value("seed", std::uint64_t{1}));
  config.output_dir = j.value("output", std::string());
  config.jobs = j.value("jobs", config.jobs);
  if (config.jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");

  if (j.contains("likelihoods")) {
    config.likelihoods.clear();
    for (const auto& name : j.at("likelihoods"))
      config.likelihoods.push_back(likelihood_kind_from_string(name.get<std::string>()));
    if (config.likelihoods.empty())
      throw std::invalid_argument("config: likelihoods must not be empty");
  }

  if (j.contains("noise_std")) config.prescribed_noise_std = j.at("noise_std").get<double>();

  if (j.contains("data")) {
    if (config.kind == ExperimentKind::Thermal)
      parse_thermal_data(j.at("data"), config.thermal);
    else
      parse_linear_data(j.at("data"), config.linear);
  }

  if (j.contains("likelihood")) {
    const json& l = j.at("likelihood");
    require_keys(l, "likelihood", {"epsilon", "gamma", "center_spread_at_mean", "noise_std"});
    config.likelihood.epsilon = l.value("epsilon", config.likelihood.epsilon);
    config.likelihood.gamma = l.value("gamma", config.likelihood.gamma);
    config.likelihood.center_spread_at_mean =
        l.value("center_spread_at_mean", config.likelihood.center_spread_at_mean);
    if (l.contains("noise_std")) config.prescribed_noise_std = l.at("noise_std").get<double>();
  }

  if (j.contains("observations")) {
    const json& o = j.at("observations");
    require_keys(o, "observations", {"path", "noise_std"});
    config.observations_path = o.value("path", std::string());
    if (o.contains("noise_std")) config.prescribed_noise_std = o.at("noise_std").get<double>();
  }

  if (j.contains("pce")) {
    const json& p = j.at("pce");
    require_keys(p, "pce", {"degree", "order"});
    config.pce_degree = p.value("degree", config.pce_degree);
    config.quad_order = p.value("order", config.quad_order);
  }

  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    require_keys(s, "sampler",
                 {"walkers", "stretch", "burn_in", "batch", "max_iterations", "ess_target",
                  "ess_alpha", "ess_precision"});
    config.sampler.walkers = s.value("walkers", config.sampler.walkers);
    config.sampler.stretch = s.value("stretch", config.sampler.stretch);
    config.sampler.burn_in = s.value("burn_in", config.sampler.burn_in);
    config.sampler.batch = s.value("batch", config.sampler.batch);
    config.sampler.max_iterations = s.value("max_iterations", config.sampler.max_iterations);
    config.sampler.ess_target = s.value("ess_target", config.sampler.ess_target);
    config.sampler.ess_alpha = s.value("ess_alpha", config.sampler.ess_alpha);
    config.sampler.ess_precision = s.value("ess_precision", config.sampler.ess_precision);
  }

  if (j.contains("scan")) {
    const json& s = j.at("scan");
    require_keys(s, "scan", {"points"});
    config.scan_points = s.value("points", config.scan_points);
  }

  if (j.contains("push")) {
    const json& p = j.at("push");
    require_keys(p, "push", {"draws", "map_only"});
    config.push_draws = p.value("draws", config.push_draws);
    config.push_map_only = p.value("map_only", config.push_map_only);
  }

  if (j.contains("replication")) {
    const json& r = j.at("replication");
    require_keys(r, "replication", {"count"});
    config.replication_count = r.value("count", config.replication_count);
  }

  if (j.contains("parameters")) {
    for (const auto& p : j.at("parameters")) {
      require_keys(p, "parameters[]", {"name", "mean_prior", "scale_prior", "prior"});
      const std::string name = p.at("name").get<std::string>();
      if (p.contains("prior")) {
        config.plain_parameters.push_back(
            {name, parse_distribution(p.at("prior"), "parameters[].prior")});
      } else {
        config.parameters.push_back(
            {name, parse_distribution(p.at("mean_prior"), "parameters[].mean_prior"),
             parse_distribution(p.at("scale_prior"), "parameters[].scale_prior")});
      }
    }
  }

  return config;
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return default_config(ExperimentKind::Linear);
  return parse_config(read_text_file(path));
}

std::string config_json(const ExperimentConfig& config) {
  json j;
  j["experiment"] = to_string(config.kind);
  json liks = json::array();
  for (LikelihoodKind k : config.likelihoods) liks.push_back(to_string(k));
  j["likelihoods"] = liks;
  j["seed"] = config.seed;
  if (!config.output_dir.empty()) j["output"] = config.output_dir;
  j["jobs"] = config.jobs;
  j["data"] = config.kind == ExperimentKind::Thermal ? thermal_data_json(config.thermal)
                                                     : linear_data_json(config.linear);
  j["likelihood"] = {{"epsilon", config.likelihood.epsilon},
                     {"gamma", config.likelihood.gamma},
                     {"center_spread_at_mean", config.likelihood.center_spread_at_mean}};
  if (config.prescribed_noise_std >= 0.0) j["noise_std"] = config.prescribed_noise_std;
  if (!config.observations_path.empty()) j["observations"] = {{"path", config.observations_path}};
  j["pce"] = {{"degree", config.pce_degree}, {"order", config.quad_order}};
  j["sampler"] = {{"walkers", config.sampler.walkers},
                  {"stretch", config.sampler.stretch},
                  {"burn_in", config.sampler.burn_in},
                  {"batch", config.sampler.batch},
                  {"max_iterations", config.sampler.max_iterations},
                  {"ess_target", config.sampler.ess_target},
                  {"ess_alpha", config.sampler.ess_alpha},
                  {"ess_precision", config.sampler.ess_precision}};
  if (config.scan_points > 0) j["scan"] = {{"points", config.scan_points}};
  j["push"] = {{"draws", config.push_draws}, {"map_only", config.push_map_only}};
  j["replication"] = {{"count", config.replication_count}};
  if (!config.parameters.empty() || !config.plain_parameters.empty()) {
    json params = json::array();
    for (const auto& p : config.parameters)
      params.push_back({{"name", p.name},
                        {"mean_prior", distribution_json(p.mean_prior)},
                        {"scale_prior", distribution_json(p.scale_prior)}});
    for (const auto& p : config.plain_parameters)
      params.push_back({{"name", p.name}, {"prior", distribution_json(p.prior)}});
    j["parameters"] = params;
  }
  return j.dump(2) + "\n";
}

}  // namespace embcal
