#include "embcal/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "embcal/linear_model.hpp"

namespace embcal {

namespace {
// Substream ids; datasets stay reproducible as long as these are stable.
enum Stream : std::uint64_t {
  kLinearSlopes = 1,
  kLinearNoise = 2,
  kSeriesShort = 3,
  kSeriesKnots = 4,
  kTrainOutputNoise = 5,
  kTestRoot = 6,
  kTestOutputNoise = 7,
};
}  // namespace

ObservationSet generate_linear(const LinearDataSpec& spec) {
  if (spec.n_points < 2) throw std::invalid_argument("generate_linear: need >= 2 points");
  if (!(spec.noise_std >= 0.0)) throw std::invalid_argument("generate_linear: bad noise_std");
  CounterRng root(spec.seed);
  CounterRng slopes = root.substream(kLinearSlopes);
  CounterRng noise = root.substream(kLinearNoise);

  ObservationSet obs;
  obs.x = linspace(spec.x_lo, spec.x_hi, spec.n_points);
  obs.y.resize(spec.n_points);
  obs.noise_std = spec.noise_std;
  for (int i = 0; i < spec.n_points; ++i) {
    const double slope = slopes.normal(spec.slope_mean, spec.slope_std);
    double y = slope * obs.x[i] + noise.normal(0.0, spec.noise_std);
    if (spec.variant == LinearDataSpec::Variant::Offset) {
      y += spec.shift;
    } else if (spec.variant == LinearDataSpec::Variant::Outliers &&
               obs.x[i] >= spec.outlier_lo && obs.x[i] <= spec.outlier_hi) {
      y -= spec.shift;
    }
    obs.y[i] = y;
  }
  return obs;
}

Material voigt_mix(const Material& steel, const Material& concrete, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("voigt_mix: fraction outside [0, 1]");
  return {f * steel.rho + (1.0 - f) * concrete.rho, f * steel.cp + (1.0 - f) * concrete.cp,
          f * steel.k + (1.0 - f) * concrete.k};
}

Material concrete_material() { return Material::from_conductivity(2300.0, 900.0, 2.0); }

Material steel_material() { return Material::from_conductivity(7850.0, 440.0, 54.0); }

double reinforcement_steel_fraction() {
  // One 12 mm bar per 20 mm x 20 mm cell.
  return 0.012 * 0.012 * 0.25 * 3.141592653589793238462643 / 0.0004;
}

Eigen::VectorXd external_temperature_series(const ExternalSeriesSpec& spec, int steps,
                                            const CounterRng& stream_root) {
  if (steps < 1) throw std::invalid_argument("external_temperature_series: steps must be >= 1");
  if (spec.knot_every < 1) throw std::invalid_argument("external_temperature_series: bad knots");
  CounterRng short_base = stream_root.substream(kSeriesShort);
  CounterRng knot_base = stream_root.substream(kSeriesKnots);

  // First step index strictly past the ramp; knots are pinned there.
  const int first_post = static_cast<int>(std::floor(spec.ramp_minutes / spec.step_minutes)) + 1;

  auto knot_value = [&](int index) {
    CounterRng r = knot_base.substream(static_cast<std::uint64_t>(index));
    return r.normal(0.0, spec.knot_noise_std);
  };

  Eigen::VectorXd series(steps + 1);
  for (int s = 0; s <= steps; ++s) {
    const double t_min = s * spec.step_minutes;
    if (t_min < spec.ramp_minutes) {
      series[s] = spec.t0 + (spec.t_hot - spec.t0) * t_min / spec.ramp_minutes;
      continue;
    }
    double value = spec.t_hot;
    if (!spec.noiseless) {
      CounterRng r = short_base.substream(static_cast<std::uint64_t>(s));
      value += r.normal(0.0, spec.short_noise_std);
      const int offset = s - first_post;
      if (offset <= 0) {
        value += knot_value(0);
      } else {
        const int left = offset / spec.knot_every;
        const double frac =
            double(offset - left * spec.knot_every) / double(spec.knot_every);
        value += (1.0 - frac) * knot_value(left) + frac * knot_value(left + 1);
      }
    }
    series[s] = value;
  }
  return series;
}

SensorLayout default_sensor_layout() {
  return SensorLayout{{{0.15, 0.30}, {0.30, 0.30}, {0.15, 0.12}, {0.30, 0.12}}};
}

std::vector<Material> banded_materials(int n, double side, double band_lo, double band_hi) {
  const Material concrete = concrete_material();
  const Material band = voigt_mix(steel_material(), concrete, reinforcement_steel_fraction());
  const double h = side / n;
  std::vector<Material> materials;
  materials.reserve(n * n);
  for (int ey = 0; ey < n; ++ey) {
    const double lo = ey * h;
    const double hi = lo + h;
    const double overlap = std::max(0.0, std::min(hi, band_hi) - std::max(lo, band_lo));
    const double frac = overlap / h;
    const Material row = frac > 0.0 ? voigt_mix(band, concrete, frac) : concrete;
    for (int ex = 0; ex < n; ++ex) materials.push_back(row);
  }
  return materials;
}

namespace {

int steps_for_minutes(double minutes, double step_minutes) {
  const double steps = minutes / step_minutes;
  const int n = static_cast<int>(std::lround(steps));
  if (std::abs(steps - n) > 1e-9)
    throw std::invalid_argument("generate_thermal: horizon must align with the step size");
  return n;
}

// Flatten sampled sensor readings time-major and attach per-entry noise.
ObservationSet sample_sensors(const ThermalModel& model, const Eigen::MatrixXd& history,
                              const SensorLayout& layout, int first_step, int last_step,
                              double step_minutes, double noise_std, CounterRng noise) {
  const Eigen::MatrixXd temps = model.sensor_temperatures(history, layout);
  const int n_sensors = static_cast<int>(layout.points.size());
  const int n_steps = last_step - first_step + 1;
  ObservationSet obs;
  obs.x.resize(n_steps * n_sensors);
  obs.y.resize(n_steps * n_sensors);
  obs.sensor.resize(n_steps * n_sensors);
  obs.noise_std = noise_std;
  Eigen::Index at = 0;
  for (int step = first_step; step <= last_step; ++step) {
    for (int s = 0; s < n_sensors; ++s) {
      obs.x[at] = step * step_minutes;
      obs.sensor[at] = s + 1;
      obs.y[at] = temps(step, s) + noise.normal(0.0, noise_std);
      ++at;
    }
  }
  return obs;
}

}  // namespace

ThermalDataset generate_thermal(const ThermalDataSpec& spec) {
  if (!(spec.train_start_min < spec.train_end_min &&
        spec.train_end_min <= spec.full_horizon_min && spec.test_end_min <= spec.full_horizon_min))
    throw std::invalid_argument("generate_thermal: inconsistent windows");
  const double step_min = spec.series.step_minutes;
  const int full_steps = steps_for_minutes(spec.full_horizon_min, step_min);
  const int test_steps = steps_for_minutes(spec.test_end_min, step_min);
  const int train_first = steps_for_minutes(spec.train_start_min, step_min);
  const int train_last = steps_for_minutes(spec.train_end_min, step_min);
  const int test_first = train_first;

  CounterRng root(spec.seed);
  ThermalModel model(spec.mesh, spec.side);
  model.set_materials(banded_materials(spec.mesh, spec.side, spec.band_lo, spec.band_hi));

  ThermalDataset data;

  // Truth run over the full horizon; the training window samples it.
  data.t_ext_full = external_temperature_series(spec.series, full_steps, root);
  const Eigen::MatrixXd truth_history =
      model.solve_transient(data.t_ext_full.tail(full_steps), spec.dt_seconds, spec.series.t0);
  data.train = sample_sensors(model, truth_history, default_sensor_layout(), train_first,
                              train_last, step_min, spec.output_noise_std,
                              root.substream(kTrainOutputNoise));

  // Independent testing realization, fresh streams.
  const CounterRng test_root = root.substream(kTestRoot);
  const Eigen::VectorXd t_ext_test = external_temperature_series(spec.series, test_steps, test_root);
  const Eigen::MatrixXd test_history =
      model.solve_transient(t_ext_test.tail(test_steps), spec.dt_seconds, spec.series.t0);
  data.test = sample_sensors(model, test_history, default_sensor_layout(), test_first, test_steps,
                             step_min, spec.output_noise_std, root.substream(kTestOutputNoise));

  // Noiseless heat record from the truth run, positive toward the
  // insulated side, integrated over minutes.
  const Eigen::VectorXd rate = -model.midline_heat_rate(truth_history, spec.x_mid);
  data.truth_times_min = Eigen::VectorXd::LinSpaced(full_steps + 1, 0.0, full_steps * step_min);
  data.truth_heat_rate = rate;
  data.truth_cumulative = cumulative_heat(rate, data.truth_times_min);
  data.q_final = data.truth_cumulative[full_steps];
  return data;
}

}  // namespace embcal
