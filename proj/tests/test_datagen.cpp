#include <cmath>

#include "doctest.h"
#include "embcal/datagen.hpp"
#include "embcal/rng.hpp"
#include "embcal/thermal.hpp"

using namespace embcal;

TEST_CASE("synthetic line data layout and determinism") {
  LinearDataSpec spec;
  const ObservationSet obs = generate_linear(spec);
  REQUIRE(obs.x.size() == 120);
  REQUIRE(obs.y.size() == 120);
  CHECK(obs.x[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(obs.x[119] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(obs.noise_std == 0.01);
  CHECK(obs.sensor.size() == 0);

  const ObservationSet again = generate_linear(spec);
  CHECK((obs.y - again.y).cwiseAbs().maxCoeff() == 0.0);

  LinearDataSpec other = spec;
  other.seed = 2;
  CHECK((obs.y - generate_linear(other).y).cwiseAbs().maxCoeff() > 0.0);

  LinearDataSpec bad = spec;
  bad.n_points = 1;
  CHECK_THROWS_AS(generate_linear(bad), std::invalid_argument);
}

TEST_CASE("line data scatters around the prescribed slope") {
  LinearDataSpec spec;
  const ObservationSet obs = generate_linear(spec);
  // Least-squares slope through the origin; the per-point latent slopes
  // average out near their mean of 4.
  const double slope = obs.x.dot(obs.y) / obs.x.dot(obs.x);
  CHECK(slope > 3.4);
  CHECK(slope < 4.6);
  // The scatter is dominated by the slope spread, not the 0.01 noise floor.
  const Eigen::VectorXd residual = obs.y - slope * obs.x;
  CHECK(std::sqrt(residual.squaredNorm() / 119.0) > 0.1);
}

TEST_CASE("offset and outlier variants shift the base draw exactly") {
  LinearDataSpec base;
  const ObservationSet plain = generate_linear(base);

  LinearDataSpec offset = base;
  offset.variant = LinearDataSpec::Variant::Offset;
  offset.shift = 2.0;
  const ObservationSet shifted = generate_linear(offset);
  // Same seed, same noise draw; difference is the shift up to one rounding.
  CHECK(((shifted.y - plain.y).array() - 2.0).abs().maxCoeff() < 1e-12);

  LinearDataSpec outlier = base;
  outlier.variant = LinearDataSpec::Variant::Outliers;
  outlier.shift = 2.0;
  const ObservationSet dipped = generate_linear(outlier);
  int flagged = 0;
  for (Eigen::Index i = 0; i < plain.x.size(); ++i) {
    if (plain.x[i] >= 0.6 && plain.x[i] <= 0.7) {
      CHECK(dipped.y[i] == plain.y[i] - 2.0);
      ++flagged;
    } else {
      CHECK(dipped.y[i] == plain.y[i]);
    }
  }
  CHECK(flagged > 10);
  CHECK(flagged < 30);
}

TEST_CASE("component-wise mixture of steel and concrete") {
  const Material steel = steel_material();
  const Material concrete = concrete_material();

  const Material mix = voigt_mix(steel, concrete, 0.283);
  CHECK(mix.rho == doctest::Approx(3870.65).epsilon(1e-10));
  CHECK(mix.cp == doctest::Approx(769.82).epsilon(1e-10));
  CHECK(mix.k == doctest::Approx(16.716).epsilon(1e-10));
  CHECK(mix.diffusivity() > concrete.diffusivity());

  const Material zero = voigt_mix(steel, concrete, 0.0);
  CHECK(zero.rho == concrete.rho);
  CHECK(zero.k == concrete.k);
  const Material one = voigt_mix(steel, concrete, 1.0);
  CHECK(one.cp == steel.cp);
  CHECK_THROWS_AS(voigt_mix(steel, concrete, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(voigt_mix(steel, concrete, 1.1), std::invalid_argument);

  // Mixture rule is affine in the fraction.
  const Material half = voigt_mix(steel, concrete, 0.5);
  CHECK(half.rho == doctest::Approx(0.5 * (steel.rho + concrete.rho)).epsilon(1e-14));

  // One 12 mm bar in a 20 mm x 20 mm cell.
  CHECK(std::abs(reinforcement_steel_fraction() - 0.283) < 6e-4);
}

TEST_CASE("external temperature series ramp and noise structure") {
  ExternalSeriesSpec spec;
  const CounterRng root(11);
  const Eigen::VectorXd series = external_temperature_series(spec, 40, root);
  REQUIRE(series.size() == 41);

  // Entries before the 29-minute mark follow the deterministic ramp.
  CHECK(series[0] == 273.0);
  for (int s = 0; s <= 5; ++s)
    CHECK(series[s] == doctest::Approx(273.0 + 30.0 * (5.0 * s) / 29.0).epsilon(1e-13));

  // Post-ramp entries hold near the hot value with bounded excursions.
  for (int s = 6; s <= 40; ++s) {
    CHECK(std::abs(series[s] - 303.0) < 60.0);
  }
  CHECK((series.tail(35).array() - 303.0).abs().maxCoeff() > 0.05);

  // A longer horizon extends the shorter one without reshuffling it.
  const Eigen::VectorXd longer = external_temperature_series(spec, 200, root);
  CHECK((longer.head(41) - series).cwiseAbs().maxCoeff() == 0.0);

  // Noiseless switch pins the plateau exactly.
  ExternalSeriesSpec clean = spec;
  clean.noiseless = true;
  const Eigen::VectorXd flat = external_temperature_series(clean, 40, root);
  for (int s = 6; s <= 40; ++s) CHECK(flat[s] == 303.0);

  CHECK_THROWS_AS(external_temperature_series(spec, 0, root), std::invalid_argument);
}

TEST_CASE("slow series component interpolates linearly between its knots") {
  ExternalSeriesSpec spec;
  spec.short_noise_std = 0.0;  // isolate the knot component
  const CounterRng root(3);
  const Eigen::VectorXd series = external_temperature_series(spec, 30, root);
  // Knots sit at steps 6, 11, 16, ... with straight lines between them.
  for (int knot = 6; knot + 5 <= 30; knot += 5) {
    for (int s = knot; s <= knot + 5; ++s) {
      const double frac = (s - knot) / 5.0;
      const double expected =
          (1.0 - frac) * (series[knot] - 303.0) + frac * (series[knot + 5] - 303.0);
      CHECK(series[s] - 303.0 == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  // The knot draws themselves have the 10 K scale.
  CHECK(std::abs(series[6] - 303.0) < 50.0);
}

TEST_CASE("long-run spread of the plateau noise matches its two components") {
  // Per-step N(0,1) plus interpolated N(0,10) knots: the interpolation
  // weights average (1-f)^2 + f^2 = 0.68 over a knot interval, so the
  // stationary variance is 1 + 100*0.68 = 69.
  ExternalSeriesSpec spec;
  const CounterRng root(17);
  const int steps = 10000;
  const Eigen::VectorXd series = external_temperature_series(spec, steps, root);
  const Eigen::ArrayXd tail = series.tail(steps - 6).array() - 303.0;
  const double mean = tail.mean();
  const double var = (tail - mean).square().sum() / (tail.size() - 1);
  CHECK(std::sqrt(var) == doctest::Approx(std::sqrt(69.0)).epsilon(0.12));
  CHECK(std::abs(mean) < 1.0);
}

TEST_CASE("per-element material map mixes only where the band overlaps") {
  // Mesh 10: rows are 0.04 m tall, the band [0.16, 0.18] covers half of
  // row 4 and nothing else.
  const auto mats10 = banded_materials(10, 0.4, 0.16, 0.18);
  REQUIRE(mats10.size() == 100);
  const Material concrete = concrete_material();
  const Material band =
      voigt_mix(steel_material(), concrete, reinforcement_steel_fraction());
  const Material half_row = voigt_mix(band, concrete, 0.5);
  for (int ey = 0; ey < 10; ++ey) {
    for (int ex = 0; ex < 10; ++ex) {
      const Material& m = mats10[ex + ey * 10];
      if (ey == 4) {
        CHECK(m.rho == doctest::Approx(half_row.rho).epsilon(1e-14));
        CHECK(m.k == doctest::Approx(half_row.k).epsilon(1e-14));
      } else {
        CHECK(m.rho == concrete.rho);
        CHECK(m.k == concrete.k);
      }
    }
  }

  // Mesh 20: rows are 0.02 m tall and row 8 is exactly the band.
  const auto mats20 = banded_materials(20, 0.4, 0.16, 0.18);
  CHECK(mats20[8 * 20].k == doctest::Approx(band.k).epsilon(1e-14));
  CHECK(mats20[7 * 20].k == concrete.k);
  CHECK(mats20[9 * 20].k == concrete.k);
}

TEST_CASE("reinforcement band conducts heat ahead of the surrounding concrete") {
  const int n = 20;
  const int steps = 12;  // one hour
  ExternalSeriesSpec clean;
  clean.noiseless = true;
  const Eigen::VectorXd series = external_temperature_series(clean, steps, CounterRng(1));

  ThermalModel banded(n, 0.4);
  banded.set_materials(banded_materials(n, 0.4, 0.16, 0.18));
  const Eigen::MatrixXd hist_band =
      banded.solve_transient(series.tail(steps), 300.0, 273.0);

  ThermalModel plain(n, 0.4);
  plain.set_uniform_material(concrete_material());
  const Eigen::MatrixXd hist_plain =
      plain.solve_transient(series.tail(steps), 300.0, 273.0);

  SensorLayout probes;
  probes.points.push_back({0.15, 0.17});  // inside the band, far from the hot edge
  probes.points.push_back({0.15, 0.30});  // same depth, off the band
  const Eigen::MatrixXd in_band = banded.sensor_temperatures(hist_band, probes);
  const Eigen::MatrixXd off_band = plain.sensor_temperatures(hist_plain, probes);

  // The band carries the boundary heat inward faster than plain concrete.
  CHECK(in_band(steps, 0) > in_band(steps, 1) + 0.01);
  CHECK(in_band(steps, 0) > off_band(steps, 0) + 0.01);
}

TEST_CASE("thermal dataset windows, heat record, and determinism") {
  ThermalDataSpec spec;
  spec.mesh = 6;
  spec.full_horizon_min = 300;
  const ThermalDataset data = generate_thermal(spec);

  // Training window 20..220 min at 5-min steps: 41 times x 4 sensors.
  REQUIRE(data.train.x.size() == 41 * 4);
  CHECK(data.train.x[0] == 20.0);
  CHECK(data.train.x[3] == 20.0);
  CHECK(data.train.x[4] == 25.0);
  CHECK(data.train.x[41 * 4 - 1] == 220.0);
  CHECK(data.train.sensor[0] == 1);
  CHECK(data.train.sensor[3] == 4);
  CHECK(data.train.noise_std == 0.2);

  // Testing window 20..270 min from an independent boundary realization.
  REQUIRE(data.test.x.size() == 51 * 4);
  CHECK(data.test.x[51 * 4 - 1] == 270.0);
  CHECK((data.train.y.head(16) - data.test.y.head(16)).cwiseAbs().minCoeff() > 0.0);

  // Heat record spans the full horizon with trapezoidal accumulation.
  REQUIRE(data.truth_times_min.size() == 61);
  REQUIRE(data.truth_heat_rate.size() == 61);
  REQUIRE(data.truth_cumulative.size() == 61);
  CHECK(data.truth_cumulative[0] == 0.0);
  CHECK(data.q_final == data.truth_cumulative[60]);
  CHECK(data.q_final > 0.0);
  for (int s = 0; s < 60; ++s) {
    const double inc = 0.5 * (data.truth_heat_rate[s] + data.truth_heat_rate[s + 1]) * 5.0;
    CHECK(data.truth_cumulative[s + 1] - data.truth_cumulative[s] ==
          doctest::Approx(inc).epsilon(1e-12));
  }
  // The noisy boundary can briefly dip below the plate temperature and pull
  // heat back out, so individual rates may go slightly negative; on the
  // whole the record is strongly a heating one.
  CHECK(data.truth_heat_rate.tail(60).mean() > 0.0);
  CHECK(data.truth_heat_rate.maxCoeff() > 1.0);

  REQUIRE(data.t_ext_full.size() == 61);
  CHECK(data.t_ext_full[0] == 273.0);

  // Reruns are bit-identical; a different seed moves the data.
  const ThermalDataset again = generate_thermal(spec);
  CHECK((data.train.y - again.train.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((data.t_ext_full - again.t_ext_full).cwiseAbs().maxCoeff() == 0.0);
  CHECK(data.q_final == again.q_final);

  ThermalDataSpec other = spec;
  other.seed = 9;
  const ThermalDataset moved = generate_thermal(other);
  CHECK((data.train.y - moved.train.y).cwiseAbs().maxCoeff() > 0.0);

  ThermalDataSpec bad = spec;
  bad.train_end_min = 10;
  CHECK_THROWS_AS(generate_thermal(bad), std::invalid_argument);
}
