#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "embcal/problem.hpp"
#include "embcal/thermal.hpp"

namespace embcal {

// Synthetic line data: latent slope redrawn per point, so no single slope
// reproduces the set. Variants shift all points (Offset) or only the points
// with x in [outlier_lo, outlier_hi] downward (Outliers).
struct LinearDataSpec {
  enum class Variant { Plain, Offset, Outliers };

  int n_points = 120;
  double x_lo = 0.4;
  double x_hi = 1.0;
  double slope_mean = 4.0;
  double slope_std = 1.0;
  double noise_std = 0.01;  // also recorded as the prescribed noise
  Variant variant = Variant::Plain;
  double shift = 0.0;
  double outlier_lo = 0.6;
  double outlier_hi = 0.7;
  std::uint64_t seed = 1;
};

ObservationSet generate_linear(const LinearDataSpec& spec);

// Component-wise Voigt mixture of (rho, cp, k) with steel fraction f.
Material voigt_mix(const Material& steel, const Material& concrete, double f);

// Generative-side constants for the heat example.
Material concrete_material();   // rho 2300, cp 900, k 2.0
Material steel_material();      // rho 7850, cp 440, k 54.0
double reinforcement_steel_fraction();  // bar area over cell area, ~0.283

// External temperature series at 5-minute steps: a linear ramp from t0 to
// t_hot over the first ramp_minutes, then t_hot plus a per-step N(0, 1 K)
// component and a linearly interpolated N(0, 10 K) knot component drawn
// every knot_every steps starting at the first post-ramp step. Entry s is
// the value at minute 5*s; entry 0 equals t0. Noise streams are indexed by
// step, so a longer horizon extends rather than reshuffles a shorter one.
struct ExternalSeriesSpec {
  double t0 = 273.0;
  double t_hot = 303.0;
  double ramp_minutes = 29.0;
  double step_minutes = 5.0;
  double short_noise_std = 1.0;
  double knot_noise_std = 10.0;
  int knot_every = 5;
  bool noiseless = false;
};

Eigen::VectorXd external_temperature_series(const ExternalSeriesSpec& spec, int steps,
                                            const CounterRng& stream_root);

struct ThermalDataSpec {
  int mesh = 20;
  double side = 0.4;
  double dt_seconds = 300.0;
  int train_start_min = 20;
  int train_end_min = 220;
  int test_end_min = 270;
  int full_horizon_min = 5000;
  double band_lo = 0.16;  // reinforcement band in y, meters
  double band_hi = 0.18;
  double output_noise_std = 0.2;  // K, also the prescribed noise
  double x_mid = 0.2;
  ExternalSeriesSpec series;
  std::uint64_t seed = 1;
};

// Truth run (training window is a prefix of the full horizon), independent
// testing run, and the noiseless cumulative-heat record. Cumulative heat is
// the rate in W integrated over minutes, positive toward the insulated side.
struct ThermalDataset {
  ObservationSet train;
  ObservationSet test;
  Eigen::VectorXd truth_times_min;     // full horizon, every step
  Eigen::VectorXd truth_heat_rate;     // W per unit depth, toward insulated side
  Eigen::VectorXd truth_cumulative;    // W*min per unit depth
  Eigen::VectorXd t_ext_full;          // truth-run boundary series
  double q_final = 0.0;                // truth_cumulative at the horizon end
};

ThermalDataset generate_thermal(const ThermalDataSpec& spec);

// Sensor positions T1..T4 used by the heat example.
SensorLayout default_sensor_layout();

// Per-element material map with the reinforcement band Voigt-mixed by the
// band's area overlap with each element row.
std::vector<Material> banded_materials(int n, double side, double band_lo, double band_hi);

}  // namespace embcal
