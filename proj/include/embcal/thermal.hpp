#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

#include "embcal/forward_model.hpp"

namespace embcal {

// Homogeneous material; conductivity is the stored quantity, diffusivity
// derived through k = alpha * rho * cp.
struct Material {
  double rho = 0.0;  // kg/m^3
  double cp = 0.0;   // J/(kg K)
  double k = 0.0;    // W/(m K)

  double diffusivity() const { return k / (rho * cp); }

  static Material from_conductivity(double rho, double cp, double k);
  static Material from_diffusivity(double rho, double cp, double alpha);
};

struct SensorLayout {
  std::vector<Eigen::Vector2d> points;
};

// Transient heat conduction on the unit-depth square [0, side]^2 meshed
// with n x n bilinear quadrilaterals, 2x2 Gauss integration. The right
// edge carries a prescribed temperature, all other edges are insulated.
// Time stepping is backward Euler with the boundary value taken at the
// end of each step.
class ThermalModel {
 public:
  ThermalModel(int n, double side);

  int elements_per_side() const { return n_; }
  int node_count() const { return (n_ + 1) * (n_ + 1); }
  double element_size() const { return h_; }
  double side() const { return side_; }
  Eigen::Vector2d node_coord(int node) const;

  // Element materials, row-major (index = ex + ey * n); assembles the
  // system matrices immediately.
  void set_materials(const std::vector<Material>& materials);
  void set_uniform_material(const Material& material);
  const Material& material_at(int ex, int ey) const;

  // t_ext[s] is the right-edge temperature at the end of step s+1; the
  // initial field is uniform at t0. Returns (steps + 1) x nodes.
  Eigen::MatrixXd solve_transient(const Eigen::VectorXd& t_ext, double dt, double t0) const;

  // Bilinear interpolation at each sensor for every stored step.
  Eigen::MatrixXd sensor_temperatures(const Eigen::MatrixXd& history,
                                      const SensorLayout& layout) const;

  // Heat rate [W per unit depth] crossing the vertical line x = x_mid with
  // outward normal +x: integral over y of -k dT/dx, trapezoidal in y per
  // element row. On an element boundary the left element is used.
  Eigen::VectorXd midline_heat_rate(const Eigen::MatrixXd& history, double x_mid) const;

  // Thermal energy content sum(rho*cp*T) over the domain, consistent mass.
  double total_energy(const Eigen::VectorXd& field) const;

  // Heat [J per unit depth] delivered through the prescribed-temperature
  // edge during each step, from the discrete residual at constrained nodes
  // (backward Euler consistency: the series sums to the energy change).
  Eigen::VectorXd step_boundary_heat(const Eigen::MatrixXd& history,
                                     const Eigen::VectorXd& t_ext, double dt) const;

  const Eigen::SparseMatrix<double>& mass() const { return mass_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  const std::vector<int>& edge_nodes() const { return edge_nodes_; }

 private:
  int n_;
  double side_;
  double h_;
  std::vector<Material> materials_;
  std::vector<int> free_nodes_;
  std::vector<int> edge_nodes_;  // right edge, prescribed temperature
  bool assembled_ = false;
  Eigen::SparseMatrix<double> mass_;
  Eigen::SparseMatrix<double> stiffness_;
};

// Trapezoidal cumulative integral of a rate series over `times`; units
// follow the inputs (rate in W and times in seconds gives J).
Eigen::VectorXd cumulative_heat(const Eigen::VectorXd& rate, const Eigen::VectorXd& times);

// Isotropic forward model for calibration: parameter alpha [m^2/s] maps to
// sensor temperatures on a fixed sampling grid, driven by a fixed external
// temperature series. Mass and unit-conductivity stiffness are assembled
// once; each evaluation refactorizes and marches the horizon.
// alpha <= 0 raises ModelDomainError.
class IsotropicSensorModel : public ForwardModel {
 public:
  IsotropicSensorModel(int n, double side, double rho, double cp, Eigen::VectorXd t_ext,
                       double dt, double t0, SensorLayout layout, std::vector<int> sample_steps);

  int input_dim() const override { return 1; }
  int output_dim() const override {
    return static_cast<int>(sample_steps_.size() * layout_.points.size());
  }
  // Sensor temperatures at the sampling steps, time-major (all sensors at
  // the first step, then the next step, ...).
  Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const override;

  // Full nodal history for one alpha, on the shared assembly.
  Eigen::MatrixXd history(double alpha) const;

  const ThermalModel& grid() const { return grid_; }

 protected:
  ThermalModel grid_;  // geometry + unit-conductivity assembly
  double rho_, cp_, dt_, t0_;
  Eigen::VectorXd t_ext_;
  SensorLayout layout_;
  std::vector<int> sample_steps_;
};

// Same machinery with the per-step heat rate crossing x = x_mid as output,
// sign-flipped so that heat flowing from the hot edge toward the insulated
// side is positive. Output has one entry per stored step (horizon + 1).
class IsotropicMidlineHeatModel : public IsotropicSensorModel {
 public:
  IsotropicMidlineHeatModel(int n, double side, double rho, double cp, Eigen::VectorXd t_ext,
                            double dt, double t0, double x_mid);

  int output_dim() const override { return static_cast<int>(t_ext_.size()) + 1; }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const override;

 private:
  double x_mid_;
};

}  // namespace embcal
