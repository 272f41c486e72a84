#include "embcal/thermal.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <string>

namespace embcal {

Material Material::from_conductivity(double rho, double cp, double k) {
  if (!(rho > 0.0 && cp > 0.0 && k > 0.0))
    throw std::invalid_argument("Material: properties must be positive");
  return {rho, cp, k};
}

Material Material::from_diffusivity(double rho, double cp, double alpha) {
  if (!(rho > 0.0 && cp > 0.0 && alpha > 0.0))
    throw std::invalid_argument("Material: properties must be positive");
  return {rho, cp, alpha * rho * cp};
}

namespace {

// Bilinear shape functions on [-1, 1]^2, nodes counterclockwise from (-1, -1).
void shape(double xi, double eta, double n[4], double dxi[4], double deta[4]) {
  n[0] = 0.25 * (1 - xi) * (1 - eta);
  n[1] = 0.25 * (1 + xi) * (1 - eta);
  n[2] = 0.25 * (1 + xi) * (1 + eta);
  n[3] = 0.25 * (1 - xi) * (1 + eta);
  dxi[0] = -0.25 * (1 - eta);
  dxi[1] = 0.25 * (1 - eta);
  dxi[2] = 0.25 * (1 + eta);
  dxi[3] = -0.25 * (1 + eta);
  deta[0] = -0.25 * (1 - xi);
  deta[1] = -0.25 * (1 + xi);
  deta[2] = 0.25 * (1 + xi);
  deta[3] = 0.25 * (1 - xi);
}

// 2x2 Gauss element matrices for a square of size h: mass scaled by
// rho*cp, conduction by k.
void element_matrices(double h, double rho_cp, double k, Eigen::Matrix4d& me,
                      Eigen::Matrix4d& ke) {
  me.setZero();
  ke.setZero();
  const double g = 1.0 / std::sqrt(3.0);
  const double det_j = 0.25 * h * h;
  const double inv_j = 2.0 / h;
  double n[4], dxi[4], deta[4];
  for (const double xi : {-g, g}) {
    for (const double eta : {-g, g}) {
      shape(xi, eta, n, dxi, deta);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          me(i, j) += rho_cp * n[i] * n[j] * det_j;
          ke(i, j) += k * (dxi[i] * dxi[j] + deta[i] * deta[j]) * inv_j * inv_j * det_j;
        }
      }
    }
  }
}

// Backward Euler marcher on the free/constrained node partition of
// A = M + dt*K, Cholesky-factorized once per material state.
class TransientSolver {
 public:
  TransientSolver(const Eigen::SparseMatrix<double>& mass,
                  const Eigen::SparseMatrix<double>& system, const std::vector<int>& free_nodes,
                  const std::vector<int>& edge_nodes)
      : mass_(mass), free_(free_nodes), edge_(edge_nodes) {
    const int nodes = static_cast<int>(mass.rows());
    node_to_free_.assign(nodes, -1);
    for (size_t i = 0; i < free_.size(); ++i) node_to_free_[free_[i]] = static_cast<int>(i);
    std::vector<char> on_edge(nodes, 0);
    for (int c : edge_) on_edge[c] = 1;

    std::vector<Eigen::Triplet<double>> ff;
    Eigen::VectorXd fc = Eigen::VectorXd::Zero(free_.size());
    for (int col = 0; col < system.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(system, col); it; ++it) {
        const int fr = node_to_free_[it.row()];
        if (fr < 0) continue;
        if (on_edge[col]) {
          fc[fr] += it.value();  // edge value is spatially uniform
        } else {
          ff.emplace_back(fr, node_to_free_[col], it.value());
        }
      }
    }
    Eigen::SparseMatrix<double> a_ff(free_.size(), free_.size());
    a_ff.setFromTriplets(ff.begin(), ff.end());
    edge_column_ = fc;
    factor_.compute(a_ff);
    if (factor_.info() != Eigen::Success)
      throw std::runtime_error("thermal: factorization failed");
  }

  Eigen::MatrixXd march(const Eigen::VectorXd& t_ext, double t0) const {
    const int nodes = static_cast<int>(mass_.rows());
    const auto steps = t_ext.size();
    Eigen::MatrixXd history(steps + 1, nodes);
    Eigen::VectorXd temp = Eigen::VectorXd::Constant(nodes, t0);
    history.row(0) = temp.transpose();
    Eigen::VectorXd rhs(free_.size());
    for (Eigen::Index s = 0; s < steps; ++s) {
      const Eigen::VectorXd mt = mass_ * temp;
      for (size_t i = 0; i < free_.size(); ++i) rhs[i] = mt[free_[i]];
      rhs -= t_ext[s] * edge_column_;
      const Eigen::VectorXd free_temp = factor_.solve(rhs);
      for (size_t i = 0; i < free_.size(); ++i) temp[free_[i]] = free_temp[i];
      for (int c : edge_) temp[c] = t_ext[s];
      history.row(s + 1) = temp.transpose();
    }
    return history;
  }

 private:
  const Eigen::SparseMatrix<double>& mass_;
  const std::vector<int>& free_;
  const std::vector<int>& edge_;
  std::vector<int> node_to_free_;
  Eigen::VectorXd edge_column_;  // A_fc summed across edge columns
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor_;
};

}  // namespace

ThermalModel::ThermalModel(int n, double side) : n_(n), side_(side) {
  if (n < 2) throw std::invalid_argument("ThermalModel: need at least 2 elements per side");
  if (!(side > 0.0)) throw std::invalid_argument("ThermalModel: side must be positive");
  h_ = side_ / n_;
  for (int j = 0; j <= n_; ++j) {
    for (int i = 0; i <= n_; ++i) {
      const int node = i + j * (n_ + 1);
      (i == n_ ? edge_nodes_ : free_nodes_).push_back(node);
    }
  }
}

Eigen::Vector2d ThermalModel::node_coord(int node) const {
  const int i = node % (n_ + 1);
  const int j = node / (n_ + 1);
  return {i * h_, j * h_};
}

void ThermalModel::set_materials(const std::vector<Material>& materials) {
  if (static_cast<int>(materials.size()) != n_ * n_)
    throw std::invalid_argument("ThermalModel: one material per element required");
  materials_ = materials;

  const int nodes = node_count();
  std::vector<Eigen::Triplet<double>> tm, tk;
  tm.reserve(16 * materials_.size());
  tk.reserve(16 * materials_.size());
  Eigen::Matrix4d me, ke;
  for (int ey = 0; ey < n_; ++ey) {
    for (int ex = 0; ex < n_; ++ex) {
      const Material& mat = materials_[ex + ey * n_];
      element_matrices(h_, mat.rho * mat.cp, mat.k, me, ke);
      const int conn[4] = {ex + ey * (n_ + 1), ex + 1 + ey * (n_ + 1),
                           ex + 1 + (ey + 1) * (n_ + 1), ex + (ey + 1) * (n_ + 1)};
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          tm.emplace_back(conn[i], conn[j], me(i, j));
          tk.emplace_back(conn[i], conn[j], ke(i, j));
        }
      }
    }
  }
  mass_.resize(nodes, nodes);
  stiffness_.resize(nodes, nodes);
  mass_.setFromTriplets(tm.begin(), tm.end());
  stiffness_.setFromTriplets(tk.begin(), tk.end());
  assembled_ = true;
}

void ThermalModel::set_uniform_material(const Material& material) {
  set_materials(std::vector<Material>(n_ * n_, material));
}

const Material& ThermalModel::material_at(int ex, int ey) const {
  if (!assembled_) throw std::logic_error("ThermalModel: materials not set");
  if (ex < 0 || ex >= n_ || ey < 0 || ey >= n_)
    throw std::out_of_range("ThermalModel: element index");
  return materials_[ex + ey * n_];
}

Eigen::MatrixXd ThermalModel::solve_transient(const Eigen::VectorXd& t_ext, double dt,
                                              double t0) const {
  if (!assembled_) throw std::logic_error("ThermalModel: materials not set");
  if (!(dt > 0.0)) throw std::invalid_argument("ThermalModel: dt must be positive");
  const Eigen::SparseMatrix<double> system = mass_ + dt * stiffness_;
  return TransientSolver(mass_, system, free_nodes_, edge_nodes_).march(t_ext, t0);
}

Eigen::MatrixXd ThermalModel::sensor_temperatures(const Eigen::MatrixXd& history,
                                                  const SensorLayout& layout) const {
  if (history.cols() != node_count())
    throw std::invalid_argument("sensor_temperatures: history width mismatch");
  const auto n_sensors = static_cast<Eigen::Index>(layout.points.size());
  Eigen::MatrixXd out(history.rows(), n_sensors);
  for (Eigen::Index s = 0; s < n_sensors; ++s) {
    const Eigen::Vector2d& p = layout.points[s];
    if (p.x() < 0 || p.x() > side_ || p.y() < 0 || p.y() > side_)
      throw std::invalid_argument("sensor_temperatures: point outside domain");
    const int ex = std::min(static_cast<int>(p.x() / h_), n_ - 1);
    const int ey = std::min(static_cast<int>(p.y() / h_), n_ - 1);
    const double u = p.x() / h_ - ex;
    const double v = p.y() / h_ - ey;
    const int bl = ex + ey * (n_ + 1);
    const int br = bl + 1;
    const int tl = bl + (n_ + 1);
    const int tr = tl + 1;
    out.col(s) = (1 - u) * (1 - v) * history.col(bl) + u * (1 - v) * history.col(br) +
                 u * v * history.col(tr) + (1 - u) * v * history.col(tl);
  }
  return out;
}

Eigen::VectorXd ThermalModel::midline_heat_rate(const Eigen::MatrixXd& history,
                                                double x_mid) const {
  if (!assembled_) throw std::logic_error("ThermalModel: materials not set");
  if (history.cols() != node_count())
    throw std::invalid_argument("midline_heat_rate: history width mismatch");
  if (!(x_mid > 0.0 && x_mid < side_))
    throw std::invalid_argument("midline_heat_rate: x_mid must be interior");
  // Element column containing the line; exact boundaries resolve left.
  const int ex = std::min(std::max(static_cast<int>(std::floor(x_mid / h_ - 1e-9)), 0), n_ - 1);
  Eigen::VectorXd rate = Eigen::VectorXd::Zero(history.rows());
  for (int ey = 0; ey < n_; ++ey) {
    const double k = materials_[ex + ey * n_].k;
    const int bl = ex + ey * (n_ + 1);
    const int br = bl + 1;
    const int tl = bl + (n_ + 1);
    const int tr = tl + 1;
    // dT/dx of a bilinear patch does not depend on x; trapezoid over the
    // row gives -(k/2) * ((T_br - T_bl) + (T_tr - T_tl)).
    rate -= 0.5 * k *
            (history.col(br) - history.col(bl) + history.col(tr) - history.col(tl));
  }
  return rate;
}

double ThermalModel::total_energy(const Eigen::VectorXd& field) const {
  if (!assembled_) throw std::logic_error("ThermalModel: materials not set");
  if (field.size() != node_count()) throw std::invalid_argument("total_energy: field size");
  return (mass_ * field).sum();
}

Eigen::VectorXd ThermalModel::step_boundary_heat(const Eigen::MatrixXd& history,
                                                 const Eigen::VectorXd& t_ext, double dt) const {
  if (!assembled_) throw std::logic_error("ThermalModel: materials not set");
  if (history.rows() != t_ext.size() + 1)
    throw std::invalid_argument("step_boundary_heat: history/t_ext length mismatch");
  const Eigen::SparseMatrix<double> system = mass_ + dt * stiffness_;
  Eigen::VectorXd heat(t_ext.size());
  for (Eigen::Index s = 0; s < t_ext.size(); ++s) {
    const Eigen::VectorXd residual =
        system * history.row(s + 1).transpose() - mass_ * history.row(s).transpose();
    double total = 0.0;
    for (int c : edge_nodes_) total += residual[c];
    heat[s] = total;
  }
  return heat;
}

Eigen::VectorXd cumulative_heat(const Eigen::VectorXd& rate, const Eigen::VectorXd& times) {
  if (rate.size() != times.size()) throw std::invalid_argument("cumulative_heat: length mismatch");
  Eigen::VectorXd q(rate.size());
  if (rate.size() == 0) return q;
  q[0] = 0.0;
  for (Eigen::Index i = 1; i < rate.size(); ++i)
    q[i] = q[i - 1] + 0.5 * (times[i] - times[i - 1]) * (rate[i] + rate[i - 1]);
  return q;
}

IsotropicSensorModel::IsotropicSensorModel(int n, double side, double rho, double cp,
                                           Eigen::VectorXd t_ext, double dt, double t0,
                                           SensorLayout layout, std::vector<int> sample_steps)
    : grid_(n, side),
      rho_(rho),
      cp_(cp),
      dt_(dt),
      t0_(t0),
      t_ext_(std::move(t_ext)),
      layout_(std::move(layout)),
      sample_steps_(std::move(sample_steps)) {
  grid_.set_uniform_material(Material::from_conductivity(rho, cp, 1.0));
  for (int s : sample_steps_)
    if (s < 0 || s > t_ext_.size())
      throw std::invalid_argument("IsotropicSensorModel: sample step outside horizon");
}

Eigen::MatrixXd IsotropicSensorModel::history(double alpha) const {
  if (!(alpha > 0.0))
    throw ModelDomainError("thermal diffusivity must be positive, got " + std::to_string(alpha));
  // k = alpha*rho*cp; the cached stiffness has unit conductivity.
  const Eigen::SparseMatrix<double> system =
      grid_.mass() + (dt_ * alpha * rho_ * cp_) * grid_.stiffness();
  return TransientSolver(grid_.mass(), system, grid_.free_nodes(), grid_.edge_nodes())
      .march(t_ext_, t0_);
}

Eigen::VectorXd IsotropicSensorModel::evaluate(const Eigen::VectorXd& theta) const {
  if (theta.size() != 1) throw std::invalid_argument("IsotropicSensorModel: one parameter");
  const Eigen::MatrixXd temps = grid_.sensor_temperatures(history(theta[0]), layout_);
  const auto n_sensors = static_cast<Eigen::Index>(layout_.points.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(sample_steps_.size()) * n_sensors);
  Eigen::Index at = 0;
  for (int step : sample_steps_)
    for (Eigen::Index s = 0; s < n_sensors; ++s) out[at++] = temps(step, s);
  return out;
}

IsotropicMidlineHeatModel::IsotropicMidlineHeatModel(int n, double side, double rho, double cp,
                                                     Eigen::VectorXd t_ext, double dt, double t0,
                                                     double x_mid)
    : IsotropicSensorModel(n, side, rho, cp, std::move(t_ext), dt, t0, SensorLayout{}, {}),
      x_mid_(x_mid) {}

Eigen::VectorXd IsotropicMidlineHeatModel::evaluate(const Eigen::VectorXd& theta) const {
  if (theta.size() != 1) throw std::invalid_argument("IsotropicMidlineHeatModel: one parameter");
  // The cached grid has unit conductivity, and the rate is linear in k.
  const double k = theta[0] * rho_ * cp_;
  return -k * grid_.midline_heat_rate(history(theta[0]), x_mid_);
}

}  // namespace embcal
