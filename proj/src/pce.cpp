#include "embcal/pce.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace embcal {

namespace {

// Orthonormal recurrence: psi_{n+1} = (xi*psi_n - sqrt(n)*psi_{n-1}) / sqrt(n+1).
Eigen::VectorXd hermite_column(double xi, int degree) {
  Eigen::VectorXd psi(degree + 1);
  psi[0] = 1.0;
  if (degree >= 1) psi[1] = xi;
  for (int n = 1; n < degree; ++n)
    psi[n + 1] = (xi * psi[n] - std::sqrt(double(n)) * psi[n - 1]) / std::sqrt(double(n + 1));
  return psi;
}

void enumerate_indices(int dims, int remaining, int pos, Eigen::VectorXi& current,
                       std::vector<Eigen::VectorXi>& out) {
  if (pos == dims - 1) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[pos] = k;
    enumerate_indices(dims, remaining - k, pos + 1, current, out);
  }
}

// Golub-Welsch on the Jacobi matrix of the probabilists' recurrence
// (zero diagonal, off-diagonal sqrt(k)). Weights include the unit total
// mass of the Gaussian measure.
void gauss_hermite(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (order == 1) {
    nodes = Eigen::VectorXd::Zero(1);
    weights = Eigen::VectorXd::Ones(1);
    return;
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(double(k));
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolve failed");
  nodes = eig.eigenvalues();
  weights = eig.eigenvectors().row(0).array().square();
}

}  // namespace

Eigen::VectorXd HermiteBasis::evaluate(const Eigen::VectorXd& xi) const {
  if (xi.size() != dims) throw std::invalid_argument("basis: wrong germ dimension");
  Eigen::MatrixXd table(degree + 1, dims);
  for (int d = 0; d < dims; ++d) table.col(d) = hermite_column(xi[d], degree);
  Eigen::VectorXd values(size());
  for (int j = 0; j < size(); ++j) {
    double v = 1.0;
    for (int d = 0; d < dims; ++d) v *= table(index(j, d), d);
    values[j] = v;
  }
  return values;
}

HermiteBasis build_basis(int dims, int degree) {
  if (dims < 1) throw std::invalid_argument("build_basis: dims must be >= 1");
  if (degree < 0) throw std::invalid_argument("build_basis: degree must be >= 0");
  std::vector<Eigen::VectorXi> rows;
  Eigen::VectorXi current(dims);
  for (int total = 0; total <= degree; ++total) enumerate_indices(dims, total, 0, current, rows);
  HermiteBasis basis;
  basis.dims = dims;
  basis.degree = degree;
  basis.index.resize(static_cast<Eigen::Index>(rows.size()), dims);
  for (Eigen::Index j = 0; j < basis.index.rows(); ++j) basis.index.row(j) = rows[j].transpose();
  return basis;
}

QuadratureRule build_quadrature(int dims, int order) {
  if (dims < 1) throw std::invalid_argument("build_quadrature: dims must be >= 1");
  if (order < 1) throw std::invalid_argument("build_quadrature: order must be >= 1");
  Eigen::VectorXd nodes1, weights1;
  gauss_hermite(order, nodes1, weights1);

  int points = 1;
  for (int d = 0; d < dims; ++d) points *= order;
  QuadratureRule rule;
  rule.nodes.resize(points, dims);
  rule.weights.resize(points);
  for (int k = 0; k < points; ++k) {
    int rest = k;
    double w = 1.0;
    for (int d = dims - 1; d >= 0; --d) {
      const int i = rest % order;
      rest /= order;
      rule.nodes(k, d) = nodes1[i];
      w *= weights1[i];
    }
    rule.weights[k] = w;
  }
  return rule;
}

StochasticResponse project(const ForwardModel& model, const Eigen::VectorXd& means,
                           const Eigen::VectorXd& scales, const HermiteBasis& basis,
                           const QuadratureRule& quad) {
  const Eigen::Index dim = means.size();
  if (scales.size() != dim) throw std::invalid_argument("project: means/scales length mismatch");
  if (dim != model.input_dim()) throw std::invalid_argument("project: model input dim mismatch");
  if (basis.dims != dim || quad.dims() != dim)
    throw std::invalid_argument("project: basis/quadrature dimension mismatch");
  if (scales.minCoeff() < 0.0) throw std::invalid_argument("project: negative scale");

  const int P = quad.points();
  const int D = basis.size();
  const int n_out = model.output_dim();

  // W(k, j) = w_k * Psi_j(xi_k)
  Eigen::MatrixXd weighted(P, D);
  Eigen::MatrixXd values(n_out, P);
  for (int k = 0; k < P; ++k) {
    const Eigen::VectorXd xi = quad.nodes.row(k).transpose();
    weighted.row(k) = quad.weights[k] * basis.evaluate(xi).transpose();
    const Eigen::VectorXd theta = means + scales.cwiseProduct(xi);
    try {
      values.col(k) = model.evaluate(theta);
    } catch (const ModelDomainError& e) {
      throw ModelDomainError("quadrature node " + std::to_string(k) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("model evaluation at quadrature node " + std::to_string(k) +
                               " failed: " + e.what());
    }
  }
  StochasticResponse response;
  response.coeff = values * weighted;
  return response;
}

void moments(const StochasticResponse& response, Eigen::VectorXd& mu, Eigen::VectorXd& sigma) {
  const Eigen::Index n = response.coeff.rows();
  const Eigen::Index D = response.coeff.cols();
  if (D < 1) throw std::invalid_argument("moments: empty response");
  mu = response.coeff.col(0);
  sigma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    sigma[i] = response.coeff.row(i).tail(D - 1).norm();
}

}  // namespace embcal
