#include "gfkchain/geodesic_kernel.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "gfkchain/errors.hpp"

namespace gfkchain::gfk {

GfkMatrix::GfkMatrix(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw DomainError("kernel matrix must be square and non-empty");
  }
  if (!matrix.allFinite()) throw NumericError("kernel matrix has non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("kernel eigendecomposition failed");
  Eigen::VectorXd values = eig.eigenvalues();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1.0);
  if (values.minCoeff() < -kPsdRelativeTolerance * scale) {
    throw NumericError("kernel matrix is not positive semidefinite (min eigenvalue " +
                       std::to_string(values.minCoeff()) + ")");
  }
  if (values.minCoeff() < 0.0) {
    values = values.cwiseMax(0.0);
    sym = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    sym = 0.5 * (sym + sym.transpose());
  }
  matrix_ = std::move(sym);
}

FlowWeights flow_weights(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw DomainError("principal angle must be finite and non-negative");
  }
  if (theta < kSmallAngle) {
    const double u = 2.0 * theta;
    const double u2 = u * u;
    const double s = u2 / 6.0 - u2 * u2 / 120.0;  // 1 - sin(u)/u
    return {2.0 - s, -theta + theta * theta * theta / 3.0, s};
  }
  const double u = 2.0 * theta;
  const double sinc = std::sin(u) / u;
  return {1.0 + sinc, (std::cos(u) - 1.0) / u, 1.0 - sinc};
}

Eigen::MatrixXd flow_point(const subspace::FlowDecomposition& decomp, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("flow parameter t must lie in [0, 1]");
  const int dim = decomp.ambient_dim();
  const int d = decomp.subspace_dim();
  Eigen::VectorXd cos_t(d);
  Eigen::VectorXd sin_t(d);
  for (int i = 0; i < d; ++i) {
    cos_t(i) = std::cos(t * decomp.principal_angles(i));
    sin_t(i) = std::sin(t * decomp.principal_angles(i));
  }
  Eigen::MatrixXd stacked(dim, d);
  stacked.topRows(d) = decomp.rot_top * cos_t.asDiagonal();
  stacked.bottomRows(dim - d) = -decomp.rot_bottom * sin_t.asDiagonal();
  return decomp.completion * stacked;
}

GfkMatrix gfk_matrix(const subspace::FlowDecomposition& decomp) {
  const int dim = decomp.ambient_dim();
  const int d = decomp.subspace_dim();
  Eigen::VectorXd l1(d);
  Eigen::VectorXd l2(d);
  Eigen::VectorXd l3(d);
  for (int i = 0; i < d; ++i) {
    const FlowWeights w = flow_weights(decomp.principal_angles(i));
    l1(i) = w.lambda1;
    l2(i) = w.lambda2;
    l3(i) = w.lambda3;
  }
  // A = Q^T [V1 0; 0 V2]: rows of the rotated frame restricted to the flow.
  const Eigen::MatrixXd q = decomp.completion;
  const Eigen::MatrixXd a = q.leftCols(d) * decomp.rot_top;                 // S1 V1
  const Eigen::MatrixXd b = q.rightCols(dim - d) * decomp.rot_bottom;       // R1 V2
  Eigen::MatrixXd g = a * l1.asDiagonal() * a.transpose() + b * l3.asDiagonal() * b.transpose();
  const Eigen::MatrixXd cross = a * l2.asDiagonal() * b.transpose();
  g += cross + cross.transpose();
  return GfkMatrix(g);
}

GfkMatrix quadrature_oracle(const subspace::FlowDecomposition& decomp, int n_steps) {
  if (n_steps < 2) throw DomainError("quadrature needs at least 2 steps");
  const int dim = decomp.ambient_dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
  const double h = 1.0 / n_steps;
  for (int k = 0; k <= n_steps; ++k) {
    const double t = k == n_steps ? 1.0 : k * h;
    const Eigen::MatrixXd phi = flow_point(decomp, t);
    const double w = (k == 0 || k == n_steps) ? 0.5 : 1.0;
    acc.noalias() += w * phi * phi.transpose();
  }
  return GfkMatrix(2.0 * h * acc);
}

Eigen::MatrixXd gram(const GfkMatrix& g, const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols) {
  if (rows.cols() != g.dimension() || cols.cols() != g.dimension()) {
    throw DomainError("feature dimension does not match the kernel dimension");
  }
  return rows * g.matrix() * cols.transpose();
}

void write_csv(const GfkMatrix& g, std::ostream& out) {
  // Shortest representation that parses back to the same double.
  const auto& m = g.matrix();
  std::array<char, 32> buf{};
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), m(r, c));
      out.write(buf.data(), res.ptr - buf.data());
    }
    out << '\n';
  }
}

}  // namespace gfkchain::gfk
