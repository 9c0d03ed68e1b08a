#pragma once

// Geodesic flow between two subspaces and the geodesic flow kernel: the
// closed-form D x D matrix G with x_i^T G x_j equal to the inner product of
// the projections of x_i and x_j integrated along the whole flow.

#include <iosfwd>

#include <Eigen/Dense>

#include "gfkchain/subspace.hpp"

namespace gfkchain::gfk {

/// Symmetric positive semidefinite kernel matrix.
class GfkMatrix {
 public:
  GfkMatrix() = default;
  /// Symmetrizes, checks the spectrum, and clamps eigenvalues in
  /// (-1e-9 * max, 0) to zero. Throws NumericError for anything worse.
  explicit GfkMatrix(const Eigen::MatrixXd& matrix);

  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return matrix_; }
  [[nodiscard]] int dimension() const { return static_cast<int>(matrix_.rows()); }

 private:
  Eigen::MatrixXd matrix_;
};

inline constexpr double kPsdRelativeTolerance = 1e-9;

/// Diagonal weights of the closed form at a principal angle.
struct FlowWeights {
  double lambda1;  // 1 + sin(2t)/(2t)
  double lambda2;  // (cos(2t) - 1)/(2t)
  double lambda3;  // 1 - sin(2t)/(2t)
};

/// Below this angle the weights use their Taylor expansions.
inline constexpr double kSmallAngle = 1e-4;

FlowWeights flow_weights(double theta);

/// Phi(t) = Q [V1 cos(t theta); -V2 sin(t theta)], D x d. t in [0, 1].
Eigen::MatrixXd flow_point(const subspace::FlowDecomposition& decomp, double t);

/// Closed-form kernel. Normalized so that identical subspaces give 2 S S^T.
GfkMatrix gfk_matrix(const subspace::FlowDecomposition& decomp);

/// Trapezoid rule with n_steps intervals for 2 * integral_0^1 Phi Phi^T dt,
/// the same normalization as gfk_matrix. Independent check of the closed form.
GfkMatrix quadrature_oracle(const subspace::FlowDecomposition& decomp, int n_steps);

/// rows (n1 x D) * G * cols^T (n2 x D).
Eigen::MatrixXd gram(const GfkMatrix& g, const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols);

/// Debug dump, one row per line, comma separated, full precision.
void write_csv(const GfkMatrix& g, std::ostream& out);

}  // namespace gfkchain::gfk
