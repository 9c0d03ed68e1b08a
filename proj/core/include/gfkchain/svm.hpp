#pragma once

// Binary C-SVM on a precomputed kernel, trained by sequential minimal
// optimization with maximal-violating-pair working set selection.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gfkchain::svm {

enum class Label : std::int8_t { damaged = -1, healthy = 1 };

inline double sign_of(Label y) { return static_cast<double>(static_cast<int>(y)); }

struct SvmOptions {
  double regularization = 1.0;  // C
  double tolerance = 1e-5;      // stop when the maximal KKT violation drops below
  long max_iterations = 100000;
};

struct SvmModel {
  Eigen::VectorXd alpha;              // dual variables, [0, C]
  Eigen::VectorXd dual_coefficients;  // alpha_i y_i
  double bias = 0.0;
  std::vector<int> support_indices;   // alpha_i > 1e-8 C
  double regularization = 1.0;
  long iterations = 0;
  double kkt_gap = 0.0;  // final maximal violation m(alpha) - M(alpha)
  bool converged = false;
  double objective = 0.0;  // dual objective, minimization form
};

/// Trains on an n x n Gram matrix. Throws DomainError on shape mismatch or
/// bad options, DegenerateError when only one class is present, NumericError
/// when the Gram matrix is not positive semidefinite.
SvmModel train(const Eigen::MatrixXd& gram, const std::vector<Label>& labels,
               const SvmOptions& options = {});

/// f(x) = sum_i alpha_i y_i K(x_i, x) + b, for a test-by-train kernel block.
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& test_by_train);

/// sign(f), with f = 0 mapped to healthy.
std::vector<Label> predict(const SvmModel& model, const Eigen::MatrixXd& test_by_train);

/// 0.5 a^T Q a - e^T a with Q_ij = y_i y_j K_ij.
double dual_objective(const Eigen::MatrixXd& gram, const std::vector<Label>& labels,
                      const Eigen::VectorXd& alpha);

/// Maximal KKT violation m(alpha) - M(alpha) of a feasible point, clamped at 0.
double kkt_violation(const Eigen::MatrixXd& gram, const std::vector<Label>& labels,
                     const Eigen::VectorXd& alpha, double regularization);

inline constexpr double kPsdRepairTolerance = 1e-9;

/// True when K + 1e-9 trace(K)/n I admits a Cholesky factorization.
bool is_positive_semidefinite(const Eigen::MatrixXd& gram);

/// Symmetrized copy of the Gram matrix. If it is not PSD, negative
/// eigenvalues down to -1e-9 max|eigenvalue| are clamped to zero; anything
/// more negative throws NumericError.
Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& gram);

}  // namespace gfkchain::svm
