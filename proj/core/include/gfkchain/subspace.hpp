#pragma once

// PCA subspaces and the principal-angle (cosine-sine) factorization that the
// geodesic flow between two subspaces is built from.

#include <Eigen/Dense>

namespace gfkchain::subspace {

/// A d-dimensional subspace of R^D stored as a D x d matrix with orthonormal
/// columns, 1 <= d <= D/2.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  /// Validates orthonormality (1e-10) and the dimension bound; throws
  /// DomainError otherwise.
  explicit SubspaceBasis(Eigen::MatrixXd basis);

  [[nodiscard]] const Eigen::MatrixXd& basis() const { return basis_; }
  [[nodiscard]] int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  [[nodiscard]] int subspace_dim() const { return static_cast<int>(basis_.cols()); }

 private:
  Eigen::MatrixXd basis_;
};

inline constexpr double kOrthonormalityTolerance = 1e-10;

/// Top-d principal directions of the column-centred data (n x D), ordered by
/// descending explained variance. Each column is signed so that its
/// largest-magnitude entry is positive.
/// Throws DomainError for d outside [1, D/2] or n < 2, DegenerateError when
/// the centred data has rank below d.
SubspaceBasis pca_basis(const Eigen::MatrixXd& features, int d);

/// Fraction of total variance explained by each principal direction
/// (descending). All zeros for constant data.
Eigen::VectorXd explained_variance_ratio(const Eigen::MatrixXd& features);

/// Smallest d at which both domains reach `variance_threshold` of explained
/// variance, clamped to [1, floor(D/2)].
int select_dimension(const Eigen::MatrixXd& features_src, const Eigen::MatrixXd& features_tgt,
                     double variance_threshold);

/// D x D orthogonal Q = [S, R] whose first d columns are exactly the basis.
Eigen::MatrixXd orthogonal_completion(const SubspaceBasis& basis);

/// Factorization of Q^T S2 for the flow from S1 to S2:
///   S1^T S2 =  V1 diag(cos theta) V^T
///   R1^T S2 = -V2 diag(sin theta) V^T
struct FlowDecomposition {
  Eigen::MatrixXd completion;        // Q = [S1, R1], D x D
  Eigen::MatrixXd rot_top;           // V1, d x d
  Eigen::MatrixXd rot_bottom;        // V2 (tilde), (D-d) x d
  Eigen::MatrixXd rot_right;         // V, d x d
  Eigen::VectorXd principal_angles;  // ascending, in [0, pi/2]

  [[nodiscard]] int ambient_dim() const { return static_cast<int>(completion.rows()); }
  [[nodiscard]] int subspace_dim() const { return static_cast<int>(rot_top.rows()); }
  [[nodiscard]] Eigen::MatrixXd source_basis() const;
  [[nodiscard]] Eigen::MatrixXd complement() const;
};

/// Angles with sin(theta) below this are treated as zero when building V2.
inline constexpr double kSmallSineThreshold = 1e-6;

/// Principal decomposition using the completion from orthogonal_completion.
FlowDecomposition principal_decomposition(const SubspaceBasis& src, const SubspaceBasis& tgt);

/// Same, with a caller-supplied completion (its first d columns must equal
/// the source basis). Lets callers check invariance to the choice of R1.
FlowDecomposition principal_decomposition(const SubspaceBasis& src, const SubspaceBasis& tgt,
                                          const Eigen::MatrixXd& completion);

}  // namespace gfkchain::subspace
