#include "gfkchain/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "gfkchain/errors.hpp"

namespace gfkchain::subspace {
namespace {

double orthonormality_error(const Eigen::MatrixXd& m) {
  const auto k = m.cols();
  return (m.transpose() * m - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd centred(const Eigen::MatrixXd& x) {
  return x.rowwise() - x.colwise().mean();
}

// Two passes of modified Gram-Schmidt against the first `count` columns of u.
Eigen::VectorXd orthogonalize(Eigen::VectorXd w, const Eigen::MatrixXd& u, Eigen::Index count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index k = 0; k < count; ++k) w -= u.col(k).dot(w) * u.col(k);
  }
  return w;
}

}  // namespace

SubspaceBasis::SubspaceBasis(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  const auto big_d = basis_.rows();
  const auto d = basis_.cols();
  if (d < 1 || 2 * d > big_d) {
    throw DomainError("subspace dimension " + std::to_string(d) + " outside [1, " +
                      std::to_string(big_d / 2) + "]");
  }
  if (orthonormality_error(basis_) > kOrthonormalityTolerance) {
    throw DomainError("subspace basis columns are not orthonormal");
  }
}

Eigen::VectorXd explained_variance_ratio(const Eigen::MatrixXd& features) {
  const auto dim = features.cols();
  Eigen::VectorXd ratio = Eigen::VectorXd::Zero(dim);
  if (features.rows() < 2) return ratio;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred(features));
  const Eigen::VectorXd var = svd.singularValues().cwiseAbs2();
  const double total = var.sum();
  if (!(total > 0.0)) return ratio;
  ratio.head(var.size()) = var / total;
  return ratio;
}

SubspaceBasis pca_basis(const Eigen::MatrixXd& features, int d) {
  const auto n = features.rows();
  const auto dim = features.cols();
  if (n < 2) throw DomainError("PCA needs at least 2 samples");
  if (d < 1 || 2 * d > dim) {
    throw DomainError("PCA dimension " + std::to_string(d) + " outside [1, " +
                      std::to_string(dim / 2) + "]");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred(features), Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() < d || !(s(0) > 0.0) || s(d - 1) <= 1e-10 * s(0)) {
    throw DegenerateError("data rank is below the requested subspace dimension " +
                          std::to_string(d));
  }
  Eigen::MatrixXd basis = svd.matrixV().leftCols(d);
  for (int c = 0; c < d; ++c) {
    Eigen::Index at = 0;
    basis.col(c).cwiseAbs().maxCoeff(&at);
    if (basis(at, c) < 0.0) basis.col(c) *= -1.0;
  }
  return SubspaceBasis(std::move(basis));
}

int select_dimension(const Eigen::MatrixXd& features_src, const Eigen::MatrixXd& features_tgt,
                     double variance_threshold) {
  if (!(variance_threshold > 0.0 && variance_threshold < 1.0)) {
    throw DomainError("variance_threshold must lie in (0, 1)");
  }
  if (features_src.cols() != features_tgt.cols()) {
    throw DomainError("source and target feature dimensions differ");
  }
  const int dim = static_cast<int>(features_src.cols());
  const int cap = dim / 2;
  if (cap < 1) throw DomainError("feature dimension must be at least 2");

  auto needed = [&](const Eigen::MatrixXd& x) {
    const Eigen::VectorXd ratio = explained_variance_ratio(x);
    double cum = 0.0;
    for (int k = 0; k < ratio.size(); ++k) {
      cum += ratio(k);
      if (cum >= variance_threshold) return k + 1;
    }
    return ratio.sum() > 0.0 ? dim : 1;
  };
  return std::clamp(std::max(needed(features_src), needed(features_tgt)), 1, cap);
}

Eigen::MatrixXd orthogonal_completion(const SubspaceBasis& basis) {
  const auto dim = basis.ambient_dim();
  const auto d = basis.subspace_dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.basis());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  q.leftCols(d) = basis.basis();
  return q;
}

Eigen::MatrixXd FlowDecomposition::source_basis() const {
  return completion.leftCols(subspace_dim());
}

Eigen::MatrixXd FlowDecomposition::complement() const {
  return completion.rightCols(ambient_dim() - subspace_dim());
}

FlowDecomposition principal_decomposition(const SubspaceBasis& src, const SubspaceBasis& tgt) {
  return principal_decomposition(src, tgt, orthogonal_completion(src));
}

FlowDecomposition principal_decomposition(const SubspaceBasis& src, const SubspaceBasis& tgt,
                                          const Eigen::MatrixXd& completion) {
  if (src.ambient_dim() != tgt.ambient_dim() || src.subspace_dim() != tgt.subspace_dim()) {
    throw DomainError("source and target subspaces have different shapes");
  }
  const int dim = src.ambient_dim();
  const int d = src.subspace_dim();
  if (completion.rows() != dim || completion.cols() != dim) {
    throw DomainError("completion must be a D x D matrix");
  }
  if (orthonormality_error(completion) > kOrthonormalityTolerance ||
      (completion.leftCols(d) - src.basis()).cwiseAbs().maxCoeff() > kOrthonormalityTolerance) {
    throw DomainError("completion must be orthogonal and start with the source basis");
  }

  const Eigen::MatrixXd& s2 = tgt.basis();
  const Eigen::MatrixXd r1 = completion.rightCols(dim - d);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(src.basis().transpose() * s2,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd v1 = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd cosines = svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);

  // Sines come from the complement block directly so that small angles keep
  // full relative accuracy (arccos is ill-conditioned near 1).
  const Eigen::MatrixXd c = r1.transpose() * s2 * v;
  Eigen::VectorXd sines = c.colwise().norm().transpose();
  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) {
    theta(i) = std::clamp(std::atan2(sines(i), cosines(i)), 0.0, std::numbers::pi / 2);
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta(a) < theta(b); });

  FlowDecomposition out;
  out.completion = completion;
  out.rot_top.resize(d, d);
  out.rot_right.resize(d, d);
  out.principal_angles.resize(d);
  Eigen::MatrixXd c_sorted(dim - d, d);
  for (int i = 0; i < d; ++i) {
    out.rot_top.col(i) = v1.col(order[i]);
    out.rot_right.col(i) = v.col(order[i]);
    out.principal_angles(i) = theta(order[i]);
    c_sorted.col(i) = c.col(order[i]);
    sines(i) = c.col(order[i]).norm();
  }

  // V2 column i is -C_i / sin(theta_i). Columns are built from the largest
  // sine down and kept orthonormal; near-zero sines leave the direction
  // undetermined, so those columns are completed from the canonical basis.
  Eigen::MatrixXd v2 = Eigen::MatrixXd::Zero(dim - d, d);
  Eigen::MatrixXd built(dim - d, d);
  Eigen::Index n_built = 0;
  for (int i = d - 1; i >= 0; --i) {
    Eigen::VectorXd w = orthogonalize(-c_sorted.col(i), built, n_built);
    const double norm = w.norm();
    const bool reliable =
        norm > 0.0 && (sines(i) >= kSmallSineThreshold || norm > 0.5 * sines(i));
    if (!reliable) {
      double best = -1.0;
      for (Eigen::Index k = 0; k < dim - d; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(dim - d, k);
        e = orthogonalize(e, built, n_built);
        if (e.norm() > best) {
          best = e.norm();
          w = e;
        }
      }
    }
    w.normalize();
    v2.col(i) = w;
    built.col(n_built++) = w;
  }
  out.rot_bottom = std::move(v2);
  return out;
}

}  // namespace gfkchain::subspace
