#pragma once

// Normal-condition alignment: every domain is standardized with the mean and
// standard deviation of its own label-visible healthy samples, so that the
// healthy cluster of every structure sits at the origin with unit spread.

#include <vector>

#include <Eigen/Dense>

#include "gfkchain/spectral_sim.hpp"

namespace gfkchain::align {

struct NormalStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // strictly positive
  /// Columns whose sample deviation was zero (or negligible against the
  /// column mean) and had to be floored. Non-empty means "warn the user".
  std::vector<int> floored_columns;
};

/// Relative floor applied to degenerate column deviations.
inline constexpr double kStdFloorRelative = 1e-12;

/// Per-column mean and sample standard deviation over the label-visible
/// healthy rows. Throws InsufficientDataError with fewer than two such rows.
NormalStats fit_normal_stats(const sim::ModalDataset& dataset);

/// Same, over the rows of `features` selected by `mask`.
NormalStats fit_normal_stats(const Eigen::MatrixXd& features, const std::vector<bool>& mask);

/// (x - mean) / std per column. Throws DomainError on a dimension mismatch.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& features, const NormalStats& stats);

/// Standardized copy of `dataset`; labels, flags and domain index unchanged.
sim::ModalDataset align(const sim::ModalDataset& dataset, const NormalStats& stats);

}  // namespace gfkchain::align
