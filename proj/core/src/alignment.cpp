#include "gfkchain/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gfkchain/errors.hpp"

namespace gfkchain::align {

NormalStats fit_normal_stats(const sim::ModalDataset& dataset) {
  std::vector<bool> mask(dataset.n_samples(), false);
  for (int i = 0; i < dataset.n_samples(); ++i) {
    mask[i] = dataset.label_visible[i] &&
              dataset.condition_labels[i] == sim::Condition::healthy;
  }
  return fit_normal_stats(dataset.features, mask);
}

NormalStats fit_normal_stats(const Eigen::MatrixXd& features, const std::vector<bool>& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != features.rows()) {
    throw DomainError("mask length does not match the number of samples");
  }
  const auto dim = features.cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  int count = 0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (!mask[i]) continue;
    sum += features.row(i).transpose();
    ++count;
  }
  if (count < 2) {
    throw InsufficientDataError("need at least 2 label-visible normal samples, found " +
                                std::to_string(count));
  }

  NormalStats stats;
  stats.mean = sum / count;
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (!mask[i]) continue;
    sq += (features.row(i).transpose() - stats.mean).cwiseAbs2();
  }
  stats.std = (sq / (count - 1)).cwiseSqrt();

  for (Eigen::Index j = 0; j < dim; ++j) {
    const double floor = std::max(kStdFloorRelative * std::abs(stats.mean(j)),
                                  std::numeric_limits<double>::min());
    if (!(stats.std(j) >= floor)) {
      stats.std(j) = floor;
      stats.floored_columns.push_back(static_cast<int>(j));
    }
  }
  return stats;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& features, const NormalStats& stats) {
  if (stats.mean.size() != features.cols() || stats.std.size() != features.cols()) {
    throw DomainError("normal statistics have dimension " + std::to_string(stats.mean.size()) +
                      " but features have " + std::to_string(features.cols()));
  }
  return (features.rowwise() - stats.mean.transpose()).array().rowwise() /
         stats.std.transpose().array();
}

sim::ModalDataset align(const sim::ModalDataset& dataset, const NormalStats& stats) {
  sim::ModalDataset out = dataset;
  out.features = standardize(dataset.features, stats);
  return out;
}

}  // namespace gfkchain::align
