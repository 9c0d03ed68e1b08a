#include "gfkchain/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "gfkchain/errors.hpp"

namespace gfkchain::svm {
namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportFraction = 1e-8;

void check_problem(const Eigen::MatrixXd& gram, const std::vector<Label>& labels) {
  if (gram.rows() != gram.cols()) throw DomainError("Gram matrix must be square");
  if (static_cast<std::size_t>(gram.rows()) != labels.size()) {
    throw DomainError("Gram matrix size " + std::to_string(gram.rows()) +
                      " does not match label count " + std::to_string(labels.size()));
  }
}

Eigen::VectorXd signs(const std::vector<Label>& labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = sign_of(labels[i]);
  return y;
}

bool in_up(double y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0); }
bool in_low(double y, double a, double c) { return (y > 0 && a > 0) || (y < 0 && a < c); }

struct Violation {
  int i = -1;
  int j = -1;
  double gap = 0.0;
};

// Maximal violating pair. First index wins ties.
Violation select_pair(const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                      const Eigen::VectorXd& grad, double c) {
  double m_up = -std::numeric_limits<double>::infinity();
  double m_low = std::numeric_limits<double>::infinity();
  Violation v;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    const double score = -y(t) * grad(t);
    if (in_up(y(t), alpha(t), c) && score > m_up) {
      m_up = score;
      v.i = static_cast<int>(t);
    }
    if (in_low(y(t), alpha(t), c) && score < m_low) {
      m_low = score;
      v.j = static_cast<int>(t);
    }
  }
  v.gap = (v.i < 0 || v.j < 0) ? 0.0 : std::max(0.0, m_up - m_low);
  return v;
}

// Offset as computed by LIBSVM: average over free vectors, else the
// midpoint of the feasible interval.
double compute_rho(const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                   const Eigen::VectorXd& grad, double c) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) >= c) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha(t) <= 0.0) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  if (n_free > 0) return sum_free / n_free;
  return 0.5 * (ub + lb);
}

}  // namespace

bool is_positive_semidefinite(const Eigen::MatrixXd& gram) {
  const auto n = gram.rows();
  if (n == 0) return true;
  const double trace = gram.trace();
  if (trace == 0.0) return gram.cwiseAbs().maxCoeff() == 0.0;
  if (!(trace > 0.0)) return false;
  const double jitter = kPsdRepairTolerance * trace / static_cast<double>(n);
  Eigen::MatrixXd shifted = 0.5 * (gram + gram.transpose());
  shifted.diagonal().array() += jitter;
  return Eigen::LLT<Eigen::MatrixXd>(shifted).info() == Eigen::Success;
}

Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) throw DomainError("Gram matrix must be square");
  if (!gram.allFinite()) throw NumericError("Gram matrix has non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
  if (is_positive_semidefinite(sym)) return sym;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("Gram eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double scale = values.cwiseAbs().maxCoeff();
  if (values.minCoeff() < -kPsdRepairTolerance * scale) {
    throw NumericError("Gram matrix is not positive semidefinite (min eigenvalue " +
                       std::to_string(values.minCoeff()) + ")");
  }
  Eigen::MatrixXd repaired =
      eig.eigenvectors() * values.cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (repaired + repaired.transpose());
}

double dual_objective(const Eigen::MatrixXd& gram, const std::vector<Label>& labels,
                      const Eigen::VectorXd& alpha) {
  check_problem(gram, labels);
  const Eigen::VectorXd ya = signs(labels).cwiseProduct(alpha);
  return 0.5 * ya.dot(gram * ya) - alpha.sum();
}

double kkt_violation(const Eigen::MatrixXd& gram, const std::vector<Label>& labels,
                     const Eigen::VectorXd& alpha, double regularization) {
  check_problem(gram, labels);
  const Eigen::VectorXd y = signs(labels);
  const Eigen::VectorXd grad = y.cwiseProduct(gram * y.cwiseProduct(alpha)) -
                               Eigen::VectorXd::Ones(y.size());
  return select_pair(y, alpha, grad, regularization).gap;
}

SvmModel train(const Eigen::MatrixXd& gram, const std::vector<Label>& labels,
               const SvmOptions& options) {
  check_problem(gram, labels);
  const double c = options.regularization;
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("C must be positive and finite");
  if (!(options.tolerance > 0.0)) throw DomainError("tolerance must be positive");
  if (options.max_iterations < 1) throw DomainError("max_iterations must be positive");
  const auto n = gram.rows();
  const bool has_pos = std::find(labels.begin(), labels.end(), Label::healthy) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), Label::damaged) != labels.end();
  if (!has_pos || !has_neg) throw DegenerateError("training labels contain a single class");

  const Eigen::MatrixXd k = repair_psd(gram);
  const Eigen::VectorXd y = signs(labels);
  const Eigen::MatrixXd q = y.asDiagonal() * k * y.asDiagonal();

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = -Eigen::VectorXd::Ones(n);

  SvmModel model;
  model.regularization = c;
  long iter = 0;
  Violation v = select_pair(y, alpha, grad, c);
  while (v.gap >= options.tolerance && iter < options.max_iterations) {
    const int i = v.i;
    const int j = v.j;
    const double old_i = alpha(i);
    const double old_j = alpha(j);
    double& ai = alpha(i);
    double& aj = alpha(j);
    if (y(i) != y(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c) { ai = c; aj = c - diff; }
      } else {
        if (aj > c) { aj = c; ai = c + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) { ai = c; aj = sum - c; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c) {
        if (aj > c) { aj = c; ai = sum - c; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    grad += q.col(i) * di + q.col(j) * dj;
    ++iter;
    v = select_pair(y, alpha, grad, c);
  }

  model.alpha = alpha;
  model.dual_coefficients = alpha.cwiseProduct(y);
  model.bias = -compute_rho(y, alpha, grad, c);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > kSupportFraction * c) model.support_indices.push_back(static_cast<int>(t));
  }
  model.iterations = iter;
  model.kkt_gap = v.gap;
  model.converged = v.gap < options.tolerance;
  model.objective = 0.5 * alpha.dot(grad - Eigen::VectorXd::Ones(n));
  return model;
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& test_by_train) {
  if (test_by_train.cols() != model.dual_coefficients.size()) {
    throw DomainError("cross Gram has " + std::to_string(test_by_train.cols()) +
                      " columns, model was trained on " +
                      std::to_string(model.dual_coefficients.size()) + " samples");
  }
  Eigen::VectorXd f = test_by_train * model.dual_coefficients;
  f.array() += model.bias;
  return f;
}

std::vector<Label> predict(const SvmModel& model, const Eigen::MatrixXd& test_by_train) {
  const Eigen::VectorXd f = decision_values(model, test_by_train);
  std::vector<Label> out(static_cast<std::size_t>(f.size()));
  for (Eigen::Index t = 0; t < f.size(); ++t) {
    out[static_cast<std::size_t>(t)] = f(t) < 0.0 ? Label::damaged : Label::healthy;
  }
  return out;
}

}  // namespace gfkchain::svm
