#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gfkchain/errors.hpp"
#include "gfkchain/svm.hpp"
#include "support/oracles.hpp"

namespace svm = gfkchain::svm;
namespace oracle = gfkchain::testing;
using svm::Label;

namespace {

struct Problem {
  Eigen::MatrixXd x;
  std::vector<Label> y;
};

// Two Gaussian blobs in `dim` dimensions whose centres sit `gap` apart.
Problem blobs(int n, int dim, double gap, std::mt19937_64& rng) {
  Problem p;
  p.x = oracle::gaussian(n, dim, rng);
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    p.x(i, 0) += pos ? gap / 2 : -gap / 2;
    p.y.push_back(pos ? Label::healthy : Label::damaged);
  }
  return p;
}

Eigen::VectorXd as_vector(const std::vector<Label>& y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v(static_cast<Eigen::Index>(i)) = svm::sign_of(y[i]);
  return v;
}

std::vector<Label> flipped(const std::vector<Label>& y) {
  std::vector<Label> out;
  for (auto l : y) out.push_back(l == Label::healthy ? Label::damaged : Label::healthy);
  return out;
}

}  // namespace

TEST(Train, TwoSymmetricPoints) {
  Eigen::MatrixXd x(2, 1);
  x << 1, -1;
  const std::vector<Label> y{Label::healthy, Label::damaged};
  svm::SvmOptions opt;
  opt.regularization = 10.0;
  const auto m = svm::train(x * x.transpose(), y, opt);
  EXPECT_NEAR(m.bias, 0.0, 1e-12);
  EXPECT_EQ(svm::predict(m, x * x.transpose()), y);
  Eigen::MatrixXd probe(3, 1);
  probe << 0.5, -0.5, 3.0;
  const auto f = svm::decision_values(m, probe * x.transpose());
  EXPECT_GT(f(0), 0.0);
  EXPECT_LT(f(1), 0.0);
  EXPECT_NEAR(f(0), -f(1), 1e-12);
}

TEST(Train, SeparableBlobsAreFitPerfectly) {
  std::mt19937_64 rng(61);
  const auto p = blobs(80, 2, 12.0, rng);
  svm::SvmOptions opt;
  opt.regularization = 100.0;
  const Eigen::MatrixXd k = p.x * p.x.transpose();
  const auto m = svm::train(k, p.y, opt);
  EXPECT_TRUE(m.converged);
  EXPECT_EQ(svm::predict(m, k), p.y);
}

TEST(Train, ModelInvariants) {
  std::mt19937_64 rng(62);
  const auto p = blobs(60, 3, 1.5, rng);
  const Eigen::MatrixXd k = p.x * p.x.transpose();
  for (double c : {0.1, 1.0, 10.0}) {
    svm::SvmOptions opt;
    opt.regularization = c;
    const auto m = svm::train(k, p.y, opt);
    EXPECT_GE(m.alpha.minCoeff(), 0.0);
    EXPECT_LE(m.alpha.maxCoeff(), c);
    EXPECT_LE(std::abs(m.dual_coefficients.sum()), 1e-6 * c * 60);
    std::vector<int> expected;
    for (int i = 0; i < 60; ++i)
      if (m.alpha(i) > 1e-8 * c) expected.push_back(i);
    EXPECT_EQ(m.support_indices, expected);
    EXPECT_TRUE(m.converged);
    EXPECT_LT(m.kkt_gap, 1e-5);
    EXPECT_LT(svm::kkt_violation(k, p.y, m.alpha, c), 1e-5);
    EXPECT_NEAR(m.objective, svm::dual_objective(k, p.y, m.alpha), 1e-9 * std::max(1.0, std::abs(m.objective)));
    EXPECT_EQ(m.regularization, c);
  }
}

TEST(Train, ObjectiveMatchesQpOracle) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = blobs(50, 4, 4.0, rng);
    const Eigen::MatrixXd k = p.x * p.x.transpose();
    svm::SvmOptions opt;
    opt.regularization = 1.0;
    const auto m = svm::train(k, p.y, opt);
    const auto ref = oracle::qp_oracle(k, as_vector(p.y), 1.0);
    EXPECT_LT(std::abs(m.objective - ref.objective), 1e-4 * std::abs(ref.objective)) << "trial " << trial;
    EXPECT_LT(svm::kkt_violation(k, p.y, m.alpha, 1.0), 1e-5);
  }
}

TEST(Predict, AgreesWithQpOracleModel) {
  std::mt19937_64 rng(64);
  const auto p = blobs(50, 2, 5.0, rng);
  const Eigen::MatrixXd k = p.x * p.x.transpose();
  svm::SvmOptions opt;
  opt.regularization = 10.0;
  const auto m = svm::train(k, p.y, opt);
  const auto ref = oracle::qp_oracle(k, as_vector(p.y), 10.0, 50000);
  const Eigen::MatrixXd test = 3.0 * oracle::gaussian(1000, 2, rng);
  const Eigen::MatrixXd cross = test * p.x.transpose();
  const auto pred = svm::predict(m, cross);
  const Eigen::VectorXd f_ref = cross * ref.alpha.cwiseProduct(as_vector(p.y)) +
                                Eigen::VectorXd::Constant(1000, ref.bias);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    const Label l = f_ref(i) < 0.0 ? Label::damaged : Label::healthy;
    agree += l == pred[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  EXPECT_GE(agree, 999);
}

TEST(Predict, BiasOnlyRowsAndTies) {
  svm::SvmModel m;
  m.dual_coefficients = Eigen::VectorXd::Ones(3);
  m.bias = -0.5;
  EXPECT_EQ(svm::predict(m, Eigen::MatrixXd::Zero(1, 3))[0], Label::damaged);
  m.bias = 0.25;
  EXPECT_EQ(svm::predict(m, Eigen::MatrixXd::Zero(1, 3))[0], Label::healthy);
  m.bias = 0.0;
  EXPECT_EQ(svm::predict(m, Eigen::MatrixXd::Zero(1, 3))[0], Label::healthy);
  EXPECT_THROW(svm::predict(m, Eigen::MatrixXd::Zero(1, 4)), gfkchain::DomainError);
}

TEST(Train, LabelFlipNegatesDecisions) {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = blobs(40, 3, 2.0, rng);
    const Eigen::MatrixXd k = p.x * p.x.transpose();
    const auto a = svm::train(k, p.y);
    const auto b = svm::train(k, flipped(p.y));
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.bias, -b.bias);
    const Eigen::MatrixXd cross = oracle::gaussian(200, 3, rng) * p.x.transpose();
    const auto fa = svm::decision_values(a, cross);
    const auto fb = svm::decision_values(b, cross);
    EXPECT_EQ(fa, -fb);
    const auto pa = svm::predict(a, cross);
    const auto pb = svm::predict(b, cross);
    for (int i = 0; i < 200; ++i) {
      if (fa(i) != 0.0) EXPECT_NE(pa[static_cast<std::size_t>(i)], pb[static_cast<std::size_t>(i)]);
    }
  }
}

TEST(Train, ScalingGramAndInverseCKeepsPredictions) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = blobs(30, 2, 2.0, rng);
    const Eigen::MatrixXd k = p.x * p.x.transpose();
    const Eigen::MatrixXd cross = oracle::gaussian(100, 2, rng) * p.x.transpose();
    svm::SvmOptions base;
    base.regularization = 2.0;
    svm::SvmOptions scaled = base;
    scaled.regularization = 2.0 / 4.0;
    // Powers of two keep every floating-point step exact.
    const auto a = svm::train(k, p.y, base);
    scaled.tolerance = base.tolerance;
    const auto b = svm::train(4.0 * k, p.y, scaled);
    EXPECT_EQ(svm::predict(a, cross), svm::predict(b, 4.0 * cross));
  }
}

TEST(Train, Errors) {
  const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(svm::train(k, {Label::healthy, Label::healthy, Label::healthy}), gfkchain::DegenerateError);
  EXPECT_THROW(svm::train(k, {Label::healthy, Label::damaged}), gfkchain::DomainError);
  svm::SvmOptions bad;
  bad.regularization = 0.0;
  EXPECT_THROW(svm::train(k, {Label::healthy, Label::damaged, Label::damaged}, bad), gfkchain::DomainError);
  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
  indefinite(2, 2) = -1.0;
  EXPECT_THROW(svm::train(indefinite, {Label::healthy, Label::damaged, Label::damaged}),
               gfkchain::NumericError);
}

TEST(RepairPsd, ClampsRoundoffOnly) {
  std::mt19937_64 rng(67);
  const Eigen::MatrixXd x = oracle::gaussian(10, 3, rng);
  Eigen::MatrixXd k = x * x.transpose();
  k(0, 0) -= 1e-13 * k.trace();  // pushes a zero eigenvalue slightly negative
  EXPECT_NO_THROW(svm::repair_psd(k));
  const auto fixed = svm::repair_psd(k);
  EXPECT_TRUE(svm::is_positive_semidefinite(fixed));
  EXPECT_TRUE(svm::is_positive_semidefinite(Eigen::MatrixXd::Zero(3, 3)));
  EXPECT_FALSE(svm::is_positive_semidefinite(-Eigen::MatrixXd::Identity(3, 3)));
}

TEST(Train, IterationCapReportsNonConvergence) {
  std::mt19937_64 rng(68);
  const auto p = blobs(60, 3, 0.5, rng);
  svm::SvmOptions opt;
  opt.max_iterations = 3;
  const auto m = svm::train(p.x * p.x.transpose(), p.y, opt);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations, 3);
  EXPECT_GT(m.kkt_gap, opt.tolerance);
}
