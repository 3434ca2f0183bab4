#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "pfopt/problems.hpp"
#include "pfopt/verify.hpp"

using namespace pfopt;

TEST(Quadratic, IdentityExample) {
  const QuadraticProblem f(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
  const GradEval e = f.evaluate(ParamVector{3.0, 4.0}, 0);
  EXPECT_DOUBLE_EQ(e.loss, 12.5);
  EXPECT_EQ(e.grad, (ParamVector{3.0, 4.0}));
}

TEST(Quadratic, KnownOptimumSolvesLinearSystem) {
  const QuadraticProblem f = QuadraticProblem::make_default();
  const auto xs = f.known_optimum();
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  EXPECT_LT((f.A() * x - f.b()).norm(), 1e-10);
  EXPECT_NEAR(f.evaluate_full(xs).loss, *f.optimal_value(), 1e-12);
}

TEST(Quadratic, DefaultSpectrum) {
  const QuadraticProblem f = QuadraticProblem::make_default();
  EXPECT_EQ(f.dimension(), 10u);
  EXPECT_NEAR(f.smoothness(), 100.0, 1e-9);
  EXPECT_NEAR(f.smoothness() / f.strong_convexity(), 100.0, 1e-8);
}

TEST(Quadratic, RejectsIndefiniteOrAsymmetric) {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, -1;
  EXPECT_THROW(QuadraticProblem(A, Eigen::VectorXd::Zero(2)), ContractError);
  A << 1, 0.5, 0, 1;
  EXPECT_THROW(QuadraticProblem(A, Eigen::VectorXd::Zero(2)), ContractError);
}

TEST(Quadratic, GradientNoiseIsZeroMeanAndKeyedBySample) {
  const QuadraticProblem f =
      QuadraticProblem::spectral(4, 10.0, 1.0, 3, /*noise_sigma=*/0.5, 1.0);
  const ParamVector x{0.1, 0.2, 0.3, 0.4};
  const auto exact = f.evaluate_full(x).grad;
  EXPECT_EQ(f.evaluate(x, 11).grad, f.evaluate(x, 11).grad);
  EXPECT_NE(f.evaluate(x, 11).grad, f.evaluate(x, 12).grad);
  ParamVector mean(4, 0.0);
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    const auto g = f.evaluate(x, static_cast<std::uint64_t>(s) + 1).grad;
    for (int i = 0; i < 4; ++i) mean[i] += g[i] / n;
  }
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(mean[i], exact[i], 0.02);
}

TEST(Rosenbrock, StationaryAtOnes) {
  const RosenbrockProblem f(2);
  const GradEval e = f.evaluate(ParamVector{1.0, 1.0}, 0);
  EXPECT_EQ(e.loss, 0.0);
  EXPECT_EQ(e.grad, (ParamVector{0.0, 0.0}));
  const auto rep = grad_check_report(f, ParamVector{1.0, 1.0}, 1e-5);
  EXPECT_LT(rep.max_abs_diff, 1e-6);
}

TEST(Rosenbrock, OddDimensionRejected) { EXPECT_THROW(RosenbrockProblem(3), ContractError); }

TEST(Logistic, BalancedLabelsGiveLn2AtOrigin) {
  const LogisticProblem f = LogisticProblem::make_default();
  double ones = 0.0;
  for (double y : f.data().targets) ones += y;
  EXPECT_EQ(ones, f.num_samples() / 2.0);
  EXPECT_NEAR(f.evaluate_full(ParamVector(f.dimension(), 0.0)).loss, std::log(2.0), 1e-12);
}

TEST(Logistic, StableForLargeMargins) {
  const LogisticProblem f = LogisticProblem::make(64, 3, 1.0, 0.0, 64, 1);
  const GradEval e = f.evaluate_full(ParamVector{800.0, -800.0, 800.0});
  EXPECT_TRUE(std::isfinite(e.loss));
  EXPECT_FALSE(first_non_finite(e.grad).has_value());
}

TEST(FiniteSum, FullGradientIsMeanOfSampleGradients) {
  const StochasticLeastSquares f = StochasticLeastSquares::make(40, 3, 4, 0.1, 8);
  const ParamVector x{0.3, -0.2, 1.1};
  ParamVector mean(3, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < f.num_samples(); ++i) {
    const GradEval e = f.evaluate_sample(x, i);
    loss += e.loss / 40.0;
    for (int j = 0; j < 3; ++j) mean[j] += e.grad[j] / 40.0;
  }
  const GradEval full = f.evaluate_full(x);
  EXPECT_NEAR(full.loss, loss, 1e-12);
  EXPECT_LT(max_abs_diff(full.grad, mean), 1e-12);
}

TEST(FiniteSum, MinibatchDeterministicInSampleId) {
  const MlpProblem f = MlpProblem::make_default();
  const auto x = f.initial_point(4);
  const GradEval a = f.evaluate(x, 99), b = f.evaluate(x, 99), c = f.evaluate(x, 100);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grad, b.grad);
  EXPECT_NE(a.loss, c.loss);
  EXPECT_EQ(a.sample_id, 99u);
}

TEST(FiniteSum, DimensionMismatchIsContractError) {
  const LogisticProblem f = LogisticProblem::make_default();
  EXPECT_THROW(f.evaluate(ParamVector(3, 0.0), 0), ContractError);
}

TEST(Mlp, LossNonNegativeAndFinite) {
  const MlpProblem f = MlpProblem::make_default();
  for (std::uint64_t s = 0; s < 5; ++s) {
    const GradEval e = f.evaluate_full(f.initial_point(s));
    EXPECT_GE(e.loss, 0.0);
    EXPECT_TRUE(std::isfinite(e.loss));
  }
  EXPECT_EQ(f.dimension(), 16u * 8u + 16u + 3u * 16u + 3u);
}

TEST(GradCheck, Quadratic) {
  EXPECT_LT(verify::max_grad_error(QuadraticProblem::make_default(), 20, 1), 1e-6);
}

TEST(GradCheck, Logistic) {
  EXPECT_LT(verify::max_grad_error(LogisticProblem::make_default(), 20, 2), 1e-5);
}

TEST(GradCheck, LeastSquares) {
  EXPECT_LT(verify::max_grad_error(StochasticLeastSquares::make(64, 5, 8, 0.1, 1), 10, 3), 1e-5);
}

TEST(GradCheck, Mlp) {
  EXPECT_LT(verify::max_grad_error(MlpProblem::make(120, 4, 6, 3, 1.0, 16, 5), 20, 4), 1e-5);
}

TEST(GradCheck, DetectsBrokenGradient) {
  const QuadraticProblem f = QuadraticProblem::make_default();
  const verify::BrokenGradient broken(f);
  EXPECT_GT(verify::max_grad_error(broken, 3, 1), 1e-6);
}

TEST(Dataset, CsvRoundTripIsExact) {
  const LogisticProblem f = LogisticProblem::make(10, 3, 1.0, 0.0, 10, 6);
  std::stringstream ss;
  write_dataset_csv(ss, f.data());
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "x0,x1,x2,target");
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.rows, 10u);
  EXPECT_EQ(back.cols, 3u);
  EXPECT_EQ(back.features, f.data().features);
  EXPECT_EQ(back.targets, f.data().targets);
}

TEST(Dataset, MalformedCsvRejected) {
  std::stringstream bad("x0,x1,target\n1,2\n");
  EXPECT_THROW(read_dataset_csv(bad), ValidationError);
  std::stringstream no_target("x0,x1\n1,2\n");
  EXPECT_THROW(read_dataset_csv(no_target), ValidationError);
}

TEST(Problems, FiniteOnFiniteInputs) {
  const QuadraticProblem q = QuadraticProblem::make_default();
  const LogisticProblem l = LogisticProblem::make_default();
  const MlpProblem m = MlpProblem::make_default();
  const RosenbrockProblem r(4);
  const StochasticLeastSquares s = StochasticLeastSquares::make(32, 4, 4, 0.1, 1);
  const Objective* all[] = {&q, &l, &m, &r, &s};
  for (const Objective* f : all) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      ParamVector x = f->initial_point(seed);
      for (double& v : x) v *= 10.0;
      const GradEval e = f->evaluate(x, seed);
      EXPECT_TRUE(std::isfinite(e.loss)) << f->name();
      EXPECT_FALSE(first_non_finite(e.grad).has_value()) << f->name();
    }
  }
}
