// Desk-scale objectives with hand-coded gradients.
//
// All synthetic data comes from the counter-based generator in random.hpp, so
// every problem is reproducible bit-for-bit from its construction parameters.
// Smoothness: the quadratic exposes its exact L (largest eigenvalue); the
// finite-sum problems satisfy an affine noise-variance bound
// E||g||^2 <= D0 + D1 ||grad f||^2 with finite but unexported D0, D1.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <locale>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pfopt/core.hpp"
#include "pfopt/random.hpp"

namespace pfopt {

// ---------------------------------------------------------------------------
// Quadratic f(x) = 1/2 x'Ax - b'x (+ optional zero-mean gradient noise).

class QuadraticProblem : public Objective {
 public:
  QuadraticProblem(Eigen::MatrixXd A, Eigen::VectorXd b, double noise_sigma = 0.0,
                   std::uint64_t seed = 0, double init_scale = 1.0)
      : A_(std::move(A)),
        b_(std::move(b)),
        noise_sigma_(noise_sigma),
        init_scale_(init_scale),
        seed_(seed) {
    if (A_.rows() != A_.cols() || A_.rows() != b_.size() || A_.rows() == 0)
      throw ContractError("QuadraticProblem: A must be square and match b");
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A_.cwiseAbs().maxCoeff()))
      throw ContractError("QuadraticProblem: A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A_);
    const auto& ev = eig.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw ContractError("QuadraticProblem: A must be positive definite");
    L_ = ev.maxCoeff();
    mu_ = ev.minCoeff();
    // Solve through the eigendecomposition: x* = Q diag(1/lambda) Q' b.
    const Eigen::MatrixXd& Q = eig.eigenvectors();
    x_star_ = Q * (Q.transpose() * b_).cwiseQuotient(ev);
    f_star_ = -0.5 * b_.dot(x_star_);
  }

  // d-dimensional quadratic with log-spaced spectrum in [lambda_max / condition,
  // lambda_max] and a random orthogonal eigenbasis.
  static QuadraticProblem spectral(std::size_t dim, double condition, double lambda_max,
                                   std::uint64_t seed, double noise_sigma = 0.0,
                                   double init_scale = 1.0) {
    if (dim == 0 || !(condition >= 1.0) || !(lambda_max > 0.0))
      throw ContractError("QuadraticProblem::spectral: bad parameters");
    CounterRng rng(derive_key(seed, 0x51ADu));
    Eigen::MatrixXd G(dim, dim);
    for (Eigen::Index j = 0; j < G.cols(); ++j)
      for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    Eigen::VectorXd lambda(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double frac = dim == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
      lambda(static_cast<Eigen::Index>(i)) = lambda_max / std::pow(condition, 1.0 - frac);
    }
    Eigen::MatrixXd A = Q * lambda.asDiagonal() * Q.transpose();
    A = 0.5 * (A + A.transpose());
    Eigen::VectorXd b(dim);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.normal();
    return QuadraticProblem(std::move(A), std::move(b), noise_sigma, seed, init_scale);
  }

  // d = 10, spectrum [1, 100] (L = 100, condition number 100), starts at
  // x* + 0.1 N(0, I).
  static QuadraticProblem make_default(std::uint64_t seed = 1) {
    return spectral(10, 100.0, 100.0, seed, 0.0, 0.1);
  }

  std::string name() const override { return "quadratic"; }
  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  bool stochastic() const override { return noise_sigma_ > 0.0; }

  GradEval evaluate(std::span<const double> x, std::uint64_t sample_id) const override {
    GradEval e = evaluate_full(x);
    e.sample_id = sample_id;
    if (noise_sigma_ > 0.0) {
      // f(x, xi) = f(x) + sigma xi'x with xi ~ N(0, I).
      CounterRng rng(derive_key(seed_, sample_id));
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = noise_sigma_ * rng.normal();
        e.loss += xi * x[i];
        e.grad[i] += xi;
      }
    }
    return e;
  }

  GradEval evaluate_full(std::span<const double> x) const override {
    check_dimension(x);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd Ax = A_ * xv;
    GradEval e;
    // Extended-precision accumulation keeps finite differences of the loss
    // accurate where a gradient coordinate is tiny relative to f.
    const auto n = static_cast<Eigen::Index>(x.size());
    long double quad = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
      long double row = 0.0L;
      for (Eigen::Index j = 0; j < n; ++j) row += static_cast<long double>(A_(i, j)) * x[j];
      quad += (0.5L * row - b_[i]) * x[i];
    }
    e.loss = static_cast<double>(quad);
    e.grad.resize(x.size());
    Eigen::Map<Eigen::VectorXd>(e.grad.data(), static_cast<Eigen::Index>(x.size())) = Ax - b_;
    return e;
  }

  // x* + init_scale * N(0, I).
  ParamVector initial_point(std::uint64_t seed) const override {
    CounterRng rng(derive_key(seed, 0x1417u));
    ParamVector x(dimension());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = x_star_(static_cast<Eigen::Index>(i)) + init_scale_ * rng.normal();
    return x;
  }

  std::optional<double> optimal_value() const override { return f_star_; }

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  ParamVector known_optimum() const { return {x_star_.data(), x_star_.data() + x_star_.size()}; }
  double smoothness() const { return L_; }
  double strong_convexity() const { return mu_; }
  double noise_sigma() const { return noise_sigma_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd x_star_;
  double noise_sigma_;
  double init_scale_;
  std::uint64_t seed_;
  double L_ = 0.0;
  double mu_ = 0.0;
  double f_star_ = 0.0;
};

// ---------------------------------------------------------------------------
// Finite sums f(x) = (1/n) sum_i f_i(x) + R(x), minibatches drawn with
// replacement from a counter stream keyed by (data seed, sample_id).

class FiniteSumObjective : public Objective {
 public:
  FiniteSumObjective(std::size_t batch_size, std::uint64_t seed)
      : batch_size_(batch_size), seed_(seed) {
    if (batch_size_ == 0) throw ContractError("batch_size must be >= 1");
  }

  virtual std::size_t num_samples() const = 0;

  bool stochastic() const override { return batch_size_ < num_samples(); }
  std::size_t batch_size() const { return batch_size_; }
  std::uint64_t seed() const { return seed_; }

  // Indices of the minibatch used for sample_id.
  std::vector<std::size_t> batch_indices(std::uint64_t sample_id) const {
    std::vector<std::size_t> idx;
    if (!stochastic()) {
      idx.resize(num_samples());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      return idx;
    }
    CounterRng rng(derive_key(seed_, sample_id));
    idx.resize(batch_size_);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(num_samples()));
    return idx;
  }

  GradEval evaluate(std::span<const double> x, std::uint64_t sample_id) const override {
    GradEval e = mean_over(x, batch_indices(sample_id));
    e.sample_id = sample_id;
    return e;
  }

  GradEval evaluate_full(std::span<const double> x) const override {
    std::vector<std::size_t> idx(num_samples());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return mean_over(x, idx);
  }

  // f_i(x) + R(x) and its gradient.
  GradEval evaluate_sample(std::span<const double> x, std::size_t i) const {
    if (i >= num_samples()) throw ContractError(name() + ": sample index out of range");
    return mean_over(x, std::vector<std::size_t>{i});
  }

 protected:
  // Adds grad f_i(x) into grad, returns f_i(x).
  virtual double accumulate_sample(std::span<const double> x, std::size_t i,
                                   std::span<double> grad) const = 0;
  // Adds grad R(x) into grad, returns R(x).
  virtual double accumulate_regularizer(std::span<const double>, std::span<double>) const {
    return 0.0;
  }

 private:
  GradEval mean_over(std::span<const double> x, const std::vector<std::size_t>& idx) const {
    check_dimension(x);
    GradEval e;
    e.grad.assign(x.size(), 0.0);
    double loss = 0.0;
    for (std::size_t i : idx) loss += accumulate_sample(x, i, e.grad);
    const double inv = 1.0 / static_cast<double>(idx.size());
    loss *= inv;
    for (double& g : e.grad) g *= inv;
    loss += accumulate_regularizer(x, e.grad);
    e.loss = loss;
    return e;
  }

  std::size_t batch_size_;
  std::uint64_t seed_;
};

// Row-major n x d feature matrix with one target per row.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;
  std::vector<double> targets;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * cols, cols);
  }
};

// CSV layout: header "x0,...,x{d-1},target", one sample per line, '.' decimal
// separator, values printed with 17 significant digits.
inline void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out.imbue(std::locale::classic());
  out.precision(17);
  for (std::size_t j = 0; j < ds.cols; ++j) out << 'x' << j << ',';
  out << "target\n";
  for (std::size_t i = 0; i < ds.rows; ++i) {
    for (double v : ds.row(i)) out << v << ',';
    out << ds.targets[i] << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& in) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset csv: missing header");
  const auto header_fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (header_fields < 2 || line.substr(line.rfind(',') + 1) != "target")
    throw ValidationError("dataset csv: header must end with 'target'");
  ds.cols = header_fields - 1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ls, cell, ',')) {
      std::istringstream cs(cell);
      cs.imbue(std::locale::classic());
      double v;
      if (!(cs >> v)) throw ValidationError("dataset csv: bad number on line " + std::to_string(lineno));
      (n < ds.cols ? ds.features : ds.targets).push_back(v);
      ++n;
    }
    if (n != header_fields)
      throw ValidationError("dataset csv: wrong field count on line " + std::to_string(lineno));
    ++ds.rows;
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Least squares f_i(x) = 1/2 (a_i'x - y_i)^2 on a planted linear model.

class StochasticLeastSquares : public FiniteSumObjective {
 public:
  StochasticLeastSquares(Dataset data, std::size_t batch_size, std::uint64_t seed)
      : FiniteSumObjective(batch_size, seed), data_(std::move(data)) {
    if (data_.rows == 0 || data_.targets.size() != data_.rows)
      throw ContractError("StochasticLeastSquares: empty or malformed dataset");
  }

  static StochasticLeastSquares make(std::size_t n, std::size_t d, std::size_t batch_size,
                                     double noise, std::uint64_t seed) {
    CounterRng rng(derive_key(seed, 0x15u));
    Dataset ds{n, d, std::vector<double>(n * d), std::vector<double>(n)};
    ParamVector w(d);
    for (double& c : w) c = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double y = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double a = rng.normal();
        ds.features[i * d + j] = a;
        y += a * w[j];
      }
      ds.targets[i] = y + noise * rng.normal();
    }
    return StochasticLeastSquares(std::move(ds), batch_size, seed);
  }

  std::string name() const override { return "least_squares"; }
  std::size_t dimension() const override { return data_.cols; }
  std::size_t num_samples() const override { return data_.rows; }
  const Dataset& data() const { return data_; }

  ParamVector initial_point(std::uint64_t) const override { return ParamVector(dimension(), 0.0); }

 protected:
  double accumulate_sample(std::span<const double> x, std::size_t i,
                           std::span<double> grad) const override {
    const auto a = data_.row(i);
    double r = -data_.targets[i];
    for (std::size_t j = 0; j < a.size(); ++j) r += a[j] * x[j];
    for (std::size_t j = 0; j < a.size(); ++j) grad[j] += r * a[j];
    return 0.5 * r * r;
  }

 private:
  Dataset data_;
};

// ---------------------------------------------------------------------------
// L2-regularized logistic regression, labels in {0, 1}.

class LogisticProblem : public FiniteSumObjective {
 public:
  LogisticProblem(Dataset data, double l2, std::size_t batch_size, std::uint64_t seed)
      : FiniteSumObjective(batch_size, seed), data_(std::move(data)), l2_(l2) {
    if (data_.rows == 0 || data_.targets.size() != data_.rows)
      throw ContractError("LogisticProblem: empty or malformed dataset");
    if (!(l2_ >= 0.0)) throw ContractError("LogisticProblem: l2 must be >= 0");
    for (double y : data_.targets)
      if (y != 0.0 && y != 1.0) throw ContractError("LogisticProblem: labels must be 0 or 1");
  }

  // Two Gaussian classes with means +/- mu (|mu| = separation), exactly n/2
  // samples of each label, rows interleaved.
  static LogisticProblem make(std::size_t n, std::size_t d, double separation, double l2,
                              std::size_t batch_size, std::uint64_t seed) {
    CounterRng rng(derive_key(seed, 0x1061u));
    ParamVector mu(d);
    for (double& c : mu) c = rng.normal();
    const double scale = separation / std::max(norm(mu), 1e-12);
    for (double& c : mu) c *= scale;
    Dataset ds{n, d, std::vector<double>(n * d), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const double label = static_cast<double>(i % 2);
      const double sign = label == 1.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < d; ++j) ds.features[i * d + j] = sign * mu[j] + rng.normal();
      ds.targets[i] = label;
    }
    return LogisticProblem(std::move(ds), l2, batch_size, seed);
  }

  // n = 512, d = 20.
  static LogisticProblem make_default(std::uint64_t seed = 2, std::size_t batch_size = 32) {
    return make(512, 20, 1.5, 1e-3, batch_size, seed);
  }

  std::string name() const override { return "logistic"; }
  std::size_t dimension() const override { return data_.cols; }
  std::size_t num_samples() const override { return data_.rows; }
  const Dataset& data() const { return data_; }
  double l2() const { return l2_; }

  ParamVector initial_point(std::uint64_t) const override { return ParamVector(dimension(), 0.0); }

 protected:
  double accumulate_sample(std::span<const double> x, std::size_t i,
                           std::span<double> grad) const override {
    const auto a = data_.row(i);
    double z = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) z += a[j] * x[j];
    const double y = data_.targets[i];
    // log(1 + e^z) - y z, evaluated stably.
    const double loss = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
    const double sigma = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    for (std::size_t j = 0; j < a.size(); ++j) grad[j] += (sigma - y) * a[j];
    return loss;
  }

  double accumulate_regularizer(std::span<const double> x, std::span<double> grad) const override {
    if (l2_ == 0.0) return 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) grad[j] += l2_ * x[j];
    return 0.5 * l2_ * squared_norm(x);
  }

 private:
  Dataset data_;
  double l2_;
};

// ---------------------------------------------------------------------------
// One-hidden-layer tanh network with softmax cross-entropy.
//
// Parameter layout: W1 (hidden x inputs, row-major), b1 (hidden),
// W2 (classes x hidden, row-major), b2 (classes).

class MlpProblem : public FiniteSumObjective {
 public:
  MlpProblem(Dataset data, std::size_t hidden, std::size_t classes, std::size_t batch_size,
             std::uint64_t seed)
      : FiniteSumObjective(batch_size, seed),
        data_(std::move(data)),
        inputs_(data_.cols),
        hidden_(hidden),
        classes_(classes) {
    if (data_.rows == 0 || hidden_ == 0 || classes_ < 2)
      throw ContractError("MlpProblem: bad shape");
    for (double y : data_.targets)
      if (y < 0.0 || y >= static_cast<double>(classes_) || y != std::floor(y))
        throw ContractError("MlpProblem: labels must be integers in [0, classes)");
  }

  // Gaussian blobs: class centers ~ N(0, spread^2 I), unit-variance samples.
  static MlpProblem make(std::size_t n, std::size_t inputs, std::size_t hidden,
                         std::size_t classes, double spread, std::size_t batch_size,
                         std::uint64_t seed) {
    CounterRng rng(derive_key(seed, 0x3170u));
    std::vector<double> centers(classes * inputs);
    for (double& c : centers) c = spread * rng.normal();
    Dataset ds{n, inputs, std::vector<double>(n * inputs), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t label = i % classes;
      for (std::size_t j = 0; j < inputs; ++j)
        ds.features[i * inputs + j] = centers[label * inputs + j] + rng.normal();
      ds.targets[i] = static_cast<double>(label);
    }
    return MlpProblem(std::move(ds), hidden, classes, batch_size, seed);
  }

  // 8 x 16 x 3 on 600 samples.
  static MlpProblem make_default(std::uint64_t seed = 3, std::size_t batch_size = 32) {
    return make(600, 8, 16, 3, 1.0, batch_size, seed);
  }

  std::string name() const override { return "mlp"; }
  std::size_t dimension() const override {
    return hidden_ * inputs_ + hidden_ + classes_ * hidden_ + classes_;
  }
  std::size_t num_samples() const override { return data_.rows; }
  const Dataset& data() const { return data_; }

  // Weights ~ N(0, 1/fan_in), biases 0.
  ParamVector initial_point(std::uint64_t seed) const override {
    CounterRng rng(derive_key(seed, 0x3171u));
    ParamVector x(dimension(), 0.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(inputs_));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (std::size_t i = 0; i < hidden_ * inputs_; ++i) x[i] = s1 * rng.normal();
    const std::size_t w2 = hidden_ * inputs_ + hidden_;
    for (std::size_t i = 0; i < classes_ * hidden_; ++i) x[w2 + i] = s2 * rng.normal();
    return x;
  }

 protected:
  double accumulate_sample(std::span<const double> x, std::size_t i,
                           std::span<double> grad) const override {
    const std::size_t o_b1 = hidden_ * inputs_;
    const std::size_t o_w2 = o_b1 + hidden_;
    const std::size_t o_b2 = o_w2 + classes_ * hidden_;
    const auto in = data_.row(i);
    const auto label = static_cast<std::size_t>(data_.targets[i]);

    std::vector<double> h(hidden_), logits(classes_);
    for (std::size_t u = 0; u < hidden_; ++u) {
      double a = x[o_b1 + u];
      for (std::size_t j = 0; j < inputs_; ++j) a += x[u * inputs_ + j] * in[j];
      h[u] = std::tanh(a);
    }
    for (std::size_t c = 0; c < classes_; ++c) {
      double z = x[o_b2 + c];
      for (std::size_t u = 0; u < hidden_; ++u) z += x[o_w2 + c * hidden_ + u] * h[u];
      logits[c] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - zmax);
    const double log_norm = zmax + std::log(sum);
    const double loss = log_norm - logits[label];

    // Backward pass.
    std::vector<double> dh(hidden_, 0.0);
    for (std::size_t c = 0; c < classes_; ++c) {
      const double dz = std::exp(logits[c] - log_norm) - (c == label ? 1.0 : 0.0);
      grad[o_b2 + c] += dz;
      for (std::size_t u = 0; u < hidden_; ++u) {
        grad[o_w2 + c * hidden_ + u] += dz * h[u];
        dh[u] += dz * x[o_w2 + c * hidden_ + u];
      }
    }
    for (std::size_t u = 0; u < hidden_; ++u) {
      const double da = dh[u] * (1.0 - h[u] * h[u]);
      grad[o_b1 + u] += da;
      for (std::size_t j = 0; j < inputs_; ++j) grad[u * inputs_ + j] += da * in[j];
    }
    return loss;
  }

 private:
  Dataset data_;
  std::size_t inputs_;
  std::size_t hidden_;
  std::size_t classes_;
};

// ---------------------------------------------------------------------------
// Rosenbrock over consecutive pairs: sum b (x_{2i+1} - x_{2i}^2)^2 + (a - x_{2i})^2.

class RosenbrockProblem : public Objective {
 public:
  explicit RosenbrockProblem(std::size_t dim, double a = 1.0, double b = 100.0)
      : dim_(dim), a_(a), b_(b) {
    if (dim_ == 0 || dim_ % 2 != 0) throw ContractError("RosenbrockProblem: dimension must be even");
  }

  std::string name() const override { return "rosenbrock"; }
  std::size_t dimension() const override { return dim_; }

  GradEval evaluate(std::span<const double> x, std::uint64_t sample_id) const override {
    check_dimension(x);
    GradEval e;
    e.sample_id = sample_id;
    e.grad.assign(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; i += 2) {
      const double u = x[i], w = x[i + 1];
      const double t = w - u * u;
      const double s = a_ - u;
      e.loss += b_ * t * t + s * s;
      e.grad[i] += -4.0 * b_ * t * u - 2.0 * s;
      e.grad[i + 1] += 2.0 * b_ * t;
    }
    return e;
  }

  // Classic start (-1.2, 1) per pair, jittered by N(0, 0.1^2).
  ParamVector initial_point(std::uint64_t seed) const override {
    CounterRng rng(derive_key(seed, 0x2057u));
    ParamVector x(dim_);
    for (std::size_t i = 0; i < dim_; i += 2) {
      x[i] = -1.2 + 0.1 * rng.normal();
      x[i + 1] = 1.0 + 0.1 * rng.normal();
    }
    return x;
  }

  std::optional<double> optimal_value() const override { return 0.0; }
  ParamVector known_optimum() const { return ParamVector(dim_, a_); }

 private:
  std::size_t dim_;
  double a_;
  double b_;
};

// ---------------------------------------------------------------------------
// Central-difference gradient check on the full-batch objective.

struct GradCheckReport {
  double max_rel_error = 0.0;  // max_i |fd_i - g_i| / (|g_i| + 1e-8)
  double max_abs_diff = 0.0;   // max_i |fd_i - g_i|
  std::size_t worst_coordinate = 0;
};

inline GradCheckReport grad_check_report(const Objective& problem, std::span<const double> x,
                                         double h) {
  if (!(h > 0.0)) throw DomainError("grad_check: h must be > 0");
  const GradEval base = problem.evaluate_full(x);
  ParamVector probe(x.begin(), x.end());
  GradCheckReport rep;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double fp = problem.evaluate_full(probe).loss;
    probe[i] = xi - h;
    const double fm = problem.evaluate_full(probe).loss;
    probe[i] = xi;
    const double fd = (fp - fm) / (2.0 * h);
    const double diff = std::abs(fd - base.grad[i]);
    const double rel = diff / (std::abs(base.grad[i]) + 1e-8);
    rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
    if (rel > rep.max_rel_error) {
      rep.max_rel_error = rel;
      rep.worst_coordinate = i;
    }
  }
  return rep;
}

inline double grad_check(const Objective& problem, std::span<const double> x, double h) {
  return grad_check_report(problem, x, h).max_rel_error;
}

}  // namespace pfopt
