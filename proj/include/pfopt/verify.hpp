// Numerical self-checks: gradients, closed forms vs. quadrature, scale laws,
// the NGD bound and (full level) the tuning-free convergence sweep.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "pfopt/analysis.hpp"
#include "pfopt/core.hpp"
#include "pfopt/io.hpp"
#include "pfopt/optimizers.hpp"
#include "pfopt/problems.hpp"
#include "pfopt/random.hpp"
#include "pfopt/run.hpp"

namespace pfopt::verify {

enum class Level { kFast, kFull };

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions {
  Level level = Level::kFast;
  // Test hook: corrupt analytic gradients seen by the gradient checks.
  bool inject_broken_gradient = false;
};

// alpha * f.
class ScaledObjective : public Objective {
 public:
  ScaledObjective(const Objective& base, double alpha) : base_(base), alpha_(alpha) {}
  std::string name() const override { return "scaled_" + base_.name(); }
  std::size_t dimension() const override { return base_.dimension(); }
  GradEval evaluate(std::span<const double> x, std::uint64_t sample_id) const override {
    return scale(base_.evaluate(x, sample_id));
  }
  GradEval evaluate_full(std::span<const double> x) const override {
    return scale(base_.evaluate_full(x));
  }
  bool stochastic() const override { return base_.stochastic(); }
  ParamVector initial_point(std::uint64_t seed) const override { return base_.initial_point(seed); }

 private:
  GradEval scale(GradEval e) const {
    e.loss *= alpha_;
    for (double& g : e.grad) g *= alpha_;
    return e;
  }
  const Objective& base_;
  double alpha_;
};

// Gradient off by a relative 1e-3 in the first coordinate.
class BrokenGradient : public Objective {
 public:
  explicit BrokenGradient(const Objective& base) : base_(base) {}
  std::string name() const override { return "broken_" + base_.name(); }
  std::size_t dimension() const override { return base_.dimension(); }
  GradEval evaluate(std::span<const double> x, std::uint64_t sample_id) const override {
    return corrupt(base_.evaluate(x, sample_id));
  }
  GradEval evaluate_full(std::span<const double> x) const override {
    return corrupt(base_.evaluate_full(x));
  }
  ParamVector initial_point(std::uint64_t seed) const override { return base_.initial_point(seed); }

 private:
  static GradEval corrupt(GradEval e) {
    e.grad[0] += 1e-3 * (1.0 + std::abs(e.grad[0]));
    return e;
  }
  const Objective& base_;
};

// ---------------------------------------------------------------------------

// Iterates x_1 .. x_{K+1} of a run.
inline std::vector<ParamVector> iterate_path(const RunConfig& cfg, const Objective& f,
                                             std::span<const double> x0) {
  std::vector<ParamVector> path;
  const RunTrace t = run(cfg, f, x0, [&](std::int64_t, std::span<const double> x, const GradEval&) {
    path.emplace_back(x.begin(), x.end());
  });
  if (!t.ok()) throw NumericError("iterate_path: " + t.failure->message, t.failure->coordinate,
                                  t.failure->value);
  path.push_back(t.x);
  return path;
}

inline double path_deviation(const std::vector<ParamVector>& a, const std::vector<ParamVector>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
  return m;
}

// Max coordinate deviation between AdaGrad-Norm on f and on alpha*f (guard 0).
inline double adagrad_scale_deviation(const Objective& f, double alpha, std::int64_t steps,
                                      double eta = 1.0, std::uint64_t seed = 1) {
  RunConfig c;
  c.optimizer = OptimizerKind::kAdaGradNorm;
  c.steps = steps;
  c.eta = eta;
  c.guard = 0.0;
  c.full_batch = true;
  const ParamVector x0 = f.initial_point(seed);
  const ScaledObjective g(f, alpha);
  return path_deviation(iterate_path(c, f, x0), iterate_path(c, g, x0));
}

// Max coordinate deviation between GOG(alpha*f, eta) and GOG(f, eta*alpha^{2q}).
inline double gog_scale_deviation(const Objective& f, double alpha, double q, std::int64_t steps,
                                  double eta = 1.0, std::uint64_t seed = 1) {
  RunConfig c;
  c.optimizer = OptimizerKind::kGog;
  c.steps = steps;
  c.q = q;
  c.guard = 0.0;
  c.full_batch = true;
  const ParamVector x0 = f.initial_point(seed);
  const ScaledObjective g(f, alpha);
  RunConfig scaled = c, equiv = c;
  scaled.eta = eta;
  equiv.eta = eta * std::pow(alpha, 2.0 * q);
  return path_deviation(iterate_path(scaled, g, x0), iterate_path(equiv, f, x0));
}

// Max grad_check error over `points` points x = initial_point + spread * N(0, I).
inline double max_grad_error(const Objective& f, std::size_t points, std::uint64_t seed,
                             double spread = 0.5, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    ParamVector x = f.initial_point(derive_key(seed, i));
    CounterRng rng(derive_key(seed ^ 0x6c8e9cf570932bd5ULL, i));
    for (double& v : x) v += spread * rng.normal();
    worst = std::max(worst, grad_check(f, x, h));
  }
  return worst;
}

// Worst relative error of the closed-form expectations against quadrature over
// `cases` random draws; odd cases use the power family, even ones a constant.
inline double max_expectation_error(std::size_t cases, std::uint64_t seed) {
  using namespace analysis;
  CounterRng rng(seed);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < cases; ++i) {
    const GammaTriple g{log_uniform(0.1, 10.0), log_uniform(0.1, 10.0), log_uniform(0.1, 10.0)};
    const double c1 = 1.0 + log_uniform(0.01, 100.0);
    const SupportInterval iv{c1, c1 * log_uniform(10.0, 1e8)};
    double closed, quad;
    if (i % 2 == 0) {
      const double eta = log_uniform(1e-2, 1e2);
      closed = expectation_constant(eta, iv, g);
      quad = quadrature_expectation_constant(eta, iv, g).value;
    } else {
      const double t = -0.45 + 0.69 * rng.uniform();
      closed = expectation_power(t, iv, g);
      quad = quadrature_expectation_power(t, iv, g).value;
    }
    worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
  }
  return worst;
}

// Steps until ||grad f|| < tol under a constant step size; -1 if not reached.
inline std::int64_t steps_to_tolerance(OptimizerKind kind, double eta, const Objective& f,
                                       std::span<const double> x0, double tol,
                                       std::int64_t max_steps) {
  RunConfig c;
  c.optimizer = kind;
  c.eta = eta;
  c.steps = max_steps;
  validate(c);
  Optimizer opt(c, x0);
  ParamVector x(x0.begin(), x0.end());
  for (std::int64_t k = 0; k <= max_steps; ++k) {
    const GradEval e = f.evaluate_full(x);
    if (norm(e.grad) < tol) return k;
    if (k == max_steps) break;
    opt.step(x, e.grad, eta);
  }
  return -1;
}

struct NgdCheck {
  double d0 = 0.0;
  double eta_star = 0.0;
  double realized = 0.0;  // min_k f(x_k) - f*
  double bound = 0.0;
  double grid_argmin = 0.0;
  double grid_log_step = 0.0;  // natural-log spacing of the eta grid
};

// NGD on a quadratic with exact L and D0, eta = D0/sqrt(K); also locates the
// bound's minimizer on a log grid of eta that does not contain D0/sqrt(K).
inline NgdCheck ngd_check(const QuadraticProblem& f, std::int64_t K, std::uint64_t seed = 1) {
  NgdCheck out;
  const ParamVector x0 = f.initial_point(seed);
  out.d0 = distance(x0, f.known_optimum());
  out.eta_star = ngd_optimal_eta(out.d0, K);
  RunConfig c;
  c.optimizer = OptimizerKind::kNgd;
  c.steps = K;
  c.eta = out.eta_star;
  c.full_batch = true;
  const RunTrace t = run(c, f, x0);
  if (!t.ok()) throw NumericError("ngd_check: run failed", t.failure->coordinate, t.failure->value);
  const double fstar = *f.optimal_value();
  out.realized = t.final_loss - fstar;
  for (double l : t.losses) out.realized = std::min(out.realized, l - fstar);
  const double L = f.smoothness();
  out.bound = analysis::ngd_bound(L, out.d0, out.eta_star, K);

  const analysis::EtaGrid grid{out.eta_star * 1e-3 * 1.37, out.eta_star * 1e3, 97};
  const auto etas = analysis::log_grid(grid);
  out.grid_log_step = std::log(grid.hi / grid.lo) / static_cast<double>(grid.points - 1);
  double best = std::numeric_limits<double>::infinity();
  for (double eta : etas) {
    const double b = analysis::ngd_bound(L, out.d0, eta, K);
    if (b < best) {
      best = b;
      out.grid_argmin = eta;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_checks(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  auto timed = [&](std::string name, double tol, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = std::move(name);
    r.tolerance = tol;
    try {
      body(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  auto below = [](CheckResult& r, double measured) {
    r.measured = measured;
    r.passed = measured < r.tolerance;
  };

  const QuadraticProblem quad = QuadraticProblem::make_default();
  const LogisticProblem logistic = LogisticProblem::make_default();
  const MlpProblem mlp = MlpProblem::make_default();
  const RosenbrockProblem rosen(4);

  auto gradient_target = [&](const Objective& f) -> std::unique_ptr<Objective> {
    if (opts.inject_broken_gradient) return std::make_unique<BrokenGradient>(f);
    return std::make_unique<ScaledObjective>(f, 1.0);
  };
  timed("grad_check quadratic", 1e-6, [&](CheckResult& r) {
    below(r, max_grad_error(*gradient_target(quad), 20, 11));
  });
  timed("grad_check logistic", 1e-5, [&](CheckResult& r) {
    below(r, max_grad_error(*gradient_target(logistic), 20, 12));
  });
  timed("grad_check mlp", 1e-5, [&](CheckResult& r) {
    below(r, max_grad_error(*gradient_target(mlp), 20, 13));
  });
  timed("grad_check rosenbrock", 1e-5, [&](CheckResult& r) {
    below(r, max_grad_error(*gradient_target(rosen), 20, 14, 0.3));
  });

  const std::size_t cases = opts.level == Level::kFull ? 100 : 20;
  timed("closed form vs quadrature (" + std::to_string(cases) + " cases)", 1e-6,
        [&](CheckResult& r) { below(r, max_expectation_error(cases, 21)); });

  timed("golden dominance ratio, c2=1e10", 10.0, [&](CheckResult& r) {
    r.measured = analysis::golden_dominance({2.0, 1e10}, {1.0, 1.0, 1.0}).ratio;
    r.passed = r.measured > r.tolerance;
    r.detail = "lower bound";
  });

  timed("scale law adagrad_norm, alpha=7.3", 1e-9,
        [&](CheckResult& r) { below(r, adagrad_scale_deviation(quad, 7.3, 1000)); });
  for (double alpha : {0.1, 3.0, 50.0})
    timed("scale law gog, alpha=" + io::format_double(alpha), 1e-9,
          [&](CheckResult& r) { below(r, gog_scale_deviation(quad, alpha, 0.24, 1000)); });

  timed("ngd bound, K=100", 0.0, [&](CheckResult& r) {
    const NgdCheck c = ngd_check(quad, 100);
    r.measured = c.realized - c.bound;
    const bool grid_ok = std::abs(std::log(c.grid_argmin / c.eta_star)) <= c.grid_log_step;
    r.passed = r.measured <= 0.0 && grid_ok;
    r.detail = "realized " + std::to_string(c.realized) + " vs bound " + std::to_string(c.bound) +
               (grid_ok ? "" : "; grid minimizer too far from D0/sqrt(K)");
  });

  if (opts.level == Level::kFull) {
    for (OptimizerKind kind : {OptimizerKind::kAdaGradNorm, OptimizerKind::kGog})
      for (double eta : {0.01, 1.0, 100.0})
        timed(std::string("tuning-free ") + std::string(to_string(kind)) + ", eta=" + io::format_double(eta),
              1e5, [&](CheckResult& r) {
                const ParamVector x0 = quad.initial_point(1);
                const auto k = steps_to_tolerance(kind, eta, quad, x0, 1e-3, 100000);
                r.measured = k < 0 ? std::numeric_limits<double>::infinity() : double(k);
                r.passed = k >= 0;
                r.detail = "steps to ||grad|| < 1e-3";
              });
  }
  return out;
}

}  // namespace pfopt::verify
