// Shared numeric types, error types, learning-rate schedules and the
// numerator function used by the golden-step optimizers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pfopt {

// Error taxonomy. Every failure the library reports is one of these.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
// Raised when a step encounters a NaN/inf; the state is left untouched.
struct NumericError : std::runtime_error {
  NumericError(const std::string& what, std::size_t index, double value)
      : std::runtime_error(what), index(index), value(value) {}
  std::size_t index;
  double value;
};
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using ParamVector = std::vector<double>;

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

inline double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Index of the first non-finite coordinate, if any.
inline std::optional<std::size_t> first_non_finite(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return i;
  return std::nullopt;
}

inline void require_finite(std::span<const double> v, std::string_view what) {
  if (auto i = first_non_finite(v))
    throw NumericError(std::string(what) + ": non-finite value at coordinate " +
                           std::to_string(*i),
                       *i, v[*i]);
}

// One stochastic evaluation f(x, xi) with its gradient.
struct GradEval {
  double loss = 0.0;
  ParamVector grad;
  std::uint64_t sample_id = 0;
};

// Objective interface. evaluate() must be a pure function of (x, sample_id);
// deterministic objectives ignore sample_id.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual GradEval evaluate(std::span<const double> x, std::uint64_t sample_id) const = 0;
  // Full-batch objective; same as evaluate() for deterministic problems.
  virtual GradEval evaluate_full(std::span<const double> x) const { return evaluate(x, 0); }
  virtual bool stochastic() const { return false; }
  // Deterministic starting point for a given run seed.
  virtual ParamVector initial_point(std::uint64_t seed) const = 0;
  // f* when known in closed form.
  virtual std::optional<double> optimal_value() const { return std::nullopt; }

 protected:
  void check_dimension(std::span<const double> x) const {
    if (x.size() != dimension())
      throw ContractError(name() + ": expected dimension " + std::to_string(dimension()) +
                          ", got " + std::to_string(x.size()));
  }
};

// ---------------------------------------------------------------------------
// Schedules

enum class ScheduleKind { kConstant, kCosine };

struct Schedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double base = 1.0;
  std::int64_t horizon = 1;

  static Schedule constant(double base, std::int64_t horizon) {
    return {ScheduleKind::kConstant, base, horizon};
  }
  static Schedule cosine(double base, std::int64_t horizon) {
    return {ScheduleKind::kCosine, base, horizon};
  }
};

// Learning rate at step k (1-based). Cosine: base * (1 + cos(pi (k-1)/K)) / 2.
inline double schedule_value(const Schedule& s, std::int64_t k) {
  if (k < 1 || k > s.horizon)
    throw RangeError("schedule_value: step " + std::to_string(k) + " outside [1, " +
                     std::to_string(s.horizon) + "]");
  if (s.kind == ScheduleKind::kConstant) return s.base;
  const double phase = std::numbers::pi * static_cast<double>(k - 1) /
                       static_cast<double>(s.horizon);
  return s.base * 0.5 * (1.0 + std::cos(phase));
}

// s(x) = p x^q, the embedding of the golden step size.
inline double numerator(double p, double q, double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("numerator: x must be >= 0");
  if (x == 0.0) return 0.0;
  return p * std::pow(x, q);
}

// ---------------------------------------------------------------------------
// Run configuration

enum class OptimizerKind { kAdaGradNorm, kGog, kAdam, kAdamG, kNgd, kDog, kDowg };

inline constexpr OptimizerKind kAllOptimizerKinds[] = {
    OptimizerKind::kAdaGradNorm, OptimizerKind::kGog, OptimizerKind::kAdam,
    OptimizerKind::kAdamG,       OptimizerKind::kNgd, OptimizerKind::kDog,
    OptimizerKind::kDowg};

inline std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kAdaGradNorm: return "adagrad_norm";
    case OptimizerKind::kGog: return "gog";
    case OptimizerKind::kAdam: return "adam";
    case OptimizerKind::kAdamG: return "adamg";
    case OptimizerKind::kNgd: return "ngd";
    case OptimizerKind::kDog: return "dog";
    case OptimizerKind::kDowg: return "dowg";
  }
  return "?";
}

inline std::optional<OptimizerKind> parse_optimizer_kind(std::string_view s) {
  for (auto k : kAllOptimizerKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Adam-family optimizers follow a cosine schedule by default.
inline bool is_adam_family(OptimizerKind k) {
  return k == OptimizerKind::kAdam || k == OptimizerKind::kAdamG;
}

inline constexpr double kDefaultGuard = 1e-12;

struct RunConfig {
  OptimizerKind optimizer = OptimizerKind::kAdamG;
  std::int64_t steps = 1000;
  double eta = 1.0;
  double p = 0.2;
  double q = 0.24;
  double beta1 = 0.95;
  double beta2 = 0.999;
  double beta3 = 0.95;
  double epsilon = 1e-8;
  // Added under sqrt(v) in the norm-family optimizers.
  double guard = kDefaultGuard;
  // Unset: cosine(eta, steps) for Adam family, constant(eta, steps) otherwise.
  std::optional<Schedule> schedule;
  std::uint64_t seed = 0;
  // Evaluate the full objective instead of minibatches (NGD needs this).
  bool full_batch = false;

  Schedule effective_schedule() const {
    if (schedule) return *schedule;
    return is_adam_family(optimizer) ? Schedule::cosine(eta, steps)
                                     : Schedule::constant(eta, steps);
  }
};

inline void validate(const RunConfig& c) {
  auto in_unit = [](double b) { return b >= 0.0 && b < 1.0; };
  if (c.steps < 1) throw ValidationError("steps must be >= 1");
  if (!in_unit(c.beta1) || !in_unit(c.beta2) || !in_unit(c.beta3))
    throw ValidationError("beta1, beta2, beta3 must lie in [0, 1)");
  if (!(c.epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(c.p > 0.0)) throw ValidationError("p must be > 0");
  if (!(c.q > 0.0 && c.q < 0.25 + 1e-9)) throw ValidationError("q must lie in (0, 1/4]");
  if (!(c.eta > 0.0) || !std::isfinite(c.eta)) throw ValidationError("eta must be > 0");
  if (!(c.guard >= 0.0)) throw ValidationError("guard must be >= 0");
  if (c.schedule) {
    if (!(c.schedule->base > 0.0)) throw ValidationError("schedule base must be > 0");
    if (c.schedule->horizon < c.steps)
      throw ValidationError("schedule horizon shorter than the run");
  }
}

}  // namespace pfopt
