// Single-step transitions for AdaGrad-Norm, GOG, Adam, AdamG, NGD, DoG and
// DoWG.
//
// Every *_step function validates the gradient before touching anything: a
// non-finite gradient (or a non-finite candidate iterate) throws NumericError
// and leaves both the state and x unchanged. The step counter k counts
// completed steps, so the update running inside a call uses index k + 1.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <variant>

#include "pfopt/core.hpp"

namespace pfopt {

namespace detail {

inline void check_step_inputs(std::span<const double> x, std::span<const double> g,
                              const char* who) {
  if (x.size() != g.size())
    throw ContractError(std::string(who) + ": gradient dimension " +
                        std::to_string(g.size()) + " != parameter dimension " +
                        std::to_string(x.size()));
  require_finite(g, std::string(who) + ": gradient");
}

// x <- x - scale * dir, committed only if every coordinate stays finite.
inline void commit_axpy(std::span<double> x, double scale, std::span<const double> dir,
                        const char* who) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double next = x[i] - scale * dir[i];
    if (!std::isfinite(next))
      throw NumericError(std::string(who) + ": update overflowed at coordinate " +
                             std::to_string(i),
                         i, next);
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= scale * dir[i];
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be > 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// AdaGrad-Norm: x <- x - eta g / sqrt(v),  v accumulates ||g||^2.

struct AdaGradNormState {
  double v = 0.0;
  std::int64_t k = 0;
  double guard = kDefaultGuard;
};

inline void adagradnorm_step(AdaGradNormState& st, std::span<double> x,
                             std::span<const double> g, double eta) {
  detail::require_positive(eta, "adagradnorm_step: eta");
  detail::check_step_inputs(x, g, "adagradnorm_step");
  const double v_next = st.v + squared_norm(g);
  if (v_next > 0.0)
    detail::commit_axpy(x, eta / std::sqrt(v_next + st.guard), g, "adagradnorm_step");
  st.v = v_next;
  ++st.k;
}

// ---------------------------------------------------------------------------
// GOG: AdaGrad-Norm with the golden coefficient r = s(v) on top.

struct GogState {
  double v = 0.0;
  double r = 0.0;
  std::int64_t k = 0;
  double p = 0.2;
  double q = 0.24;
  double guard = kDefaultGuard;
};

// Multiplier applied to g for a given accumulator value.
inline double gog_multiplier(const GogState& st, double v_next, double eta) {
  return eta * numerator(st.p, st.q, v_next) / std::sqrt(v_next + st.guard);
}

inline void gog_step(GogState& st, std::span<double> x, std::span<const double> g,
                     double eta) {
  detail::require_positive(eta, "gog_step: eta");
  detail::check_step_inputs(x, g, "gog_step");
  const double v_next = st.v + squared_norm(g);
  const double r_next = numerator(st.p, st.q, v_next);
  if (v_next > 0.0)
    detail::commit_axpy(x, eta * r_next / std::sqrt(v_next + st.guard), g, "gog_step");
  st.v = v_next;
  st.r = r_next;
  ++st.k;
}

// ---------------------------------------------------------------------------
// Adam (bias-corrected, no weight decay).

struct AdamState {
  ParamVector m;
  ParamVector v;
  std::int64_t k = 0;
  double beta1 = 0.95;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t dim, double beta1 = 0.95, double beta2 = 0.999,
                     double epsilon = 1e-8)
      : m(dim, 0.0), v(dim, 0.0), beta1(beta1), beta2(beta2), epsilon(epsilon) {}
};

inline void adam_step(AdamState& st, std::span<double> x, std::span<const double> g,
                      double eta_k) {
  if (!(eta_k >= 0.0)) throw DomainError("adam_step: eta_k must be >= 0");
  detail::check_step_inputs(x, g, "adam_step");
  if (st.m.size() != x.size()) throw ContractError("adam_step: state dimension mismatch");
  const double k = static_cast<double>(st.k + 1);
  const double c1 = 1.0 - std::pow(st.beta1, k);
  const double c2 = 1.0 - std::pow(st.beta2, k);
  ParamVector m_next(x.size()), v_next(x.size()), dir(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    v_next[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g[i] * g[i];
    m_next[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g[i];
    const double v_hat = v_next[i] / c2;
    const double m_hat = m_next[i] / c1;
    dir[i] = m_hat / (std::sqrt(v_hat) + st.epsilon);
  }
  detail::commit_axpy(x, eta_k, dir, "adam_step");
  st.m = std::move(m_next);
  st.v = std::move(v_next);
  ++st.k;
}

// ---------------------------------------------------------------------------
// AdamG: Adam whose first moment is fed r * g, where r is an EMA of the
// elementwise numerator s(v) of the raw second moment, plus a min(eta, 1/sqrt k)
// clip on the step.

struct AdamGState {
  ParamVector m;
  ParamVector v;
  ParamVector r;
  std::int64_t k = 0;
  double p = 0.2;
  double q = 0.24;
  double beta1 = 0.95;
  double beta2 = 0.999;
  double beta3 = 0.95;
  double epsilon = 1e-8;

  AdamGState() = default;
  explicit AdamGState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0), r(dim, 0.0) {}
};

inline double adamg_step_multiplier(double eta_k, std::int64_t k) {
  return std::min(eta_k, 1.0 / std::sqrt(static_cast<double>(k)));
}

inline void adamg_step(AdamGState& st, std::span<double> x, std::span<const double> g,
                       double eta_k) {
  if (!(eta_k >= 0.0)) throw DomainError("adamg_step: eta_k must be >= 0");
  detail::check_step_inputs(x, g, "adamg_step");
  if (st.m.size() != x.size()) throw ContractError("adamg_step: state dimension mismatch");
  const std::int64_t k = st.k + 1;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(k));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(k));
  ParamVector m_next(x.size()), v_next(x.size()), r_next(x.size()), dir(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    v_next[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g[i] * g[i];
    const double v_hat = v_next[i] / c2;
    r_next[i] = st.beta3 * st.r[i] + (1.0 - st.beta3) * numerator(st.p, st.q, v_next[i]);
    m_next[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * r_next[i] * g[i];
    const double m_hat = m_next[i] / c1;
    dir[i] = m_hat / (std::sqrt(v_hat) + st.epsilon);
  }
  detail::commit_axpy(x, adamg_step_multiplier(eta_k, k), dir, "adamg_step");
  st.m = std::move(m_next);
  st.v = std::move(v_next);
  st.r = std::move(r_next);
  ++st.k;
}

// ---------------------------------------------------------------------------
// Normalized gradient descent with a fixed step.

struct NgdState {
  double eta = 1.0;
  std::int64_t k = 0;
};

// Step size minimizing the NGD suboptimality bound: D0 / sqrt(K).
inline double ngd_optimal_eta(double d0, std::int64_t steps) {
  detail::require_positive(d0, "ngd_optimal_eta: D0");
  if (steps < 1) throw DomainError("ngd_optimal_eta: K must be >= 1");
  return d0 / std::sqrt(static_cast<double>(steps));
}

inline void ngd_step(NgdState& st, std::span<double> x, std::span<const double> g) {
  detail::require_positive(st.eta, "ngd_step: eta");
  detail::check_step_inputs(x, g, "ngd_step");
  const double gn = norm(g);
  if (gn > 0.0) detail::commit_axpy(x, st.eta / gn, g, "ngd_step");
  ++st.k;
}

// ---------------------------------------------------------------------------
// DoG / DoWG: distance-over-gradients baselines anchored at x0.

inline double dog_initial_distance(std::span<const double> x0) {
  return 1e-6 * (1.0 + norm(x0));
}

struct DogState {
  ParamVector x0;
  double rbar = 0.0;
  double G = 0.0;
  std::int64_t k = 0;
  double guard = kDefaultGuard;

  DogState() = default;
  explicit DogState(std::span<const double> anchor)
      : x0(anchor.begin(), anchor.end()), rbar(dog_initial_distance(anchor)) {}
};

inline void dog_step(DogState& st, std::span<double> x, std::span<const double> g,
                     double eta = 1.0) {
  detail::require_positive(eta, "dog_step: eta");
  detail::check_step_inputs(x, g, "dog_step");
  if (st.x0.size() != x.size()) throw ContractError("dog_step: state dimension mismatch");
  const double rbar_next = std::max(st.rbar, distance(x, st.x0));
  const double G_next = st.G + squared_norm(g);
  if (G_next > 0.0)
    detail::commit_axpy(x, eta * rbar_next / std::sqrt(G_next + st.guard), g, "dog_step");
  st.rbar = rbar_next;
  st.G = G_next;
  ++st.k;
}

struct DowgState {
  ParamVector x0;
  double rbar = 0.0;
  double V = 0.0;
  std::int64_t k = 0;
  double guard = kDefaultGuard;

  DowgState() = default;
  explicit DowgState(std::span<const double> anchor)
      : x0(anchor.begin(), anchor.end()), rbar(dog_initial_distance(anchor)) {}
};

inline void dowg_step(DowgState& st, std::span<double> x, std::span<const double> g,
                      double eta = 1.0) {
  detail::require_positive(eta, "dowg_step: eta");
  detail::check_step_inputs(x, g, "dowg_step");
  if (st.x0.size() != x.size()) throw ContractError("dowg_step: state dimension mismatch");
  const double rbar_next = std::max(st.rbar, distance(x, st.x0));
  const double r2 = rbar_next * rbar_next;
  const double V_next = st.V + r2 * squared_norm(g);
  if (V_next > 0.0)
    detail::commit_axpy(x, eta * r2 / std::sqrt(V_next + st.guard), g, "dowg_step");
  st.rbar = rbar_next;
  st.V = V_next;
  ++st.k;
}

// ---------------------------------------------------------------------------
// Type-erased optimizer used by the run loop.

using OptimizerState = std::variant<AdaGradNormState, GogState, AdamState, AdamGState,
                                    NgdState, DogState, DowgState>;

class Optimizer {
 public:
  Optimizer(const RunConfig& cfg, std::span<const double> x0) : kind_(cfg.optimizer) {
    validate(cfg);
    const std::size_t d = x0.size();
    switch (cfg.optimizer) {
      case OptimizerKind::kAdaGradNorm:
        state_ = AdaGradNormState{0.0, 0, cfg.guard};
        break;
      case OptimizerKind::kGog:
        state_ = GogState{0.0, 0.0, 0, cfg.p, cfg.q, cfg.guard};
        break;
      case OptimizerKind::kAdam:
        state_ = AdamState(d, cfg.beta1, cfg.beta2, cfg.epsilon);
        break;
      case OptimizerKind::kAdamG: {
        AdamGState st(d);
        st.p = cfg.p;
        st.q = cfg.q;
        st.beta1 = cfg.beta1;
        st.beta2 = cfg.beta2;
        st.beta3 = cfg.beta3;
        st.epsilon = cfg.epsilon;
        state_ = std::move(st);
        break;
      }
      case OptimizerKind::kNgd:
        state_ = NgdState{cfg.eta, 0};
        break;
      case OptimizerKind::kDog: {
        DogState st(x0);
        st.guard = cfg.guard;
        state_ = std::move(st);
        break;
      }
      case OptimizerKind::kDowg: {
        DowgState st(x0);
        st.guard = cfg.guard;
        state_ = std::move(st);
        break;
      }
    }
  }

  OptimizerKind kind() const { return kind_; }
  const OptimizerState& state() const { return state_; }

  // eta_k is the scheduled learning rate; NGD ignores it and uses its fixed step.
  void step(std::span<double> x, std::span<const double> g, double eta_k) {
    std::visit(
        [&](auto& st) {
          using S = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<S, AdaGradNormState>) adagradnorm_step(st, x, g, eta_k);
          else if constexpr (std::is_same_v<S, GogState>) gog_step(st, x, g, eta_k);
          else if constexpr (std::is_same_v<S, AdamState>) adam_step(st, x, g, eta_k);
          else if constexpr (std::is_same_v<S, AdamGState>) adamg_step(st, x, g, eta_k);
          else if constexpr (std::is_same_v<S, NgdState>) ngd_step(st, x, g);
          else if constexpr (std::is_same_v<S, DogState>) dog_step(st, x, g, eta_k);
          else dowg_step(st, x, g, eta_k);
        },
        state_);
  }

 private:
  OptimizerKind kind_;
  OptimizerState state_;
};

}  // namespace pfopt
