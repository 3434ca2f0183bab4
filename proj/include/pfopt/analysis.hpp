// Numerics behind the golden step size.
//
// The convergence bound of AdaGrad-Norm, viewed as a function of the step size
// eta and the accumulated squared gradient norm x = v_K, is
//
//   h(x, eta) = (g1 eta^2 + g2 eta ln x + g3 / eta) / sqrt(x).
//
// With x ~ U(c1, c2) we compare E[h] for a constant eta against eta = x^t,
// t in (-1/2, 1/4), both in closed form; an adaptive Simpson integrator serves
// as an independent oracle for the closed forms.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pfopt/core.hpp"

namespace pfopt::analysis {

struct GammaTriple {
  double g1 = 1.0;
  double g2 = 1.0;
  double g3 = 1.0;
};

// Support of the uniform distribution of v_K: 1 < c1 < c2.
struct SupportInterval {
  double c1 = 2.0;
  double c2 = 1e8;
};

inline void validate(const GammaTriple& g) {
  if (!(g.g1 > 0.0 && g.g2 > 0.0 && g.g3 > 0.0))
    throw DomainError("GammaTriple: all coefficients must be > 0");
}

inline void validate(const SupportInterval& iv) {
  if (!(iv.c1 > 1.0 && iv.c2 > iv.c1) || !std::isfinite(iv.c2))
    throw DomainError("SupportInterval: need 1 < c1 < c2 < inf");
}

inline double h_functional(double x, double eta, const GammaTriple& g) {
  if (!(x > 0.0)) throw DomainError("h_functional: x must be > 0");
  if (!(eta > 0.0)) throw DomainError("h_functional: eta must be > 0");
  return (g.g1 * eta * eta + g.g2 * eta * std::log(x) + g.g3 / eta) / std::sqrt(x);
}

// Integrand for the golden family eta = x^t.
inline double h_power(double x, double t, const GammaTriple& g) {
  return h_functional(x, std::pow(x, t), g);
}

inline void check_exponent(double t) {
  if (!(t > -0.5 && t < 0.25)) throw DomainError("t must lie strictly inside (-1/2, 1/4)");
}

// Antiderivative of h(x, eta) in x for constant eta.
inline double primitive_constant(double x, double eta, const GammaTriple& g) {
  const double s = std::sqrt(x);
  return 2.0 * (g.g1 * eta * eta + g.g3 / eta) * s + g.g2 * eta * (2.0 * s * std::log(x) - 4.0 * s);
}

// Antiderivative of h(x, x^t) in x.
inline double primitive_power(double x, double t, const GammaTriple& g) {
  const double lx = std::log(x);
  const double a1 = 0.5 + 2.0 * t;
  const double a2 = 0.5 + t;
  const double a3 = 0.5 - t;
  // a1 vanishes at t = -1/4, where the first term integrates to a logarithm.
  const double first = std::abs(a1) < 1e-12 ? g.g1 * lx : g.g1 / a1 * std::pow(x, a1);
  const double xa2 = std::pow(x, a2);
  return first + g.g2 / a2 * xa2 * lx - g.g2 / (a2 * a2) * xa2 + g.g3 / a3 * std::pow(x, a3);
}

// E_{x~U(c1,c2)} h(x, eta) for constant eta.
inline double expectation_constant(double eta, const SupportInterval& iv, const GammaTriple& g) {
  if (!(eta > 0.0)) throw DomainError("expectation_constant: eta must be > 0");
  validate(iv);
  validate(g);
  return (primitive_constant(iv.c2, eta, g) - primitive_constant(iv.c1, eta, g)) / (iv.c2 - iv.c1);
}

// E_{x~U(c1,c2)} h(x, x^t).
inline double expectation_power(double t, const SupportInterval& iv, const GammaTriple& g) {
  check_exponent(t);
  validate(iv);
  validate(g);
  return (primitive_power(iv.c2, t, g) - primitive_power(iv.c1, t, g)) / (iv.c2 - iv.c1);
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.

struct QuadratureResult {
  double value = 0.0;
  std::size_t intervals = 0;  // accepted subintervals
  bool converged = true;
};

inline QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol,
                                         std::size_t max_intervals = std::size_t{1} << 20) {
  struct Panel {
    double a, b, fa, fm, fb, whole, tol;
  };
  auto simpson = [](double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  };
  QuadratureResult res;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  std::vector<Panel> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), abs_tol}};
  std::size_t processed = 0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(p.a, m, p.fa, flm, p.fm);
    const double right = simpson(m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    ++processed;
    const bool budget_spent = processed + stack.size() >= max_intervals;
    if (std::abs(delta) <= 15.0 * p.tol || budget_spent || m <= p.a || m >= p.b) {
      // Richardson extrapolation of the two-panel estimate.
      res.value += left + right + delta / 15.0;
      ++res.intervals;
      if (std::abs(delta) > 15.0 * p.tol) res.converged = false;
      continue;
    }
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol});
  }
  return res;
}

// Quadrature counterparts of the closed forms (absolute tolerance on the
// integral: 1e-10 * (c2 - c1)).
inline QuadratureResult quadrature_expectation_constant(double eta, const SupportInterval& iv,
                                                        const GammaTriple& g) {
  validate(iv);
  const double len = iv.c2 - iv.c1;
  auto r = adaptive_simpson([&](double x) { return h_functional(x, eta, g); }, iv.c1, iv.c2,
                            1e-10 * len);
  r.value /= len;
  return r;
}

inline QuadratureResult quadrature_expectation_power(double t, const SupportInterval& iv,
                                                     const GammaTriple& g) {
  check_exponent(t);
  validate(iv);
  const double len = iv.c2 - iv.c1;
  auto r = adaptive_simpson([&](double x) { return h_power(x, t, g); }, iv.c1, iv.c2, 1e-10 * len);
  r.value /= len;
  return r;
}

// ---------------------------------------------------------------------------
// Golden step size vs. the best constant step size.

// Proxy for the limit t -> 1/4 from below.
inline constexpr double kGoldenExponent = 0.2499;
inline constexpr std::size_t kConstantGridPoints = 33;

struct EtaGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = kConstantGridPoints;
};

// Constants admissible for every x in the support: x^{-1/2} < eta < x^{1/4}
// for all x >= c1, i.e. eta in (c1^{-1/2}, c1^{1/4}).
inline EtaGrid admissible_constant_grid(const SupportInterval& iv) {
  return {std::pow(iv.c1, -0.5), std::pow(iv.c1, 0.25), kConstantGridPoints};
}

inline std::vector<double> log_grid(const EtaGrid& grid) {
  if (!(grid.lo > 0.0 && grid.hi >= grid.lo) || grid.points == 0)
    throw DomainError("log_grid: need 0 < lo <= hi and at least one point");
  std::vector<double> out(grid.points);
  if (grid.points == 1) {
    out[0] = grid.lo;
    return out;
  }
  const double llo = std::log(grid.lo), lhi = std::log(grid.hi);
  for (std::size_t i = 0; i < grid.points; ++i)
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                static_cast<double>(grid.points - 1));
  return out;
}

struct Dominance {
  double case2_value = 0.0;
  double best_constant_value = 0.0;
  double best_constant_eta = 0.0;
  double ratio = 0.0;
};

inline Dominance golden_dominance(const SupportInterval& iv, const GammaTriple& g,
                                  const EtaGrid& grid) {
  validate(iv);
  if (iv.c2 / iv.c1 < 1e4) throw DomainError("golden_dominance: requires c2/c1 >= 1e4");
  Dominance d;
  d.case2_value = expectation_power(kGoldenExponent, iv, g);
  d.best_constant_value = -std::numeric_limits<double>::infinity();
  for (double eta : log_grid(grid)) {
    const double e = expectation_constant(eta, iv, g);
    if (e > d.best_constant_value) {
      d.best_constant_value = e;
      d.best_constant_eta = eta;
    }
  }
  d.ratio = d.case2_value / d.best_constant_value;
  return d;
}

inline Dominance golden_dominance(const SupportInterval& iv, const GammaTriple& g) {
  return golden_dominance(iv, g, admissible_constant_grid(iv));
}

// ---------------------------------------------------------------------------
// NGD suboptimality bound: min_k f(x_k) - f* <= (L/2) (D0^2/(2 eta K) + eta/2)^2.

inline double ngd_bound(double L, double d0, double eta, std::int64_t steps) {
  if (!(L > 0.0) || !(d0 > 0.0) || !(eta > 0.0) || steps < 1)
    throw DomainError("ngd_bound: all arguments must be positive");
  const double inner = d0 * d0 / (2.0 * eta * static_cast<double>(steps)) + 0.5 * eta;
  return 0.5 * L * inner * inner;
}

}  // namespace pfopt::analysis
