// Training loop shared by all optimizers.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfopt/core.hpp"
#include "pfopt/optimizers.hpp"
#include "pfopt/random.hpp"

namespace pfopt {

struct RunFailure {
  std::int64_t step = 0;        // 1-based step at which the run aborted
  std::size_t coordinate = 0;   // offending coordinate (0 for a scalar loss)
  double value = 0.0;           // offending value
  std::string message;
};

struct RunTrace {
  // Minibatch loss observed before each executed step.
  std::vector<double> losses;
  ParamVector x;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double final_grad_norm = std::numeric_limits<double>::quiet_NaN();
  std::optional<RunFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

// Called before step k with the current iterate and its evaluation.
using StepObserver =
    std::function<void(std::int64_t k, std::span<const double> x, const GradEval& eval)>;

// Sample id consumed at step k of a run seeded with `seed`.
inline std::uint64_t step_sample_id(std::uint64_t seed, std::int64_t k) {
  return derive_key(seed, static_cast<std::uint64_t>(k));
}

inline RunTrace run(const RunConfig& cfg, const Objective& problem,
                    std::span<const double> x0, const StepObserver& observer = {}) {
  validate(cfg);
  if (x0.size() != problem.dimension())
    throw ContractError("run: x0 dimension " + std::to_string(x0.size()) +
                        " does not match problem dimension " +
                        std::to_string(problem.dimension()));
  require_finite(x0, "run: x0");

  const Schedule schedule = cfg.effective_schedule();
  Optimizer opt(cfg, x0);
  RunTrace trace;
  trace.x.assign(x0.begin(), x0.end());
  trace.losses.reserve(static_cast<std::size_t>(cfg.steps));

  for (std::int64_t k = 1; k <= cfg.steps; ++k) {
    try {
      const GradEval eval = cfg.full_batch ? problem.evaluate_full(trace.x)
                                           : problem.evaluate(trace.x, step_sample_id(cfg.seed, k));
      if (!std::isfinite(eval.loss))
        throw NumericError("non-finite loss", 0, eval.loss);
      trace.losses.push_back(eval.loss);
      if (observer) observer(k, trace.x, eval);
      opt.step(trace.x, eval.grad, schedule_value(schedule, k));
    } catch (const NumericError& e) {
      trace.failure = RunFailure{k, e.index, e.value, e.what()};
      return trace;
    }
  }

  const GradEval final_eval = problem.evaluate_full(trace.x);
  trace.final_loss = final_eval.loss;
  trace.final_grad_norm = norm(final_eval.grad);
  if (!std::isfinite(trace.final_loss) || first_non_finite(final_eval.grad))
    trace.failure = RunFailure{cfg.steps + 1, 0, trace.final_loss,
                               "non-finite objective at the final iterate"};
  return trace;
}

}  // namespace pfopt
