// Sweeps the base step size on the default quadratic and prints the final
// gradient norm reached by each optimizer.

#include <cstdio>

#include "pfopt/problems.hpp"
#include "pfopt/run.hpp"

int main() {
  const pfopt::QuadraticProblem problem = pfopt::QuadraticProblem::make_default();
  const pfopt::ParamVector x0 = problem.initial_point(1);
  const pfopt::OptimizerKind kinds[] = {pfopt::OptimizerKind::kAdaGradNorm,
                                        pfopt::OptimizerKind::kGog, pfopt::OptimizerKind::kAdam,
                                        pfopt::OptimizerKind::kAdamG};

  std::printf("%-14s", "eta");
  for (auto k : kinds) std::printf("%14s", std::string(pfopt::to_string(k)).c_str());
  std::printf("\n");
  for (double eta : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}) {
    std::printf("%-14g", eta);
    for (auto k : kinds) {
      pfopt::RunConfig cfg;
      cfg.optimizer = k;
      cfg.eta = eta;
      cfg.steps = 2000;
      const auto trace = pfopt::run(cfg, problem, x0);
      if (trace.ok()) std::printf("%14.3e", trace.final_grad_norm);
      else std::printf("%14s", "diverged");
    }
    std::printf("\n");
  }
  std::printf("\nfinal ||grad f|| after 2000 full-batch steps (d=10, condition 100)\n");
}
