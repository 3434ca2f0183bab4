// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance          run all criteria
//   acceptance 3 7      run only criteria 3 and 7
//
// Exit status is nonzero if any selected criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pfopt/analysis.hpp"
#include "pfopt/evaluation.hpp"
#include "pfopt/optimizers.hpp"
#include "pfopt/problems.hpp"
#include "pfopt/suite.hpp"
#include "pfopt/verify.hpp"

namespace fs = std::filesystem;
using namespace pfopt;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const fs::path kSource = PFOPT_SOURCE_DIR;

// --- 1 ---------------------------------------------------------------------

Outcome fixture_aggregation() {
  Outcome o;
  std::ifstream in(kSource / "data/fixtures/benchmark_results.csv");
  const eval::Report rep = eval::build_report(eval::read_results_csv(in));

  struct Expected {
    const char* id;
    std::array<std::pair<int, int>, 4> counts;
    double reliability;
    double quality;
  };
  const Expected rows[] = {
      {"dog", {{{2, 5}, {7, 14}, {7, 15}, {5, 8}}}, 0.49, 9.9},
      {"dowg", {{{2, 5}, {3, 14}, {8, 15}, {1, 8}}}, 0.31, 12.9},
      {"gog", {{{2, 5}, {2, 14}, {9, 15}, {8, 8}}}, 0.53, 9.3},
      {"dadapt_adam", {{{4, 5}, {10, 14}, {3, 15}, {1, 8}}}, 0.46, 18.5},
      {"prodigy_adam", {{{1, 5}, {12, 14}, {7, 15}, {6, 8}}}, 0.56, 8.2},
      {"adam_1e-3", {{{4, 5}, {14, 14}, {7, 15}, {0, 8}}}, 0.56, 15.5},
      {"adamg", {{{2, 5}, {11, 14}, {15, 15}, {7, 8}}}, 0.76, 3.0},
  };
  int counts_ok = 0, rel_ok = 0, qual_ok = 0;
  for (const auto& e : rows) {
    const eval::OptimizerReport* r = nullptr;
    for (const auto& row : rep.rows)
      if (row.optimizer_id == e.id) r = &row;
    if (!r) {
      o.require(false, std::string("missing row ") + e.id);
      continue;
    }
    bool counts = true;
    for (int c = 0; c < 4; ++c) {
      const auto& pc = r->reliability.per_category[c];
      counts = counts && pc && pc->hits == std::size_t(e.counts[c].first) &&
               pc->total == std::size_t(e.counts[c].second);
    }
    counts_ok += counts;
    o.require(counts, std::string(e.id) + " counts differ");
    const bool rel = std::abs(r->reliability.reported - e.reliability) < 1e-9;
    rel_ok += rel;
    o.require(rel, std::string(e.id) + " reliability " + fmt("%.2f", r->reliability.reported) +
                       " != " + fmt("%.2f", e.reliability));
    const bool qual = std::abs(r->quality.reported - e.quality) < 1e-9;
    qual_ok += qual;
    o.require(qual, std::string(e.id) + " quality " + fmt("%.1f", r->quality.reported) + " (" +
                        fmt("%.3f", r->quality.average) + ") != " + fmt("%.1f", e.quality));
  }
  o.detail = "counts " + std::to_string(counts_ok) + "/7, reliability " + std::to_string(rel_ok) +
             "/7, quality " + std::to_string(qual_ok) + "/7" + (o.detail.empty() ? "" : ": " + o.detail);
  return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome golden_expectation() {
  Outcome o;
  const double err = verify::max_expectation_error(100, 2024);
  o.require(err < 1e-6, "closed form vs quadrature error " + fmt("%.3g", err));
  const analysis::GammaTriple ones{1.0, 1.0, 1.0};
  const double r10 = analysis::golden_dominance({2.0, 1e10}, ones).ratio;
  o.require(r10 > 10.0, "ratio at c2=1e10 is " + fmt("%.3g", r10));
  double prev = 0.0;
  std::string ratios;
  for (double c2 : {1e6, 1e8, 1e10, 1e12}) {
    const double r = analysis::golden_dominance({2.0, c2}, ones).ratio;
    o.require(r > prev, "ratio not increasing at c2=" + fmt("%g", c2));
    ratios += fmt(" %.4g", r);
    prev = r;
  }
  if (o.pass) o.detail = "max rel err " + fmt("%.2e", err) + ", ratios" + ratios;
  return o;
}

// --- 3 ---------------------------------------------------------------------

Outcome scale_laws() {
  Outcome o;
  const QuadraticProblem f = QuadraticProblem::make_default();
  double worst = verify::adagrad_scale_deviation(f, 7.3, 1000);
  o.require(worst < 1e-9, "adagrad_norm deviation " + fmt("%.3g", worst));
  for (double alpha : {0.1, 3.0, 50.0}) {
    const double d = verify::gog_scale_deviation(f, alpha, 0.24, 1000);
    o.require(d < 1e-9, "gog alpha=" + fmt("%g", alpha) + " deviation " + fmt("%.3g", d));
    worst = std::max(worst, d);
  }
  if (o.pass) o.detail = "max deviation " + fmt("%.2e", worst);
  return o;
}

// --- 4 ---------------------------------------------------------------------

Outcome tuning_free() {
  Outcome o;
  const QuadraticProblem f = QuadraticProblem::make_default();
  const ParamVector x0 = f.initial_point(1);
  std::string steps;
  for (OptimizerKind kind : {OptimizerKind::kAdaGradNorm, OptimizerKind::kGog})
    for (double eta : {0.01, 1.0, 100.0}) {
      const auto k = verify::steps_to_tolerance(kind, eta, f, x0, 1e-3, 100000);
      o.require(k >= 0, std::string(to_string(kind)) + " eta=" + fmt("%g", eta) + " did not converge");
      steps += " " + std::to_string(k);
    }
  if (o.pass) o.detail = "steps to ||grad|| < 1e-3:" + steps;
  return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome ngd_bound() {
  Outcome o;
  const auto c = verify::ngd_check(QuadraticProblem::make_default(), 100);
  o.require(c.realized <= c.bound,
            "realized " + fmt("%.4g", c.realized) + " exceeds bound " + fmt("%.4g", c.bound));
  const double off = std::abs(std::log(c.grid_argmin / c.eta_star));
  o.require(off <= c.grid_log_step, "grid minimizer " + fmt("%.4g", c.grid_argmin) +
                                        " vs D0/sqrt(K) " + fmt("%.4g", c.eta_star));
  if (o.pass)
    o.detail = "realized " + fmt("%.4g", c.realized) + " <= bound " + fmt("%.4g", c.bound) +
               ", grid argmin within " + fmt("%.2f", off / c.grid_log_step) + " steps";
  return o;
}

// --- 6 ---------------------------------------------------------------------

Outcome gradient_correctness() {
  Outcome o;
  const double mlp = verify::max_grad_error(MlpProblem::make_default(), 20, 601);
  const double logistic = verify::max_grad_error(LogisticProblem::make_default(), 20, 602);
  const double quad = std::max(
      verify::max_grad_error(QuadraticProblem::make_default(), 20, 603),
      verify::max_grad_error(QuadraticProblem::spectral(25, 1e3, 10.0, 7), 20, 604));
  o.require(mlp < 1e-5, "mlp " + fmt("%.3g", mlp));
  o.require(logistic < 1e-5, "logistic " + fmt("%.3g", logistic));
  o.require(quad < 1e-6, "quadratic " + fmt("%.3g", quad));
  if (o.pass)
    o.detail = "mlp " + fmt("%.2e", mlp) + ", logistic " + fmt("%.2e", logistic) + ", quadratic " +
               fmt("%.2e", quad);
  return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome step_rules() {
  Outcome o;
  AdamGState g(1);
  ParamVector x{0.0};
  adamg_step(g, x, ParamVector{1.0}, 1.0);
  const double dx = std::abs(x[0]);
  o.require(std::abs(dx - 1.9052e-3) <= 1e-6, "AdamG |dx| = " + fmt("%.6e", dx));

  const double c = 0.8;
  AdamState a(1);
  ParamVector y{0.0};
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    adam_step(a, y, ParamVector{c}, 1e-3);
    const double mhat = a.m[0] / (1.0 - std::pow(a.beta1, k));
    const double vhat = a.v[0] / (1.0 - std::pow(a.beta2, k));
    worst = std::max({worst, std::abs(mhat - c), std::abs(vhat - c * c)});
  }
  o.require(worst <= 1e-12, "Adam fixed point deviation " + fmt("%.3g", worst));
  if (o.pass) o.detail = "AdamG |dx| " + fmt("%.6e", dx) + ", Adam fixed point dev " + fmt("%.1e", worst);
  return o;
}

// --- 8 ---------------------------------------------------------------------

Outcome desk_reliability() {
  Outcome o;
  const auto cfg = suite::load_config(kSource / "configs/desk_reliability.yaml");
  const auto outcome = suite::run_suite(cfg, {{}, 1, 0});
  // Seed-mean final loss per (problem, optimizer); failed runs count as +inf.
  std::map<std::pair<std::size_t, std::size_t>, double> mean;
  for (const auto& r : outcome.cells) {
    const double v = r.ok ? r.final_loss : INFINITY;
    mean[{r.cell.problem, r.cell.optimizer}] += v / static_cast<double>(cfg.seeds.size());
  }
  std::size_t adamg = cfg.optimizers.size();
  for (std::size_t i = 0; i < cfg.optimizers.size(); ++i)
    if (cfg.optimizers[i].id == "adamg") adamg = i;
  if (adamg == cfg.optimizers.size()) {
    o.require(false, "config lacks an adamg optimizer");
    return o;
  }
  int within = 0;
  std::string misses;
  for (std::size_t p = 0; p < cfg.problems.size(); ++p) {
    double best = INFINITY;
    for (std::size_t i = 0; i < cfg.optimizers.size(); ++i)
      if (i != adamg) best = std::min(best, mean[{p, i}]);
    const double g = mean[{p, adamg}];
    if (g - best <= 0.2 * std::abs(best)) ++within;
    else misses += " " + cfg.problems[p].id + "(" + fmt("%.3g", g) + " vs " + fmt("%.3g", best) + ")";
  }
  o.require(within >= 5, std::to_string(within) + "/6 within 20%");
  o.detail = std::to_string(within) + "/" + std::to_string(cfg.problems.size()) +
             " problems within 20%" + (misses.empty() ? "" : "; misses:" + misses);
  return o;
}

// --- 9 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "pfopt_acceptance_determinism";
  fs::remove_all(root);
  for (const char* name : {"demo_quadratic.yaml", "desk_reliability.yaml"}) {
    const auto cfg = suite::load_config(kSource / "configs" / name);
    const fs::path a = root / (std::string(name) + ".a"), b = root / (std::string(name) + ".b");
    suite::run_suite(cfg, {a, 1, 0});
    suite::run_suite(cfg, {b, 2, 0});
    o.require(slurp(a / "summary.csv") == slurp(b / "summary.csv"),
              std::string(name) + " summaries differ");
    o.require(!slurp(a / "summary.csv").empty(), std::string(name) + " summary empty");
  }
  fs::remove_all(root);
  if (o.pass) o.detail = "summary.csv byte-identical across repeated runs (jobs 1 vs 2)";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "fixture aggregation", 1.0, fixture_aggregation},
      {2, "golden-expectation verification", 10.0, golden_expectation},
      {3, "scale laws", 5.0, scale_laws},
      {4, "tuning-free convergence", 60.0, tuning_free},
      {5, "NGD bound", 5.0, ngd_bound},
      {6, "gradient correctness", 10.0, gradient_correctness},
      {7, "step-rule conformance", INFINITY, step_rules},
      {8, "desk-scale reliability analogue", 300.0, desk_reliability},
      {9, "determinism", INFINITY, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_seconds,
              "runtime " + fmt("%.2f", secs) + " s over budget " + fmt("%g", c.budget_seconds) + " s");
    std::printf("%s  criterion %d  %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
