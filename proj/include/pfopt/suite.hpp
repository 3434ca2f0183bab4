// Experiment suites: YAML config, cross-product execution, CSV outputs.
//
// Config schema (every key outside this list is rejected):
//
//   problems:            # non-empty list
//     - id: quad         # [A-Za-z0-9_.-]+, unique
//       type: quadratic  # quadratic | least_squares | logistic | mlp | rosenbrock
//       <param>: value   # type-specific, see problem_param_table()
//   optimizers:          # non-empty list
//     - id: adamg
//       type: adamg      # adagrad_norm | gog | adam | adamg | ngd | dog | dowg
//       eta, p, q, beta1, beta2, beta3, epsilon, guard: number
//       schedule: constant | cosine
//       full_batch: bool
//   suite:
//     steps: 1000
//     seeds: [1, 2, 3]
//     trajectories: true
//   report:              # optional
//     threshold: 5.0
//     evaluate: false    # write report.json/report.txt; needs adam_1e-{2,3,4,5} ids
//
// Outputs under --out: trajectories/<problem>__<optimizer>__seed<s>.csv
// (step,loss), summary.csv (one row per cell) and results.csv (evaluation
// schema, metric = final full-batch loss, lower is better).
#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pfopt/core.hpp"
#include "pfopt/evaluation.hpp"
#include "pfopt/io.hpp"
#include "pfopt/problems.hpp"
#include "pfopt/run.hpp"

namespace pfopt::suite {

struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

struct ProblemSpec {
  std::string id;
  std::string type;
  std::map<std::string, double> params;  // defaults filled in
};

struct OptimizerSpec {
  std::string id;
  RunConfig config;  // steps and seed are set per cell
};

struct ReportOptions {
  double threshold = eval::kDefaultThreshold;
  bool evaluate = false;
};

struct SuiteConfig {
  std::vector<ProblemSpec> problems;
  std::vector<OptimizerSpec> optimizers;
  std::int64_t steps = 1000;
  std::vector<std::uint64_t> seeds;
  bool trajectories = true;
  ReportOptions report;
};

// Parameters and defaults per problem type.
inline const std::map<std::string, std::map<std::string, double>>& problem_param_table() {
  static const std::map<std::string, std::map<std::string, double>> table = {
      {"quadratic",
       {{"dim", 10}, {"condition", 100}, {"lambda_max", 100}, {"noise_sigma", 0},
        {"init_scale", 0.1}, {"data_seed", 1}}},
      {"least_squares", {{"n", 256}, {"d", 10}, {"batch", 16}, {"noise", 0.1}, {"data_seed", 4}}},
      {"logistic",
       {{"n", 512}, {"d", 20}, {"separation", 1.5}, {"l2", 1e-3}, {"batch", 32}, {"data_seed", 2}}},
      {"mlp",
       {{"n", 600}, {"inputs", 8}, {"hidden", 16}, {"classes", 3}, {"spread", 1.0}, {"batch", 32},
        {"data_seed", 3}}},
      {"rosenbrock", {{"dim", 2}, {"a", 1}, {"b", 100}}},
  };
  return table;
}

inline const std::set<std::string>& integer_params() {
  static const std::set<std::string> s = {"dim", "n", "d", "batch", "inputs",
                                          "hidden", "classes", "data_seed"};
  return s;
}

inline std::unique_ptr<Objective> make_problem(const ProblemSpec& spec) {
  const auto& p = spec.params;
  auto u = [&](const char* k) { return static_cast<std::size_t>(p.at(k)); };
  auto s = [&](const char* k) { return static_cast<std::uint64_t>(p.at(k)); };
  if (spec.type == "quadratic")
    return std::make_unique<QuadraticProblem>(QuadraticProblem::spectral(
        u("dim"), p.at("condition"), p.at("lambda_max"), s("data_seed"), p.at("noise_sigma"),
        p.at("init_scale")));
  if (spec.type == "least_squares")
    return std::make_unique<StochasticLeastSquares>(
        StochasticLeastSquares::make(u("n"), u("d"), u("batch"), p.at("noise"), s("data_seed")));
  if (spec.type == "logistic")
    return std::make_unique<LogisticProblem>(LogisticProblem::make(
        u("n"), u("d"), p.at("separation"), p.at("l2"), u("batch"), s("data_seed")));
  if (spec.type == "mlp")
    return std::make_unique<MlpProblem>(MlpProblem::make(u("n"), u("inputs"), u("hidden"),
                                                         u("classes"), p.at("spread"), u("batch"),
                                                         s("data_seed")));
  if (spec.type == "rosenbrock")
    return std::make_unique<RosenbrockProblem>(u("dim"), p.at("a"), p.at("b"));
  throw ConfigError("unknown problem type '" + spec.type + "'");
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string at(const YAML::Node& n, const std::string& field) {
  const auto m = n.Mark();
  std::string s = "field '" + field + "'";
  if (!m.is_null()) s = "line " + std::to_string(m.line + 1) + ", column " +
                        std::to_string(m.column + 1) + ": " + s;
  return s;
}

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& field, const std::string& msg) {
  throw ConfigError(at(n, field) + ": " + msg);
}

inline void check_keys(const YAML::Node& map, const std::string& ctx,
                       const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(map, ctx, "expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, ctx + "." + key, "unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(n, field, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, field, "cannot parse '" + n.Scalar() + "'");
  }
}

inline double number(const YAML::Node& n, const std::string& field) {
  const double v = scalar<double>(n, field);
  if (!std::isfinite(v)) fail(n, field, "must be finite");
  return v;
}

inline std::string identifier(const YAML::Node& n, const std::string& field) {
  const auto s = scalar<std::string>(n, field);
  const bool ok = !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
  if (!ok) fail(n, field, "identifier must match [A-Za-z0-9_.-]+");
  return s;
}

inline const YAML::Node require(const YAML::Node& map, const char* key, const std::string& ctx) {
  const YAML::Node n = map[key];
  if (!n) fail(map, ctx + "." + key, "missing required key");
  return n;
}

inline ProblemSpec parse_problem(const YAML::Node& n, const std::string& ctx) {
  if (!n.IsMap()) fail(n, ctx, "expected a mapping");
  ProblemSpec spec;
  spec.id = identifier(require(n, "id", ctx), ctx + ".id");
  const YAML::Node type = require(n, "type", ctx);
  spec.type = scalar<std::string>(type, ctx + ".type");
  const auto& table = problem_param_table();
  const auto it = table.find(spec.type);
  if (it == table.end()) fail(type, ctx + ".type", "unknown problem type '" + spec.type + "'");
  spec.params = it->second;
  std::set<std::string> allowed = {"id", "type"};
  for (const auto& [k, v] : it->second) allowed.insert(k);
  check_keys(n, ctx, allowed);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (key == "id" || key == "type") continue;
    const std::string f = ctx + "." + key;
    const double v = number(kv.second, f);
    if (integer_params().count(key) && (v < 0 || v != std::floor(v)))
      fail(kv.second, f, "must be a non-negative integer");
    spec.params[key] = v;
  }
  try {
    make_problem(spec);
  } catch (const std::exception& e) {
    fail(n, ctx, std::string("invalid problem: ") + e.what());
  }
  return spec;
}

inline OptimizerSpec parse_optimizer(const YAML::Node& n, const std::string& ctx) {
  check_keys(n, ctx,
             {"id", "type", "eta", "p", "q", "beta1", "beta2", "beta3", "epsilon", "guard",
              "schedule", "full_batch"});
  OptimizerSpec spec;
  spec.id = identifier(require(n, "id", ctx), ctx + ".id");
  const YAML::Node type = require(n, "type", ctx);
  const auto kind = parse_optimizer_kind(scalar<std::string>(type, ctx + ".type"));
  if (!kind) fail(type, ctx + ".type", "unknown optimizer '" + type.Scalar() + "'");
  RunConfig& c = spec.config;
  c.optimizer = *kind;
  const std::pair<const char*, double*> fields[] = {
      {"eta", &c.eta},     {"p", &c.p},         {"q", &c.q},
      {"beta1", &c.beta1}, {"beta2", &c.beta2}, {"beta3", &c.beta3},
      {"epsilon", &c.epsilon}, {"guard", &c.guard}};
  for (const auto& [key, dst] : fields)
    if (n[key]) *dst = number(n[key], ctx + "." + key);
  if (n["full_batch"]) c.full_batch = scalar<bool>(n["full_batch"], ctx + ".full_batch");
  if (n["schedule"]) {
    const auto s = scalar<std::string>(n["schedule"], ctx + ".schedule");
    // Placeholder horizon; fixed up once suite.steps is known.
    if (s == "constant") c.schedule = Schedule::constant(c.eta, 1);
    else if (s == "cosine") c.schedule = Schedule::cosine(c.eta, 1);
    else fail(n["schedule"], ctx + ".schedule", "expected constant or cosine");
  }
  try {
    RunConfig probe = c;
    if (probe.schedule) probe.schedule->horizon = probe.steps;
    validate(probe);
  } catch (const ValidationError& e) {
    fail(n, ctx, e.what());
  }
  return spec;
}

}  // namespace detail

inline SuiteConfig parse_config(const YAML::Node& root) {
  using namespace detail;
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  check_keys(root, "config", {"problems", "optimizers", "suite", "report"});
  SuiteConfig cfg;

  const YAML::Node problems = require(root, "problems", "config");
  if (!problems.IsSequence() || problems.size() == 0)
    fail(problems, "problems", "expected a non-empty list");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    auto p = parse_problem(problems[i], "problems[" + std::to_string(i) + "]");
    if (!seen.insert(p.id).second) fail(problems[i], "problems[" + std::to_string(i) + "].id",
                                        "duplicate id '" + p.id + "'");
    cfg.problems.push_back(std::move(p));
  }

  const YAML::Node optimizers = require(root, "optimizers", "config");
  if (!optimizers.IsSequence() || optimizers.size() == 0)
    fail(optimizers, "optimizers", "expected a non-empty list");
  seen.clear();
  for (std::size_t i = 0; i < optimizers.size(); ++i) {
    auto o = parse_optimizer(optimizers[i], "optimizers[" + std::to_string(i) + "]");
    if (!seen.insert(o.id).second) fail(optimizers[i], "optimizers[" + std::to_string(i) + "].id",
                                        "duplicate id '" + o.id + "'");
    cfg.optimizers.push_back(std::move(o));
  }

  const YAML::Node suite = require(root, "suite", "config");
  check_keys(suite, "suite", {"steps", "seeds", "trajectories"});
  const YAML::Node steps = require(suite, "steps", "suite");
  cfg.steps = scalar<std::int64_t>(steps, "suite.steps");
  if (cfg.steps < 1) fail(steps, "suite.steps", "must be >= 1");
  const YAML::Node seeds = require(suite, "seeds", "suite");
  if (!seeds.IsSequence() || seeds.size() == 0) fail(seeds, "suite.seeds", "expected a non-empty list");
  for (std::size_t i = 0; i < seeds.size(); ++i)
    cfg.seeds.push_back(scalar<std::uint64_t>(seeds[i], "suite.seeds[" + std::to_string(i) + "]"));
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    fail(seeds, "suite.seeds", "seeds must be distinct");
  if (suite["trajectories"]) cfg.trajectories = scalar<bool>(suite["trajectories"], "suite.trajectories");

  for (auto& o : cfg.optimizers)
    if (o.config.schedule) o.config.schedule->horizon = cfg.steps;

  if (const YAML::Node report = root["report"]) {
    check_keys(report, "report", {"threshold", "evaluate"});
    if (report["threshold"]) {
      cfg.report.threshold = number(report["threshold"], "report.threshold");
      if (!(cfg.report.threshold > 0)) fail(report["threshold"], "report.threshold", "must be > 0");
    }
    if (report["evaluate"]) cfg.report.evaluate = scalar<bool>(report["evaluate"], "report.evaluate");
    if (cfg.report.evaluate) {
      for (auto id : eval::kAdamIds)
        if (std::none_of(cfg.optimizers.begin(), cfg.optimizers.end(),
                         [&](const OptimizerSpec& o) { return o.id == id; }))
          fail(report["evaluate"], "report.evaluate",
               "requires an optimizer with id '" + std::string(id) + "'");
    }
  }
  return cfg;
}

inline SuiteConfig parse_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
}

inline SuiteConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Execution

struct Cell {
  std::size_t index = 0;
  std::size_t problem = 0;
  std::size_t optimizer = 0;
  std::uint64_t seed = 0;  // after the offset is applied
};

struct CellResult {
  Cell cell;
  bool ok = false;
  std::int64_t steps_completed = 0;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  std::string error;
  std::vector<double> losses;
};

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  std::uint64_t seed_offset = 0;
};

struct SuiteOutcome {
  std::vector<CellResult> cells;
  std::size_t failures = 0;
};

inline std::vector<Cell> enumerate_cells(const SuiteConfig& cfg, std::uint64_t seed_offset) {
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    for (std::size_t o = 0; o < cfg.optimizers.size(); ++o)
      for (std::uint64_t s : cfg.seeds)
        cells.push_back({cells.size(), p, o, s + seed_offset});
  return cells;
}

inline std::string trajectory_name(const SuiteConfig& cfg, const Cell& c) {
  return cfg.problems[c.problem].id + "__" + cfg.optimizers[c.optimizer].id + "__seed" +
         std::to_string(c.seed) + ".csv";
}

inline CellResult run_cell(const SuiteConfig& cfg, const Objective& problem, const Cell& cell) {
  CellResult res;
  res.cell = cell;
  try {
    RunConfig rc = cfg.optimizers[cell.optimizer].config;
    rc.steps = cfg.steps;
    rc.seed = cell.seed;
    const ParamVector x0 = problem.initial_point(cell.seed);
    RunTrace trace = run(rc, problem, x0);
    res.losses = std::move(trace.losses);
    res.steps_completed = static_cast<std::int64_t>(res.losses.size());
    if (trace.ok()) {
      res.ok = true;
      res.final_loss = trace.final_loss;
      res.final_grad_norm = trace.final_grad_norm;
    } else {
      const auto& f = *trace.failure;
      res.error = "step " + std::to_string(f.step) + ": " + f.message;
    }
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

inline std::string trajectory_csv(const std::vector<double>& losses) {
  std::string s = "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i)
    s += std::to_string(i + 1) + "," + io::format_double(losses[i]) + "\n";
  return s;
}

inline std::string csv_safe(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

inline std::string summary_csv(const SuiteConfig& cfg, const std::vector<CellResult>& cells) {
  std::string s = "cell,problem,optimizer,seed,status,steps_completed,final_loss,final_grad_norm,error\n";
  for (const auto& r : cells) {
    s += std::to_string(r.cell.index) + "," + cfg.problems[r.cell.problem].id + "," +
         cfg.optimizers[r.cell.optimizer].id + "," + std::to_string(r.cell.seed) + "," +
         (r.ok ? "ok" : "failed") + "," + std::to_string(r.steps_completed) + ",";
    if (r.ok) s += io::format_double(r.final_loss) + "," + io::format_double(r.final_grad_norm);
    else s += ",";
    s += "," + csv_safe(r.error) + "\n";
  }
  return s;
}

// One task per (problem, seed); failed runs become missing metrics.
inline std::vector<eval::TaskResult> to_task_results(const SuiteConfig& cfg,
                                                     const std::vector<CellResult>& cells) {
  std::vector<eval::TaskResult> out;
  for (const auto& r : cells) {
    eval::TaskResult t;
    t.task_id = cfg.problems[r.cell.problem].id + "/seed" + std::to_string(r.cell.seed);
    t.optimizer_id = cfg.optimizers[r.cell.optimizer].id;
    if (r.ok) t.metric = r.final_loss;
    t.higher_is_better = false;
    out.push_back(std::move(t));
  }
  return out;
}

inline std::string results_csv(const std::vector<eval::TaskResult>& results) {
  std::string s = "task_id,optimizer_id,metric,higher_is_better\n";
  for (const auto& t : results)
    s += t.task_id + "," + t.optimizer_id + "," + (t.metric ? io::format_double(*t.metric) : "") +
         "," + (t.higher_is_better ? "1" : "0") + "\n";
  return s;
}

// Runs every cell. Cells execute on up to `jobs` threads; all outputs are
// ordered by cell index so they do not depend on the job count.
inline SuiteOutcome run_suite(const SuiteConfig& cfg, const RunOptions& opts) {
  if (opts.jobs == 0) throw ConfigError("--jobs must be >= 1");
  namespace fs = std::filesystem;
  std::vector<std::unique_ptr<Objective>> problems;
  for (const auto& p : cfg.problems) problems.push_back(make_problem(p));

  const auto cells = enumerate_cells(cfg, opts.seed_offset);
  const bool write = !opts.out_dir.empty();
  if (write) {
    fs::create_directories(opts.out_dir);
    if (cfg.trajectories) fs::create_directories(opts.out_dir / "trajectories");
  }

  SuiteOutcome outcome;
  outcome.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      outcome.cells[i] = run_cell(cfg, *problems[cells[i].problem], cells[i]);
    }
  };
  const unsigned n = std::min<unsigned>(opts.jobs, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& r : outcome.cells)
    if (!r.ok) ++outcome.failures;

  if (write) {
    if (cfg.trajectories)
      for (const auto& r : outcome.cells)
        io::write_file(opts.out_dir / "trajectories" / trajectory_name(cfg, r.cell),
                       trajectory_csv(r.losses));
    io::write_file(opts.out_dir / "summary.csv", summary_csv(cfg, outcome.cells));
    const auto results = to_task_results(cfg, outcome.cells);
    io::write_file(opts.out_dir / "results.csv", results_csv(results));
    if (cfg.report.evaluate) {
      const auto rep = eval::build_report(results, cfg.report.threshold);
      io::write_file(opts.out_dir / "report.json", eval::to_json(rep).dump(2) + "\n");
      io::write_file(opts.out_dir / "report.txt", eval::format_table(rep));
    }
  }
  return outcome;
}

}  // namespace pfopt::suite
