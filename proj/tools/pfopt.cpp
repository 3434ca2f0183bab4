// pfopt: run experiment suites, aggregate results, verify numerics.
//
// Exit codes: 0 success, 1 some runs or checks failed, 2 usage or config error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pfopt/evaluation.hpp"
#include "pfopt/io.hpp"
#include "pfopt/suite.hpp"
#include "pfopt/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPartialFailure = 1;
constexpr int kUsageError = 2;

int cmd_run(const std::string& config, const std::string& out, unsigned jobs,
            std::uint64_t seed_offset) {
  pfopt::suite::SuiteConfig cfg;
  try {
    cfg = pfopt::suite::load_config(config);
  } catch (const pfopt::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  }
  if (jobs == 0) {
    std::cerr << "--jobs must be >= 1\n";
    return kUsageError;
  }
  const auto outcome = pfopt::suite::run_suite(cfg, {out, jobs, seed_offset});
  for (const auto& r : outcome.cells)
    if (!r.ok)
      std::cerr << "cell " << r.cell.index << " (" << cfg.problems[r.cell.problem].id << ", "
                << cfg.optimizers[r.cell.optimizer].id << ", seed " << r.cell.seed
                << ") failed: " << r.error << "\n";
  std::cout << outcome.cells.size() << " runs, " << outcome.failures << " failed; results in "
            << out << "\n";
  return outcome.failures == 0 ? kOk : kPartialFailure;
}

int cmd_report(const std::string& input, const std::string& out, double threshold, bool json) {
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << input << "\n";
    return kUsageError;
  }
  pfopt::eval::Report rep;
  try {
    rep = pfopt::eval::build_report(pfopt::eval::read_results_csv(in), threshold);
  } catch (const pfopt::ValidationError& e) {
    std::cerr << "invalid results: " << e.what() << "\n";
    return kUsageError;
  }
  const std::string js = pfopt::eval::to_json(rep).dump(2) + "\n";
  const std::string table = pfopt::eval::format_table(rep);
  std::cout << (json ? js : table);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    pfopt::io::write_file(std::filesystem::path(out) / "report.json", js);
    pfopt::io::write_file(std::filesystem::path(out) / "report.txt", table);
  }
  return kOk;
}

int cmd_verify(const std::string& level, bool broken) {
  pfopt::verify::VerifyOptions opts;
  opts.level = level == "full" ? pfopt::verify::Level::kFull : pfopt::verify::Level::kFast;
  opts.inject_broken_gradient = broken;
  const auto checks = pfopt::verify::run_checks(opts);
  std::size_t failed = 0;
  for (const auto& c : checks) {
    std::printf("%s  %-44s measured %-12.4g tolerance %-10.4g %6.2fs%s%s\n",
                c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured, c.tolerance, c.seconds,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    if (!c.passed) ++failed;
  }
  std::printf("%zu/%zu checks passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? kOk : kPartialFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-free optimizer experiments"};
  app.require_subcommand(1);

  std::string config, out = "results", input, level = "fast";
  unsigned jobs = 1;
  std::uint64_t seed_offset = 0;
  double threshold = pfopt::eval::kDefaultThreshold;
  bool json = false, broken = false;

  auto* run = app.add_subcommand("run", "Run every (problem, optimizer, seed) cell of a suite");
  run->add_option("--config", config, "Suite config (YAML)")->required();
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--jobs", jobs, "Concurrent runs")->capture_default_str();
  run->add_option("--seed-offset", seed_offset, "Added to every configured seed");

  auto* report = app.add_subcommand("report", "Reliability and solution quality from a results CSV");
  report->add_option("input", input, "CSV with task_id, optimizer_id, metric")->required();
  report->add_option("--out", out, "Also write report.json and report.txt here");
  report->add_option("--threshold", threshold, "Closeness threshold (absolute points)")
      ->capture_default_str();
  report->add_flag("--json", json, "Print JSON instead of the table");

  auto* verify = app.add_subcommand("verify", "Numerical self-checks");
  verify->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  verify->add_flag("--inject-broken-gradient", broken)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*run) return cmd_run(config, out, jobs, seed_offset);
    if (*report) return cmd_report(input, report->count("--out") ? out : "", threshold, json);
    return cmd_verify(level, broken);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartialFailure;
  }
}
