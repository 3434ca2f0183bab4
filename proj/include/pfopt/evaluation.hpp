// Reliability and solution-quality metrics for parameter-free optimizers.
//
// Tasks are grouped by which of Adam(1e-2), Adam(1e-3), Adam(1e-4), Adam(1e-5)
// performs best. Within each group an optimizer scores a hit when it lands
// within `threshold` absolute points of that best Adam; reliability is the
// unweighted mean of the per-group hit ratios. Solution quality is the mean
// clamped gap to the best Adam, again averaged evenly over groups.
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pfopt/core.hpp"

namespace pfopt::eval {

// Fixed order; ties between Adam runs go to the earlier (larger) learning rate.
inline constexpr std::array<std::string_view, 4> kAdamIds = {"adam_1e-2", "adam_1e-3",
                                                             "adam_1e-4", "adam_1e-5"};
inline constexpr double kDefaultThreshold = 5.0;

struct TaskResult {
  std::string task_id;
  std::string optimizer_id;
  std::optional<double> metric;  // nullopt encodes a missing ("nan") entry
  bool higher_is_better = true;
};

struct CategoryAssignment {
  std::string task_id;
  std::string best_adam_id;
  double best_metric = 0.0;
  bool higher_is_better = true;
};

inline std::size_t adam_index(std::string_view id) {
  for (std::size_t i = 0; i < kAdamIds.size(); ++i)
    if (kAdamIds[i] == id) return i;
  throw ValidationError("not an Adam category id: " + std::string(id));
}

// Indexed view of a result set; rejects duplicates and non-finite metrics.
class ResultTable {
 public:
  explicit ResultTable(const std::vector<TaskResult>& results) {
    if (results.empty()) throw ValidationError("result set is empty");
    for (const auto& r : results) {
      if (r.task_id.empty() || r.optimizer_id.empty())
        throw ValidationError("task_id and optimizer_id must be non-empty");
      if (r.metric && !std::isfinite(*r.metric))
        throw ValidationError("non-finite metric for " + r.task_id + "/" + r.optimizer_id);
      auto [it, fresh] = tasks_.try_emplace(r.task_id);
      if (fresh) {
        task_order_.push_back(r.task_id);
        it->second.higher_is_better = r.higher_is_better;
      } else if (it->second.higher_is_better != r.higher_is_better) {
        throw ValidationError("task " + r.task_id + " mixes metric directions");
      }
      if (!it->second.metrics.emplace(r.optimizer_id, r.metric).second)
        throw ValidationError("duplicate entry " + r.task_id + "/" + r.optimizer_id);
      if (known_.emplace(r.optimizer_id, optimizer_order_.size()).second)
        optimizer_order_.push_back(r.optimizer_id);
    }
  }

  const std::vector<std::string>& tasks() const { return task_order_; }
  const std::vector<std::string>& optimizers() const { return optimizer_order_; }
  bool knows_optimizer(const std::string& id) const { return known_.count(id) != 0; }
  bool higher_is_better(const std::string& task) const { return tasks_.at(task).higher_is_better; }

  // Metric of optimizer on task; nullopt when missing or absent.
  std::optional<double> metric(const std::string& task, const std::string& optimizer) const {
    const auto& m = tasks_.at(task).metrics;
    auto it = m.find(optimizer);
    return it == m.end() ? std::nullopt : it->second;
  }

  bool has_entry(const std::string& task, const std::string& optimizer) const {
    return tasks_.at(task).metrics.count(optimizer) != 0;
  }

 private:
  struct Task {
    bool higher_is_better = true;
    std::map<std::string, std::optional<double>> metrics;
  };
  std::map<std::string, Task> tasks_;
  std::vector<std::string> task_order_;
  std::vector<std::string> optimizer_order_;
  std::map<std::string, std::size_t> known_;
};

inline std::vector<CategoryAssignment> assign_categories(const ResultTable& table) {
  std::vector<CategoryAssignment> out;
  for (const auto& task : table.tasks()) {
    const bool hib = table.higher_is_better(task);
    std::optional<std::size_t> best;
    double best_metric = 0.0;
    for (std::size_t i = 0; i < kAdamIds.size(); ++i) {
      const std::string id(kAdamIds[i]);
      if (!table.has_entry(task, id))
        throw ValidationError("task " + task + " lacks an entry for " + id);
      const auto m = table.metric(task, id);
      if (!m) continue;
      if (!best || (hib ? *m > best_metric : *m < best_metric)) {
        best = i;
        best_metric = *m;
      }
    }
    if (!best) throw ValidationError("task " + task + " has no non-missing Adam result");
    out.push_back({task, std::string(kAdamIds[*best]), best_metric, hib});
  }
  return out;
}

inline std::vector<CategoryAssignment> assign_categories(const std::vector<TaskResult>& results) {
  return assign_categories(ResultTable(results));
}

// Shortfall of `metric` relative to `best`, positive when worse.
inline double shortfall(double metric, double best, bool higher_is_better) {
  return higher_is_better ? best - metric : metric - best;
}

inline bool is_close(std::optional<double> metric, double best,
                     double threshold = kDefaultThreshold, bool higher_is_better = true) {
  if (!metric) return false;
  return shortfall(*metric, best, higher_is_better) < threshold;
}

// ---------------------------------------------------------------------------
// Rounding used when printing the aggregate tables.

// Each category ratio floored to a whole percent, averaged, ties rounded toward
// zero, returned as a fraction with two decimals.
inline double reported_reliability(const std::vector<std::pair<std::size_t, std::size_t>>& counts) {
  if (counts.empty()) return std::numeric_limits<double>::quiet_NaN();
  long long sum = 0;
  for (auto [hits, total] : counts)
    sum += static_cast<long long>(hits * 100 / total);
  const long long n = static_cast<long long>(counts.size());
  long long pct = sum / n;
  if (2 * (sum % n) > n) ++pct;
  return static_cast<double>(pct) / 100.0;
}

// Half-up rounding to `decimals` places.
inline double round_half_up(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(v * scale + 0.5 + 1e-9) / scale;
}

// ---------------------------------------------------------------------------

struct CategoryRatio {
  std::size_t hits = 0;
  std::size_t total = 0;
  double ratio() const { return static_cast<double>(hits) / static_cast<double>(total); }
};

struct ReliabilityResult {
  std::array<std::optional<CategoryRatio>, 4> per_category;  // nullopt: empty category
  double average = 0.0;
  double reported = 0.0;
  // Tasks whose shortfall sits on the threshold (within 1e-9).
  std::vector<std::string> boundary_tasks;
};

struct QualityResult {
  std::array<std::optional<double>, 4> per_category;
  double average = 0.0;
  double reported = 0.0;
};

namespace detail {

inline void require_optimizer(const ResultTable& table, const std::string& id) {
  if (!table.knows_optimizer(id)) throw ValidationError("unknown optimizer id: " + id);
}

inline void require_coverage(const ResultTable& table,
                             const std::vector<CategoryAssignment>& assignments) {
  if (assignments.size() != table.tasks().size())
    throw ValidationError("category assignments do not cover every task");
}

}  // namespace detail

inline ReliabilityResult reliability(const ResultTable& table,
                                     const std::vector<CategoryAssignment>& assignments,
                                     const std::string& optimizer_id,
                                     double threshold = kDefaultThreshold) {
  detail::require_optimizer(table, optimizer_id);
  detail::require_coverage(table, assignments);
  std::array<CategoryRatio, 4> counts{};
  ReliabilityResult res;
  for (const auto& a : assignments) {
    auto& c = counts[adam_index(a.best_adam_id)];
    ++c.total;
    const auto m = table.metric(a.task_id, optimizer_id);
    if (is_close(m, a.best_metric, threshold, a.higher_is_better)) ++c.hits;
    if (m && std::abs(shortfall(*m, a.best_metric, a.higher_is_better) - threshold) <=
                 1e-9 * std::max(1.0, std::abs(threshold)))
      res.boundary_tasks.push_back(a.task_id);
  }
  std::vector<std::pair<std::size_t, std::size_t>> nonempty;
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].total == 0) continue;
    res.per_category[i] = counts[i];
    nonempty.emplace_back(counts[i].hits, counts[i].total);
    sum += counts[i].ratio();
  }
  res.average = sum / static_cast<double>(nonempty.size());
  res.reported = reported_reliability(nonempty);
  return res;
}

inline QualityResult solution_quality(const ResultTable& table,
                                      const std::vector<CategoryAssignment>& assignments,
                                      const std::string& optimizer_id) {
  detail::require_optimizer(table, optimizer_id);
  detail::require_coverage(table, assignments);
  std::array<double, 4> gap_sum{};
  std::array<std::size_t, 4> n{};
  for (const auto& a : assignments) {
    const std::size_t c = adam_index(a.best_adam_id);
    const auto m = table.metric(a.task_id, optimizer_id);
    double gap;
    if (m) gap = std::max(shortfall(*m, a.best_metric, a.higher_is_better), 0.0);
    // A missing entry scores as zero performance.
    else gap = a.higher_is_better ? std::max(a.best_metric, 0.0) : std::abs(a.best_metric);
    gap_sum[c] += gap;
    ++n[c];
  }
  QualityResult res;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (n[i] == 0) continue;
    res.per_category[i] = gap_sum[i] / static_cast<double>(n[i]);
    sum += *res.per_category[i];
    ++used;
  }
  res.average = sum / static_cast<double>(used);
  res.reported = round_half_up(res.average, 1);
  return res;
}

// ---------------------------------------------------------------------------
// Result files.
//
// CSV with header row; required columns task_id, optimizer_id, metric; an
// optional higher_is_better column (1/0, true/false). An empty metric cell or
// the literal "nan" marks a missing result.

inline std::vector<TaskResult> read_results_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  auto trim = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    return s;
  };

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("results csv: empty input");
  const auto header = split(trim(line));
  int c_task = -1, c_opt = -1, c_metric = -1, c_dir = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = trim(header[i]);
    int* slot = h == "task_id"            ? &c_task
                : h == "optimizer_id"     ? &c_opt
                : h == "metric"           ? &c_metric
                : h == "higher_is_better" ? &c_dir
                                          : nullptr;
    if (!slot) throw ValidationError("results csv: unknown column '" + h + "'");
    if (*slot >= 0) throw ValidationError("results csv: duplicate column '" + h + "'");
    *slot = static_cast<int>(i);
  }
  if (c_task < 0 || c_opt < 0 || c_metric < 0)
    throw ValidationError("results csv: header must contain task_id, optimizer_id, metric");

  std::vector<TaskResult> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = "results csv line " + std::to_string(lineno) + ": ";
    if (cells.size() != header.size()) throw ValidationError(where + "wrong number of fields");
    TaskResult r;
    r.task_id = trim(cells[c_task]);
    r.optimizer_id = trim(cells[c_opt]);
    const std::string m = trim(cells[c_metric]);
    if (!m.empty() && m != "nan") {
      std::istringstream ms(m);
      ms.imbue(std::locale::classic());
      double v;
      if (!(ms >> v) || !ms.eof() || !std::isfinite(v))
        throw ValidationError(where + "bad metric '" + m + "'");
      r.metric = v;
    }
    if (c_dir >= 0) {
      const std::string d = trim(cells[c_dir]);
      if (d == "1" || d == "true") r.higher_is_better = true;
      else if (d == "0" || d == "false") r.higher_is_better = false;
      else throw ValidationError(where + "bad higher_is_better '" + d + "'");
    }
    if (r.task_id.empty() || r.optimizer_id.empty())
      throw ValidationError(where + "empty task_id or optimizer_id");
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ValidationError("results csv: no data rows");
  return out;
}

// ---------------------------------------------------------------------------
// Aggregate report.

struct OptimizerReport {
  std::string optimizer_id;
  ReliabilityResult reliability;
  QualityResult quality;
};

struct Report {
  double threshold = kDefaultThreshold;
  std::size_t tasks = 0;
  std::array<std::size_t, 4> category_totals{};
  std::vector<CategoryAssignment> assignments;
  std::vector<OptimizerReport> rows;
};

inline Report build_report(const std::vector<TaskResult>& results,
                           double threshold = kDefaultThreshold) {
  const ResultTable table(results);
  Report rep;
  rep.threshold = threshold;
  rep.tasks = table.tasks().size();
  rep.assignments = assign_categories(table);
  for (const auto& a : rep.assignments) ++rep.category_totals[adam_index(a.best_adam_id)];
  for (const auto& opt : table.optimizers())
    rep.rows.push_back({opt, reliability(table, rep.assignments, opt, threshold),
                        solution_quality(table, rep.assignments, opt)});
  return rep;
}

inline nlohmann::ordered_json to_json(const Report& rep) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["threshold"] = rep.threshold;
  j["tasks"] = rep.tasks;
  ordered_json totals = ordered_json::object();
  for (std::size_t i = 0; i < 4; ++i) totals[std::string(kAdamIds[i])] = rep.category_totals[i];
  j["category_totals"] = totals;
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows) {
    ordered_json rel = ordered_json::object(), qual = ordered_json::object();
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string cat(kAdamIds[i]);
      if (const auto& c = r.reliability.per_category[i])
        rel[cat] = {{"hits", c->hits}, {"total", c->total}, {"ratio", c->ratio()}};
      if (const auto& q = r.quality.per_category[i]) qual[cat] = *q;
    }
    rows.push_back({{"optimizer_id", r.optimizer_id},
                    {"reliability",
                     {{"per_category", rel},
                      {"average", r.reliability.average},
                      {"reported", r.reliability.reported},
                      {"boundary_tasks", r.reliability.boundary_tasks}}},
                    {"solution_quality",
                     {{"per_category", qual},
                      {"average", r.quality.average},
                      {"reported", r.quality.reported}}}});
  }
  j["optimizers"] = rows;
  return j;
}

inline std::string format_table(const Report& rep) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-18s %10s %10s %10s %10s %7s\n", "Reliability", "Adam(1e-2)",
                "Adam(1e-3)", "Adam(1e-4)", "Adam(1e-5)", "Avg.");
  out += buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%-18s", r.optimizer_id.c_str());
    out += buf;
    for (const auto& c : r.reliability.per_category) {
      const std::string cell =
          c ? std::to_string(c->hits) + "/" + std::to_string(c->total) : std::string("-");
      std::snprintf(buf, sizeof buf, " %10s", cell.c_str());
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " %7.2f\n", r.reliability.reported);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\n%-18s %10s %10s %10s %10s %7s\n", "Solution quality",
                "Adam(1e-2)", "Adam(1e-3)", "Adam(1e-4)", "Adam(1e-5)", "Avg.");
  out += buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%-18s", r.optimizer_id.c_str());
    out += buf;
    for (const auto& q : r.quality.per_category) {
      if (q) std::snprintf(buf, sizeof buf, " %10.1f", round_half_up(*q, 1));
      else std::snprintf(buf, sizeof buf, " %10s", "-");
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " %7.1f\n", r.quality.reported);
    out += buf;
  }
  return out;
}

}  // namespace pfopt::eval
