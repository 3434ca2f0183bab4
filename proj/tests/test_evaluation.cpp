#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pfopt/evaluation.hpp"

using namespace pfopt;
using namespace pfopt::eval;

namespace {

// One task with the four Adam metrics plus extra optimizers.
std::vector<TaskResult> task(const std::string& id, std::array<std::optional<double>, 4> adam,
                             std::vector<std::pair<std::string, std::optional<double>>> others = {}) {
  std::vector<TaskResult> out;
  for (std::size_t i = 0; i < 4; ++i) out.push_back({id, std::string(kAdamIds[i]), adam[i], true});
  for (auto& [opt, m] : others) out.push_back({id, opt, m, true});
  return out;
}

std::vector<TaskResult> concat(std::initializer_list<std::vector<TaskResult>> parts) {
  std::vector<TaskResult> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<TaskResult> load_fixture() {
  std::ifstream in(PFOPT_FIXTURE_CSV);
  return read_results_csv(in);
}

}  // namespace

TEST(AssignCategories, PicksBestAdam) {
  const auto a = assign_categories(task("cifar10/densenet/pretrained", {69.4, 88.1, 81.2, 64.3}));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].best_adam_id, "adam_1e-3");
  EXPECT_DOUBLE_EQ(a[0].best_metric, 88.1);
}

TEST(AssignCategories, TieGoesToLargerLearningRate) {
  EXPECT_EQ(assign_categories(task("wnli", {52.1, 52.1, 47.4, 38.0}))[0].best_adam_id, "adam_1e-2");
  EXPECT_EQ(assign_categories(task("flat", {1.0, 1.0, 1.0, 1.0}))[0].best_adam_id, "adam_1e-2");
  EXPECT_EQ(assign_categories(task("late", {1.0, 2.0, 3.0, 3.0}))[0].best_adam_id, "adam_1e-4");
}

TEST(AssignCategories, MissingComparesAsMinusInfinity) {
  const auto a = assign_categories(task("t", {std::nullopt, 10.0, std::nullopt, 11.0}));
  EXPECT_EQ(a[0].best_adam_id, "adam_1e-5");
  EXPECT_THROW(assign_categories(task("t", {std::nullopt, std::nullopt, std::nullopt, std::nullopt})),
               ValidationError);
}

TEST(AssignCategories, LowerIsBetter) {
  auto rs = task("loss", {0.5, 0.2, 0.3, 0.2});
  for (auto& r : rs) r.higher_is_better = false;
  EXPECT_EQ(assign_categories(rs)[0].best_adam_id, "adam_1e-3");
}

TEST(AssignCategories, MissingAdamEntryRejected) {
  auto rs = task("t", {1.0, 2.0, 3.0, 4.0});
  rs.pop_back();
  EXPECT_THROW(assign_categories(rs), ValidationError);
}

TEST(IsClose, Examples) {
  EXPECT_FALSE(is_close(78.4, 88.1));
  EXPECT_TRUE(is_close(56.4, 60.1));
  EXPECT_FALSE(is_close(std::nullopt, 88.5));
  EXPECT_FALSE(is_close(5.0, 10.0));  // gap exactly 5.0 is not close
  EXPECT_TRUE(is_close(5.0001, 10.0));
  EXPECT_TRUE(is_close(95.0, 90.0));  // better than best
}

TEST(Reliability, SingleCategoryAllClose) {
  const auto rs = concat({task("a", {90, 80, 70, 60}, {{"pf", 89}}),
                          task("b", {91, 80, 70, 60}, {{"pf", 91}})});
  const ResultTable t(rs);
  const auto r = reliability(t, assign_categories(t), "pf");
  EXPECT_DOUBLE_EQ(r.average, 1.0);
  EXPECT_FALSE(r.per_category[1].has_value());
  EXPECT_EQ(r.per_category[0]->hits, 2u);
}

TEST(Reliability, EmptyCategoriesExcludedFromMean) {
  const auto rs = concat({task("a", {90, 80, 70, 60}, {{"pf", 70}}),
                          task("b", {60, 80, 70, 60}, {{"pf", 80}})});
  const ResultTable t(rs);
  const auto r = reliability(t, assign_categories(t), "pf");
  EXPECT_DOUBLE_EQ(r.average, 0.5);
}

TEST(Reliability, UnknownOptimizerRejected) {
  const ResultTable t(task("a", {1, 2, 3, 4}));
  EXPECT_THROW(reliability(t, assign_categories(t), "nope"), ValidationError);
  EXPECT_THROW(solution_quality(t, assign_categories(t), "nope"), ValidationError);
}

TEST(Reliability, BoundaryCasesFlagged) {
  const ResultTable t(task("a", {90, 80, 70, 60}, {{"pf", 85.0}}));
  const auto r = reliability(t, assign_categories(t), "pf");
  ASSERT_EQ(r.boundary_tasks.size(), 1u);
  EXPECT_EQ(r.boundary_tasks[0], "a");
  EXPECT_EQ(r.per_category[0]->hits, 0u);
}

TEST(Reliability, InvariantToPerTaskShift) {
  auto rs = concat({task("a", {90, 80, 70, 60}, {{"pf", 86}}),
                    task("b", {60, 80, 70, 60}, {{"pf", 70}}),
                    task("c", {60, 70, 75, 60}, {{"pf", 74}})});
  const ResultTable t0(rs);
  const double before = reliability(t0, assign_categories(t0), "pf").average;
  for (auto& r : rs)
    if (r.task_id == "b" && r.metric) *r.metric += 13.0;
  const ResultTable t1(rs);
  EXPECT_DOUBLE_EQ(reliability(t1, assign_categories(t1), "pf").average, before);
}

TEST(Reliability, RemovingATaskOnlyTouchesItsCategory) {
  const auto full = concat({task("a", {90, 80, 70, 60}, {{"pf", 86}}),
                            task("b", {90, 80, 70, 60}, {{"pf", 20}}),
                            task("c", {60, 80, 70, 60}, {{"pf", 70}})});
  const ResultTable t0(full);
  const auto r0 = reliability(t0, assign_categories(t0), "pf");
  std::vector<TaskResult> less;
  for (const auto& r : full)
    if (r.task_id != "b") less.push_back(r);
  const ResultTable t1(less);
  const auto r1 = reliability(t1, assign_categories(t1), "pf");
  EXPECT_NE(r0.per_category[0]->ratio(), r1.per_category[0]->ratio());
  EXPECT_EQ(r0.per_category[1]->ratio(), r1.per_category[1]->ratio());
}

TEST(ReportedReliability, FloorsPercentThenRoundsTiesDown) {
  EXPECT_DOUBLE_EQ(reported_reliability({{2, 5}, {11, 14}, {15, 15}, {7, 8}}), 0.76);
  EXPECT_DOUBLE_EQ(reported_reliability({{2, 5}, {7, 14}, {7, 15}, {5, 8}}), 0.49);
  EXPECT_DOUBLE_EQ(reported_reliability({{1, 1}}), 1.0);
}

TEST(SolutionQuality, ClampsAndCountsMissingAsZero) {
  const auto rs = concat({task("a", {90, 80, 70, 60}, {{"pf", 95}}),
                          task("b", {90, 80, 70, 60}, {{"pf", 80}}),
                          task("c", {60, 80, 70, 60}, {{"pf", std::nullopt}})});
  const ResultTable t(rs);
  const auto q = solution_quality(t, assign_categories(t), "pf");
  EXPECT_DOUBLE_EQ(*q.per_category[0], 5.0);
  EXPECT_DOUBLE_EQ(*q.per_category[1], 80.0);
  EXPECT_DOUBLE_EQ(q.average, 42.5);
}

TEST(SolutionQuality, ZeroWhenBeatingAdamEverywhere) {
  const auto rs = concat({task("a", {90, 80, 70, 60}, {{"pf", 95}}),
                          task("b", {60, 80, 70, 60}, {{"pf", 80}})});
  const ResultTable t(rs);
  EXPECT_EQ(solution_quality(t, assign_categories(t), "pf").average, 0.0);
}

TEST(SolutionQuality, ReportedRoundingHalfUp) {
  EXPECT_DOUBLE_EQ(round_half_up(2.975, 1), 3.0);
  EXPECT_DOUBLE_EQ(round_half_up(9.925, 1), 9.9);
  EXPECT_DOUBLE_EQ(round_half_up(0.25, 1), 0.3);
}

TEST(ResultsCsv, ParsesMissingAndDirection) {
  std::istringstream in("task_id,optimizer_id,metric,higher_is_better\nt,a,1.5,0\nt,b,,0\nt,c,nan,0\n");
  const auto rs = read_results_csv(in);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[0].metric, 1.5);
  EXPECT_FALSE(rs[1].metric.has_value());
  EXPECT_FALSE(rs[2].metric.has_value());
  EXPECT_FALSE(rs[0].higher_is_better);
}

TEST(ResultsCsv, SchemaViolations) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(read_results_csv(in), ValidationError) << text;
  };
  bad("");
  bad("task_id,optimizer_id,metric\n");
  bad("task_id,optimizer,metric\nt,a,1\n");
  bad("task_id,optimizer_id,metric,extra\nt,a,1,2\n");
  bad("task_id,optimizer_id,metric\nt,a,1,2\n");
  bad("task_id,optimizer_id,metric\nt,a,abc\n");
  bad("task_id,optimizer_id,metric\nt,a,inf\n");
  bad("task_id,optimizer_id,metric\n,a,1\n");
}

TEST(ResultTable, DuplicateEntriesRejected) {
  auto rs = task("t", {1, 2, 3, 4});
  rs.push_back(rs.front());
  EXPECT_THROW(ResultTable{rs}, ValidationError);
}

// --- Fixture ---------------------------------------------------------------

TEST(Fixture, ShapeAndCategoryTotals) {
  const auto rs = load_fixture();
  EXPECT_EQ(rs.size(), 420u);
  const Report rep = build_report(rs);
  EXPECT_EQ(rep.tasks, 42u);
  EXPECT_EQ(rep.category_totals, (std::array<std::size_t, 4>{5, 14, 15, 8}));
}

TEST(Fixture, CategoryExamplesFromTable) {
  const ResultTable t(load_fixture());
  EXPECT_EQ(t.metric("cifar10/densenet/pretrained", "adam_1e-3"), 88.1);
  EXPECT_FALSE(t.metric("bert/stsb", "dadapt_adam").has_value());
  for (const auto& a : assign_categories(t)) {
    if (a.task_id == "cifar10/densenet/pretrained") {
      EXPECT_EQ(a.best_adam_id, "adam_1e-3");
    }
    if (a.task_id == "bert/wnli") {
      EXPECT_EQ(a.best_adam_id, "adam_1e-2");
    }
  }
}

TEST(Fixture, AdamGAndAdamRows) {
  const Report rep = build_report(load_fixture());
  auto row = [&](const std::string& id) -> const OptimizerReport& {
    for (const auto& r : rep.rows)
      if (r.optimizer_id == id) return r;
    throw std::runtime_error("missing row " + id);
  };
  const auto& g = row("adamg");
  const std::array<std::pair<int, int>, 4> adamg{{{2, 5}, {11, 14}, {15, 15}, {7, 8}}};
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(g.reliability.per_category[c]->hits, std::size_t(adamg[c].first));
    EXPECT_EQ(g.reliability.per_category[c]->total, std::size_t(adamg[c].second));
  }
  EXPECT_NEAR(g.reliability.average, 0.7652, 1e-4);
  EXPECT_DOUBLE_EQ(g.reliability.reported, 0.76);
  EXPECT_DOUBLE_EQ(g.quality.reported, 3.0);

  const auto& a = row("adam_1e-3");
  EXPECT_EQ(a.reliability.per_category[0]->hits, 4u);
  EXPECT_EQ(a.reliability.per_category[1]->hits, 14u);
  EXPECT_EQ(a.reliability.per_category[2]->hits, 7u);
  EXPECT_EQ(a.reliability.per_category[3]->hits, 0u);
  EXPECT_DOUBLE_EQ(a.reliability.reported, 0.56);
}

TEST(Report, JsonHasDocumentedFields) {
  const Report rep = build_report(load_fixture());
  const auto j = to_json(rep);
  EXPECT_EQ(j["tasks"], 42);
  EXPECT_EQ(j["category_totals"]["adam_1e-4"], 15);
  const auto& row = j["optimizers"].back();
  EXPECT_EQ(row["optimizer_id"], "adamg");
  EXPECT_EQ(row["reliability"]["per_category"]["adam_1e-3"]["hits"], 11);
  EXPECT_DOUBLE_EQ(row["solution_quality"]["reported"].get<double>(), 3.0);
  EXPECT_NE(format_table(rep).find("11/14"), std::string::npos);
}
