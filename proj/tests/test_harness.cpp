#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "tla/config.hpp"
#include "tla/csv.hpp"
#include "tla/experiment.hpp"
#include "tla/metrics.hpp"
#include "tla/svg.hpp"

using namespace tla;

namespace {

LearningCurve curve_of(std::initializer_list<std::pair<std::uint64_t, double>> pts) {
  LearningCurve c;
  for (auto [s, m] : pts) c.push_back({s, m, 0.0});
  return c;
}

RolloutTrace trace_of(const std::vector<double>& actions, bool open_loop = false) {
  RolloutTrace t;
  t.open_loop = open_loop;
  for (double a : actions) {
    t.states.push_back({0.0});
    t.executed.push_back({a});
    t.rewards.push_back(0.0);
    t.slow_ran.push_back(false);
    t.fast_ran.push_back(true);
  }
  return t;
}

}  // namespace

TEST_CASE("normalized_auc: constant curves hit the bounds") {
  const ReturnBounds b{-1600.0, 0.0};
  CHECK(normalized_auc(curve_of({{0, 0.0}, {1000, 0.0}, {2000, 0.0}}), b) == 1.0);
  CHECK(normalized_auc(curve_of({{0, -1600.0}, {2000, -1600.0}}), b) == 0.0);
}

TEST_CASE("normalized_auc: linear ramp from min to max scores one half") {
  const ReturnBounds b{0.0, 100.0};
  CHECK(normalized_auc(curve_of({{0, 0.0}, {1000, 100.0}}), b) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("normalized_auc: values outside the bounds are clamped into [0,1]") {
  const ReturnBounds b{0.0, 100.0};
  const double auc = normalized_auc(curve_of({{0, -500.0}, {1000, 500.0}}), b);
  CHECK(auc >= 0.0);
  CHECK(auc <= 1.0);
}

TEST_CASE("normalized_auc: invariant under collinear breakpoint refinement") {
  const ReturnBounds b{0.0, 10.0};
  const LearningCurve coarse = curve_of({{0, 2.0}, {400, 6.0}, {800, 4.0}});
  // Insert the midpoints of each straight segment: same function, finer grid.
  const LearningCurve fine =
      curve_of({{0, 2.0}, {200, 4.0}, {400, 6.0}, {600, 5.0}, {800, 4.0}});
  CHECK(normalized_auc(coarse, b) == doctest::Approx(normalized_auc(fine, b)).epsilon(1e-12));
}

TEST_CASE("normalized_auc: empty curve is an error, per-env bounds are wired") {
  CHECK_THROWS_AS(normalized_auc(LearningCurve{}, ReturnBounds{0, 1}), ContractError);
  CHECK(return_bounds("pendulum").min_return == -1600.0);
  CHECK(return_bounds("mountaincar").max_return == 100.0);
  CHECK(return_bounds("cartpole").max_return == 1000.0);
  CHECK_THROWS_AS(return_bounds("nonesuch"), ContractError);
}

TEST_CASE("action_repetition: constant, distinct and mixed traces") {
  CHECK(action_repetition(trace_of({1.0, 1.0, 1.0, 1.0})) == 100.0);
  CHECK(action_repetition(trace_of({1.0, 2.0, 3.0, 4.0})) == 0.0);
  CHECK(action_repetition(trace_of({1.0, 1.0, 2.0})) == doctest::Approx(50.0));
  CHECK_THROWS_AS(action_repetition(trace_of({1.0})), ContractError);
}

TEST_CASE("action_repetition: bit-equality, not tolerance") {
  RolloutTrace t = trace_of({1.0, 1.0});
  t.executed[1][0] = 1.0 + 1e-16;  // rounds to 1.0 in double
  CHECK(action_repetition(t) == 100.0);
  t.executed[1][0] = 1.0 + 1e-15;  // representable, distinct
  CHECK(action_repetition(t) == 0.0);
}

TEST_CASE("count_decisions: flat policies decide every step") {
  RolloutTrace t = trace_of({1.0, 2.0, 3.0});
  CHECK(count_decisions(t) == 3.0);
}

TEST_CASE("csv: deterministic round-trip formatting") {
  CsvWriter w({"a", "b"});
  w.add_row({1.0 / 3.0, -1600.0});
  w.add_row({0.1 + 0.2, 1e-17});
  const std::string s1 = w.str();
  CsvWriter w2({"a", "b"});
  w2.add_row({1.0 / 3.0, -1600.0});
  w2.add_row({0.1 + 0.2, 1e-17});
  CHECK(s1 == w2.str());

  const std::string path = "/tmp/tla_csv_test.csv";
  w.write_file(path);
  CsvTable t = read_csv_file(path);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.number(0, t.column("a")) == 1.0 / 3.0);  // %.17g round-trips doubles
  CHECK(t.number(1, t.column("b")) == 1e-17);
  std::remove(path.c_str());
}

TEST_CASE("config: parse, defaults, overrides and validation") {
  const std::string text =
      "algo = tla_c\n"
      "env = mountaincar\n"
      "seeds = 3, 5, 8\n"
      "total_steps = 12000\n"
      "# comment line\n"
      "n = 4\n"
      "threshold = 0.25\n";
  ExperimentConfig c = parse_config_text(text);
  CHECK(c.algorithm == "tla_c");
  CHECK(c.env_id == "mountaincar");
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 5, 8});
  CHECK(c.total_steps == 12000);
  CHECK(c.threshold == 0.25);
  CHECK(c.effective_lambda() == default_lambda("mountaincar"));

  apply_override(c, "lambda", "0.77");
  CHECK(c.effective_lambda() == 0.77);
  CHECK_THROWS_AS(apply_override(c, "nonesuch", "1"), ContractError);
  CHECK_THROWS_AS(apply_override(c, "total_steps", "abc"), ContractError);

  c.finalize();
  CHECK(c.algorithm == "tla_c");

  ExperimentConfig bad = c;
  bad.algorithm = "dqn";
  CHECK_THROWS_AS(bad.finalize(), ContractError);
  ExperimentConfig bad2 = c;
  bad2.seeds.clear();
  CHECK_THROWS_AS(bad2.finalize(), ContractError);
}

TEST_CASE("config: the realtime flag renames the algorithm") {
  ExperimentConfig c;
  c.algorithm = "td3";
  c.realtime = true;
  c.finalize();
  CHECK(c.algorithm == "td3_delayed");
  ExperimentConfig c2;
  c2.algorithm = "tla_c";
  c2.realtime = true;
  c2.finalize();
  CHECK(c2.algorithm == "tla_realtime");
}

TEST_CASE("config: resolved key=value text reparses to the same config") {
  ExperimentConfig c;
  c.algorithm = "tla_o";
  c.env_id = "pendulum";
  c.seeds = {9, 10};
  c.threshold = 0.4;
  c.finalize();
  ExperimentConfig back = parse_config_text(c.to_key_values());
  back.finalize();
  CHECK(back.algorithm == c.algorithm);
  CHECK(back.seeds == c.seeds);
  CHECK(back.threshold == c.threshold);
  CHECK(back.effective_lambda() == c.effective_lambda());
}

TEST_CASE("parse_threshold_range: inclusive start:step:stop") {
  const std::vector<double> t = parse_threshold_range("0:0.05:1.0");
  REQUIRE(t.size() == 21);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_threshold_range("1:0:2"), ContractError);
  CHECK_THROWS_AS(parse_threshold_range("nonsense"), std::exception);
}

TEST_CASE("svg: chart renders polylines for every series and is deterministic") {
  SvgSeries s;
  s.label = "test";
  s.color = "#1f77b4";
  s.x = {0, 1, 2, 3};
  s.mean = {0.0, 1.0, 0.5, 2.0};
  s.stddev = {0.1, 0.1, 0.2, 0.1};
  const std::string svg = render_line_chart("t", "x", "y", {s});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("polygon") != std::string::npos);  // the std band
  CHECK(svg == render_line_chart("t", "x", "y", {s}));
}
