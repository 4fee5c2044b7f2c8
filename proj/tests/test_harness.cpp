#include "doctest.h"

#include <random>

#include "fin/harness.hpp"
#include "fin/report_io.hpp"
#include "support/desk.hpp"

using namespace fin;

namespace {

std::string data_file(const std::string& name) {
  return std::string(FIN_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("a single-value sweep yields one row per algorithm") {
  Scenario s = load_scenario(data_file("b_alexnet_cifar10.json"));
  SolverParams params;
  auto rows = sweep(s, "alexnet_cifar10", {Algorithm::kFinExact},
                    SweepAxis::kDelta, {5e-3}, params);
  CHECK(rows.size() == 1);
  CHECK(rows[0].axis == "delta");
  CHECK(rows[0].value == 5e-3);
  CHECK(rows[0].feasible);
}

TEST_CASE("the four-latency three-algorithm sweep yields twelve ordered rows") {
  Scenario s = load_scenario(data_file("b_alexnet_cifar10.json"));
  Scenario strict = with_requirements(s, "alexnet_cifar10", 0.80, -1.0);
  SolverParams params;
  auto rows = sweep(strict, "alexnet_cifar10",
                    {Algorithm::kFinExact, Algorithm::kMcp, Algorithm::kOpt},
                    SweepAxis::kDelta, {2e-3, 5e-3, 6e-3, 12e-3}, params);
  CHECK(rows.size() == 12);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::tie(rows[i - 1].algorithm, rows[i - 1].value) <=
          std::tie(rows[i].algorithm, rows[i].value));
  }
}

TEST_CASE("widening the latency budget never increases the exact energy") {
  std::mt19937_64 rng(777001);
  for (int trial = 0; trial < 8; ++trial) {
    Scenario s = fin::testing::make_desk_instance(rng);
    const double base = s.applications[0].target_latency;
    SolverParams params;
    params.gamma = 10;
    auto rows = sweep(s, "desk", {Algorithm::kFinExact}, SweepAxis::kDelta,
                      {base * 0.5, base, base * 2.0, base * 4.0}, params);
    REQUIRE(rows.size() == 4);
    double prev = std::numeric_limits<double>::infinity();
    for (const ResultRow& row : rows) {
      if (!row.feasible) continue;  // tighter budgets may be unsolvable
      CHECK(row.report.total_energy_j <= prev + 1e-15);
      prev = row.report.total_energy_j;
    }
  }
}

TEST_CASE("raising the accuracy target walks the chosen exit upward") {
  Scenario s = load_scenario(data_file("b_alexnet_cifar10.json"));
  SolverParams params;
  auto rows = sweep(s, "alexnet_cifar10", {Algorithm::kFinExact},
                    SweepAxis::kAlpha, {0.50, 0.60, 0.80}, params);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].report.exit_index == 1);
  CHECK(rows[1].report.exit_index == 2);
  CHECK(rows[2].report.exit_index == 3);
}

TEST_CASE("csv rows round-trip through the fixed header contract") {
  Scenario s = load_scenario(data_file("b_alexnet_cifar10.json"));
  SolverParams params;
  auto rows = sweep(s, "alexnet_cifar10", {Algorithm::kFinExact, Algorithm::kMcp},
                    SweepAxis::kDelta, {5e-3, 12e-3}, params);
  const std::string csv = rows_to_csv(rows);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == kCsvHeader);
  std::string line;
  size_t parsed = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ResultRow row = result_row_from_csv(line);
    CHECK(row.gamma == rows[parsed].gamma);
    CHECK(row.feasible == rows[parsed].feasible);
    CHECK(row.report.exit_index == rows[parsed].report.exit_index);
    CHECK(row.report.latency_s ==
          doctest::Approx(rows[parsed].report.latency_s).epsilon(1e-12));
    CHECK(row.report.total_energy_j ==
          doctest::Approx(rows[parsed].report.total_energy_j).epsilon(1e-12));
    ++parsed;
  }
  CHECK(parsed == rows.size());
}

TEST_CASE("one user with loose requirements never fails") {
  Scenario s = load_scenario(data_file("b_lenet_emnist.json"));
  MultiAppOptions options;
  options.users = 1;
  MultiAppResult result = run_multi_app(s, options);
  CHECK(result.rows.size() == 2);  // one app, two algorithms
  for (const ResultRow& row : result.rows) CHECK(row.feasible);
  CHECK(result.aggregate.failure_probability.at("fin-exact") == 0.0);
  CHECK(result.aggregate.failure_probability.at("mcp") == 0.0);
}

TEST_CASE("multi-app row counts scale with users, apps, and algorithms") {
  Scenario s = load_scenario(data_file("multiapp_six.json"));
  MultiAppOptions options;
  options.users = 3;
  MultiAppResult result = run_multi_app(s, options);
  CHECK(result.rows.size() == 3 * 6 * 2);

  // Each user's chain starts on that user's own mobile node.
  for (const ResultRow& row : result.rows) {
    if (!row.configuration) continue;
    const std::string expected_prefix =
        "u" + std::string(row.value < 10 ? "00" : "0") +
        std::to_string(static_cast<int>(row.value));
    CHECK(row.configuration->placements.front().second.rfind(expected_prefix, 0) ==
          0);
  }
}

TEST_CASE("multi-app aggregates form probability distributions") {
  Scenario s = load_scenario(data_file("multiapp_six.json"));
  MultiAppOptions options;
  options.users = 6;
  MultiAppResult result = run_multi_app(s, options);

  for (const auto& [algo, p] : result.aggregate.failure_probability) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  std::map<std::string, double> tier_sum;
  for (const auto& [key, share] : result.aggregate.deployment_share) {
    tier_sum[key.first] += share;
  }
  for (const auto& [algo, sum] : tier_sum) {
    CHECK(sum == doctest::Approx(1.0));
  }
  std::map<std::string, double> exit_sum;
  for (const auto& [key, share] : result.aggregate.exit_share) {
    exit_sum[key.first] += share;
  }
  for (const auto& [algo, sum] : exit_sum) {
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("multi-app runs are reproducible") {
  Scenario s = load_scenario(data_file("multiapp_six.json"));
  MultiAppOptions options;
  options.users = 2;
  MultiAppResult a = run_multi_app(s, options);
  MultiAppResult b = run_multi_app(s, options);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].algorithm == b.rows[i].algorithm);
    CHECK(a.rows[i].application == b.rows[i].application);
    CHECK(a.rows[i].feasible == b.rows[i].feasible);
    CHECK(a.rows[i].report.total_energy_j == b.rows[i].report.total_energy_j);
    if (a.rows[i].configuration) {
      CHECK(a.rows[i].configuration->placements ==
            b.rows[i].configuration->placements);
    }
  }
}
