#include "doctest.h"

#include <cmath>
#include <random>

#include "fin/baselines.hpp"
#include "fin/errors.hpp"
#include "fin/evaluation.hpp"
#include "fin/solver.hpp"
#include "fin/harness.hpp"
#include "support/desk.hpp"
#include "support/paths.hpp"

using namespace fin;

namespace {

std::string data_file(const std::string& name) {
  return std::string(FIN_DATA_DIR) + "/" + name;
}

Scenario single_node_instance() {
  Scenario s = load_scenario(data_file("b_lenet_mnist.json"));
  // Keep only the source and mobile node so one placement chain exists.
  s.links.erase(std::remove_if(s.links.begin(), s.links.end(),
                               [](const Link& l) {
                                 return l.from != "src" || l.to != "mobile";
                               }),
                s.links.end());
  Scenario t;
  t.nodes = {s.nodes[0], s.nodes[1]};
  t.links = s.links;
  t.applications = s.applications;
  t.validate();
  return t;
}

}  // namespace

TEST_CASE("a single-chain graph yields its unique path") {
  Scenario s = single_node_instance();
  const Application& app = s.applications[0];
  ExtendedGraph g = build_extended_graph(s, "lenet_mnist");
  FeasibleGraph fg = build_feasible_graph(g, app, 10);

  SolveResult exact = solve_exact(fg);
  REQUIRE(exact.configuration.has_value());
  CHECK(exact.configuration->placements.size() == 3);
  for (const auto& [block, node] : exact.configuration->placements) {
    CHECK(node == "mobile");
  }
  CHECK(exact.configuration->exit_index == 2);

  SolveResult greedy = solve_greedy(fg, 10);
  REQUIRE(greedy.configuration.has_value());
  CHECK(greedy.configuration->placements == exact.configuration->placements);
  CHECK(greedy.energy == exact.energy);

  // The lone placement chain is also what exhaustive search returns.
  SolveResult opt = solve_opt(s, "lenet_mnist");
  REQUIRE(opt.configuration.has_value());
  CHECK(opt.configuration->placements == exact.configuration->placements);
  CHECK(opt.energy == doctest::Approx(exact.energy));
}

TEST_CASE("lambda outside the window is rejected") {
  Scenario s = single_node_instance();
  ExtendedGraph g = build_extended_graph(s, "lenet_mnist");
  FeasibleGraph fg = build_feasible_graph(g, s.applications[0], 5);
  CHECK_THROWS_AS(solve_greedy(fg, 0), Error);
  CHECK_THROWS_AS(solve_greedy(fg, 6), Error);
  CHECK_NOTHROW(solve_greedy(fg, 5));
  CHECK_NOTHROW(solve_greedy(fg, 1));
}

TEST_CASE("exact solving converges to the exhaustive optimum at high resolution") {
  std::mt19937_64 rng(60601);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Scenario s = fin::testing::make_desk_instance(rng);
    const Application& app = s.applications[0];
    SolveResult opt = solve_opt(s, "desk");
    if (!opt.configuration) continue;

    EvaluationReport report = evaluate(s, "desk", *opt.configuration);
    // With ample latency slack the quantization cannot exclude the optimum.
    if (report.latency_ok.slack < 0.002 * app.target_latency) continue;

    ExtendedGraph g = build_extended_graph(s, "desk");
    FeasibleGraph fg = build_feasible_graph(g, app, 1000);
    SolveResult exact = solve_exact(fg);
    REQUIRE(exact.configuration.has_value());
    CHECK(exact.energy <= opt.energy * (1.0 + 1e-9));
    CHECK(exact.energy >= opt.energy * (1.0 - 1e-9));
    ++compared;
  }
  CHECK(compared >= 20);
}

TEST_CASE("greedy never beats the exact minimum") {
  std::mt19937_64 rng(424243);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Scenario s = fin::testing::make_desk_instance(rng);
    const Application& app = s.applications[0];
    ExtendedGraph g = build_extended_graph(s, "desk");
    for (int gamma : {5, 20}) {
      FeasibleGraph fg = build_feasible_graph(g, app, gamma);
      SolveResult exact = solve_exact(fg);
      if (!exact.configuration) continue;
      for (int lambda : {1, gamma / 2, gamma}) {
        if (lambda < 1) continue;
        SolveResult greedy = solve_greedy(fg, lambda);
        if (!greedy.configuration) continue;
        CHECK(greedy.energy >= exact.energy - 1e-15);
        Configuration cfg = *greedy.configuration;
        EvaluationReport report = evaluate(s, "desk", cfg);
        CHECK(report.latency_ok.ok);
        ++compared;
      }
    }
  }
  CHECK(compared >= 20);
}

TEST_CASE("ties break toward fewer blocks then smaller node ids") {
  // Two identical compute nodes: zero-cost distinctions everywhere, so the
  // tie falls to the lexicographically smaller node id on every block.
  Scenario s;
  NetworkNode src;
  src.id = "s0";
  src.tier = Tier::kSource;
  src.uplink_capacity = std::numeric_limits<double>::infinity();
  src.downlink_capacity = std::numeric_limits<double>::infinity();
  s.nodes.push_back(src);
  for (const char* id : {"b", "a"}) {
    NetworkNode n;
    n.id = id;
    n.tier = Tier::kMobile;
    n.compute_capacity = 1e12;
    n.compute_power = 10.0;
    n.idle_power = 1.0;
    n.max_power = 20.0;
    n.uplink_capacity = 1e12;
    n.downlink_capacity = 1e12;
    n.tx_energy_per_bit = 0.0;
    n.rx_energy_per_bit = 0.0;
    s.nodes.push_back(n);
  }
  s.links.push_back({"s0", "b", std::numeric_limits<double>::infinity()});
  s.links.push_back({"s0", "a", std::numeric_limits<double>::infinity()});
  s.links.push_back({"a", "b", std::numeric_limits<double>::infinity()});
  s.links.push_back({"b", "a", std::numeric_limits<double>::infinity()});

  Application app;
  app.id = "tie";
  app.source_node = "s0";
  app.target_accuracy = 0.5;
  app.target_latency = 1.0;
  for (int b = 1; b <= 2; ++b) {
    DnnBlock block;
    block.index = b;
    block.output_features = 0.0;  // free transfers keep everything tied
    block.ops = 1e6;
    if (b == 2) block.exit = ExitPoint{1, 0.0, 1.0, 0.9, 1.0};
    app.model.push_back(block);
  }
  s.applications.push_back(app);
  s.validate();

  ExtendedGraph g = build_extended_graph(s, "tie");
  FeasibleGraph fg = build_feasible_graph(g, s.applications[0], 4);
  SolveResult exact = solve_exact(fg);
  REQUIRE(exact.configuration.has_value());
  for (const auto& [block, node] : exact.configuration->placements) {
    CHECK(node == "a");
  }

  SolveResult opt = solve_opt(s, "tie");
  REQUIRE(opt.configuration.has_value());
  CHECK(opt.configuration->placements == exact.configuration->placements);
}

TEST_CASE("exact solving matches a brute-force path scan including ties") {
  // Cross-check the DP against a literal scan over every enumerated path,
  // using the same (energy, blocks, node-id sequence) order.
  std::mt19937_64 rng(16161);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    fin::testing::DeskOptions opt;
    opt.max_nodes = 4;
    opt.max_blocks = 5;
    Scenario s = fin::testing::make_desk_instance(rng, opt);
    const Application& app = s.applications[0];
    ExtendedGraph g = build_extended_graph(s, "desk");
    for (int gamma : {4, 9}) {
      FeasibleGraph fg = build_feasible_graph(g, app, gamma);
      auto paths = fin::testing::enumerate_paths(fg, 20000);
      if (paths.size() >= 20000) continue;

      SolveResult exact = solve_exact(fg);
      if (paths.empty()) {
        CHECK(!exact.configuration.has_value());
        continue;
      }
      REQUIRE(exact.configuration.has_value());

      bool found_best = false;
      double best_energy = 0.0;
      size_t best_blocks = 0;
      std::vector<std::string> best_seq;
      for (const auto& path : paths) {
        double energy = 0.0;
        for (size_t i = 0; i + 1 < path.replicas.size(); ++i) {
          for (int fei : fg.out_edges[static_cast<size_t>(path.replicas[i])]) {
            const FeasibleEdge& fe = fg.edges[static_cast<size_t>(fei)];
            if (fe.to == path.replicas[i + 1] &&
                fe.ext_edge == path.ext_edges[i]) {
              energy += fe.energy;
              break;
            }
          }
        }
        Configuration cfg = fin::testing::path_to_configuration(fg, path);
        std::vector<std::string> seq = cfg.node_sequence();
        const size_t blocks = cfg.placements.size();
        if (!found_best || energy < best_energy ||
            (energy == best_energy &&
             (blocks < best_blocks ||
              (blocks == best_blocks && seq < best_seq)))) {
          found_best = true;
          best_energy = energy;
          best_blocks = blocks;
          best_seq = seq;
        }
      }
      REQUIRE(found_best);
      CHECK(exact.energy == best_energy);
      CHECK(exact.configuration->placements.size() == best_blocks);
      CHECK(exact.configuration->node_sequence() == best_seq);
      ++compared;
    }
  }
  CHECK(compared >= 15);
}

TEST_CASE("exact solving is independent of node declaration order") {
  std::mt19937_64 rng(262626);
  for (int trial = 0; trial < 10; ++trial) {
    Scenario s = fin::testing::make_desk_instance(rng);
    ExtendedGraph g = build_extended_graph(s, "desk");
    FeasibleGraph fg = build_feasible_graph(g, s.applications[0], 8);
    SolveResult a = solve_exact(fg);

    Scenario reversed = s;
    std::reverse(reversed.nodes.begin() + 1, reversed.nodes.end());
    reversed.validate();
    ExtendedGraph rg = build_extended_graph(reversed, "desk");
    FeasibleGraph rfg = build_feasible_graph(rg, reversed.applications[0], 8);
    SolveResult b = solve_exact(rfg);

    REQUIRE(a.configuration.has_value() == b.configuration.has_value());
    if (a.configuration) {
      CHECK(a.configuration->placements == b.configuration->placements);
      CHECK(a.energy == b.energy);
    }
  }
}

TEST_CASE("an early qualifying exit wins when it is cheaper") {
  Scenario s = load_scenario(data_file("b_alexnet_cifar10.json"));
  // At a 55% target the first exit qualifies and costs the least.
  ExtendedGraph g = build_extended_graph(s, "alexnet_cifar10");
  FeasibleGraph fg = build_feasible_graph(g, s.applications[0], 10);
  SolveResult exact = solve_exact(fg);
  REQUIRE(exact.configuration.has_value());
  CHECK(exact.configuration->placements.size() == 1);
  CHECK(exact.configuration->exit_index == 1);
}
