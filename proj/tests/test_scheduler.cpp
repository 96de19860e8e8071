#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <optional>
#include <vector>

#include "saev/rng.hpp"
#include "saev/scheduler.hpp"

using namespace saev;

namespace {

using Hols = std::vector<std::optional<SimDuration>>;

Hols hols_min(std::vector<double> mins) {
  Hols out;
  for (double m : mins) {
    if (m < 0.0)
      out.push_back(std::nullopt);
    else
      out.push_back(SimDuration::from_minutes(m));
  }
  return out;
}

VehicleCosts costs_min(VehicleId id, std::vector<double> mins) {
  VehicleCosts vc{id, {}};
  for (double m : mins) {
    if (m < 0.0)
      vc.cost_per_node.push_back(std::nullopt);
    else
      vc.cost_per_node.push_back(SimDuration::from_minutes(m));
  }
  return vc;
}

// Exhaustive oracle over all one-to-one pairings with positive coefficients.
double brute_force_objective(const Hols& hols, const std::vector<VehicleCosts>& vehicles,
                             double V) {
  double best = 0.0;
  std::vector<bool> used(vehicles.size(), false);
  std::function<void(std::size_t, double)> rec = [&](std::size_t c, double acc) {
    if (c == hols.size()) {
      best = std::max(best, acc);
      return;
    }
    rec(c + 1, acc);
    if (!hols[c]) return;
    for (std::size_t vi = 0; vi < vehicles.size(); ++vi) {
      if (used[vi] || !vehicles[vi].cost_per_node[c]) continue;
      const SimDuration cost = *vehicles[vi].cost_per_node[c];
      if (!(*hols[c] > scale(V, cost))) continue;
      used[vi] = true;
      rec(c + 1, acc + hols[c]->minutes() - V * cost.minutes());
      used[vi] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

}  // namespace

TEST_CASE("viability excludes the exact threshold") {
  Hols hols = hols_min({2.0});
  std::vector<VehicleCosts> vehicles{costs_min(1, {20.0}),   // V*C = 2.0, tie
                                     costs_min(2, {19.99}),  // strictly below
                                     costs_min(3, {-1.0})};  // infeasible
  auto pairs = viable_pairs(hols, vehicles, 0.1);
  REQUIRE(pairs.size() == 1);
  REQUIRE(pairs[0].first == 2);
  REQUIRE(pairs[0].second == 0);
}

TEST_CASE("empty nodes produce no pairs") {
  Hols hols = hols_min({-1.0, -1.0});
  std::vector<VehicleCosts> vehicles{costs_min(1, {1.0, 1.0})};
  REQUIRE(viable_pairs(hols, vehicles, 0.1).empty());
  REQUIRE(solve_batch(hols, vehicles, 0.1).pairs.empty());
}

TEST_CASE("V = 0 assigns every occupied node with any feasible vehicle") {
  Hols hols = hols_min({0.5, 3.0});
  std::vector<VehicleCosts> vehicles{costs_min(1, {40.0, 45.0}), costs_min(2, {50.0, 41.0})};
  auto d = solve_batch(hols, vehicles, 0.0);
  REQUIRE(d.pairs.size() == 2);
  REQUIRE(decision_objective(d, hols, vehicles, 0.0) == Catch::Approx(3.5));
}

TEST_CASE("batch objective equals the exhaustive oracle on random instances") {
  Rng rng(99);
  for (double V : {0.0, 0.1, 1.0}) {
    for (int trial = 0; trial < 400; ++trial) {
      std::size_t n_nodes = 1 + rng.uniform_index(4);
      std::size_t n_veh = 1 + rng.uniform_index(4);
      Hols hols;
      for (std::size_t c = 0; c < n_nodes; ++c)
        hols.push_back(rng.bernoulli(0.2)
                           ? std::optional<SimDuration>{}
                           : std::optional<SimDuration>{
                                 SimDuration::from_minutes(rng.uniform(0.0, 100.0))});
      std::vector<VehicleCosts> vehicles;
      for (std::size_t v = 0; v < n_veh; ++v) {
        VehicleCosts vc{static_cast<VehicleId>(v + 1), {}};
        for (std::size_t c = 0; c < n_nodes; ++c)
          vc.cost_per_node.push_back(rng.bernoulli(0.2)
                                         ? std::optional<SimDuration>{}
                                         : std::optional<SimDuration>{
                                               SimDuration::from_minutes(rng.uniform(1.0, 50.0))});
        vehicles.push_back(vc);
      }
      auto d = solve_batch(hols, vehicles, V);
      double got = decision_objective(d, hols, vehicles, V);
      double want = brute_force_objective(hols, vehicles, V);
      REQUIRE(got == Catch::Approx(want).margin(1e-9));
    }
  }
}

TEST_CASE("first passage is driven by the cheapest feasible vehicle") {
  std::vector<std::optional<SimTime>> arrivals{SimTime::from_minutes(10.0), std::nullopt,
                                               SimTime::from_minutes(4.0)};
  std::vector<VehicleCosts> vehicles{costs_min(1, {30.0, 5.0, 90.0}),
                                     costs_min(2, {25.0, 5.0, -1.0})};
  auto ev = next_passage_time(arrivals, vehicles, 0.1);
  REQUIRE(ev);
  REQUIRE(ev->kind == PassageEvent::Kind::FirstPassage);
  // node 0 crosses at 10 + 2.5 = 12.5, node 2 at 4 + 9 = 13
  REQUIRE(ev->node == 0);
  REQUIRE(ev->time == SimTime::from_minutes(12.5));
  REQUIRE(assign_first_passage(0, vehicles) == 2);
}

TEST_CASE("first passage ties break to the lowest vehicle id") {
  std::vector<VehicleCosts> vehicles{costs_min(4, {7.0}), costs_min(2, {7.0}),
                                     costs_min(9, {8.0})};
  REQUIRE(assign_first_passage(0, vehicles) == 2);
  std::vector<VehicleCosts> none{costs_min(1, {-1.0})};
  REQUIRE_THROWS_AS(assign_first_passage(0, none), std::logic_error);
}

TEST_CASE("a returning vehicle serves the largest strict coefficient") {
  VehicleCosts v = costs_min(7, {10.0, 4.0, 2.0});
  Hols hols = hols_min({1.2, 0.6, 0.2});
  // V=0.1 thresholds: 1.0, 0.4, 0.2; coefficients: 0.2, 0.2, excluded (tie)
  auto target = assign_vehicle_triggered(v, hols, 0.1);
  REQUIRE(target);
  REQUIRE(*target == 0);  // equal coefficients, lowest node id wins
  Hols below = hols_min({0.9, 0.35, 0.2});
  REQUIRE_FALSE(assign_vehicle_triggered(v, below, 0.1));
}

TEST_CASE("no passage without occupied nodes or feasible vehicles") {
  std::vector<std::optional<SimTime>> arrivals{std::nullopt, std::nullopt};
  std::vector<VehicleCosts> vehicles{costs_min(1, {1.0, 1.0})};
  REQUIRE_FALSE(next_passage_time(arrivals, vehicles, 0.1));
  std::vector<std::optional<SimTime>> occupied{SimTime::zero(), std::nullopt};
  std::vector<VehicleCosts> infeasible{costs_min(1, {-1.0, 1.0})};
  REQUIRE_FALSE(next_passage_time(occupied, infeasible, 0.1));
}
