#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "saev/golden.hpp"
#include "saev/sim.hpp"
#include "synthetic.hpp"

using namespace saev;
using namespace saev::testing;

TEST_CASE("built-in example timelines reproduce for both V settings") {
  auto low = validate_golden(0.1);
  INFO(low.detail);
  REQUIRE(low.pass);
  auto high = validate_golden(1.0);
  INFO(high.detail);
  REQUIRE(high.pass);
}

TEST_CASE("zero demand leaves the fleet idle at zero cost") {
  NetworkModel net = make_ring_network();
  auto fleet = make_ring_fleet(5);
  RunResult res = run_simulation(net, fleet, {}, make_ring_options(PolicyKind::Mdpp, 0.1, 500.0));
  REQUIRE(res.arrivals == 0);
  REQUIRE(res.served == 0);
  REQUIRE(res.total_dispatch_km == 0.0);
  for (const VehicleAudit& a : res.vehicle_audits) {
    REQUIRE(a.driven_km == 0.0);
    REQUIRE(a.idle_fraction == Catch::Approx(1.0));
  }
}

TEST_CASE("an idle vehicle at a station charges toward full") {
  // 7 kW for 60 minutes adds 7 kWh: 10 -> 17 of 40
  RoadGraph g;
  g.add_vertex(1);
  std::vector<Zone> zones{{1, 1, {}}};
  std::vector<Station> stations{{1, 1, {{7.0, 1}}}};
  NetworkModel net(std::move(g), std::move(zones), std::move(stations), BatteryModel{7.0, 5});
  VehicleInit vi;
  vi.id = 1;
  vi.vertex = 1;
  vi.soc_kwh = 10.0;
  vi.capacity_kwh = 40.0;
  EngineOptions opt;
  opt.policy = {PolicyKind::Mdpp, 0.1};
  opt.horizon = SimTime::from_minutes(60.0);
  RunResult res = run_simulation(net, {vi}, {}, opt);
  REQUIRE(res.vehicle_audits[0].final_soc_kwh == Catch::Approx(17.0));
  REQUIRE(res.vehicle_audits[0].charged_kwh == Catch::Approx(7.0));
}

TEST_CASE("charger allocation gives the fastest free plug to the lowest SOC") {
  std::vector<ChargerSpec> classes{{50.0, 1}, {7.0, 1}};  // sorted by power
  SECTION("two contenders split across classes") {
    auto order = plug_order(classes, {{30.0, 0}, {12.0, 1}}, {1, 1});
    REQUIRE(order.size() == 2);
    REQUIRE(order[0] == std::pair<std::size_t, std::size_t>{1, 0});  // low SOC, 50 kW
    REQUIRE(order[1] == std::pair<std::size_t, std::size_t>{0, 1});
  }
  SECTION("single contender plugs immediately") {
    auto order = plug_order(classes, {{30.0, 0}}, {1, 1});
    REQUIRE(order == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
  }
  SECTION("no free slots leaves contenders waiting") {
    REQUIRE(plug_order(classes, {{30.0, 0}}, {0, 0}).empty());
  }
}

TEST_CASE("audits hold on a loaded ring for every policy") {
  NetworkModel net = make_ring_network();
  for (PolicyKind kind : {PolicyKind::Mdpp, PolicyKind::NearestFcfs, PolicyKind::ChargerChasing,
                          PolicyKind::NonEvNoReb}) {
    auto fleet = make_ring_fleet();
    auto trips = make_ring_trips(net, 1.5, 2000.0, 11);
    PolicyConfig pc{kind, 0.1};
    EngineOptions opt = make_ring_options(kind, 0.1, 2000.0);
    RunResult res = run_simulation(net, fleet, trips, opt);
    AuditReport audit = audit_run(res, fleet, net.battery(), pc);
    INFO(policy_name(kind));
    for (const auto& v : audit.violations) INFO(v);
    REQUIRE(audit.clean());
    REQUIRE(res.served > 0);
  }
}

TEST_CASE("abandonment drops long waits and keeps conservation") {
  NetworkModel net = make_ring_network();
  auto fleet = make_ring_fleet(2);  // starved fleet forces queues
  auto trips = make_ring_trips(net, 1.0, 500.0, 3);
  EngineOptions opt = make_ring_options(PolicyKind::Mdpp, 0.1, 500.0);
  opt.max_wait = SimDuration::from_minutes(15.0);
  RunResult res = run_simulation(net, fleet, trips, opt);
  REQUIRE(res.lost > 0);
  REQUIRE(res.arrivals == res.served + res.lost + res.waiting_at_end);
  // mean wait to assignment cannot exceed the abandonment limit
  REQUIRE(res.mean_wait_to_assignment_min <= 15.0 + 1e-9);
}

TEST_CASE("every logged assignment strictly clears the viability threshold") {
  NetworkModel net = make_ring_network();
  auto fleet = make_ring_fleet();
  auto trips = make_ring_trips(net, 2.0, 1000.0, 5);
  for (double V : {0.01, 0.1, 1.0}) {
    RunResult res =
        run_simulation(net, fleet, trips, make_ring_options(PolicyKind::Mdpp, V, 1000.0));
    REQUIRE(!res.assignments.empty());
    for (const AssignmentRecord& a : res.assignments)
      REQUIRE(a.hol_wait > scale(V, a.cost));
  }
}

TEST_CASE("identical inputs give identical runs") {
  NetworkModel net = make_ring_network();
  auto make = [&] {
    auto fleet = make_ring_fleet();
    auto trips = make_ring_trips(net, 1.5, 1500.0, 77);
    return run_simulation(net, fleet, trips,
                          make_ring_options(PolicyKind::Mdpp, 0.1, 1500.0, true));
  };
  RunResult a = make();
  RunResult b = make();
  REQUIRE(a.event_log == b.event_log);
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (std::size_t i = 0; i < a.assignments.size(); ++i) {
    REQUIRE(a.assignments[i].time == b.assignments[i].time);
    REQUIRE(a.assignments[i].vehicle == b.assignments[i].vehicle);
    REQUIRE(a.assignments[i].customer == b.assignments[i].customer);
  }
  REQUIRE(a.total_dispatch_km == b.total_dispatch_km);
}

TEST_CASE("unlimited-range policy never touches the battery") {
  NetworkModel net = make_ring_network();
  auto fleet = make_ring_fleet(10, 20.0, 0.3);  // would need charging as an EV
  auto trips = make_ring_trips(net, 1.0, 1000.0, 9);
  RunResult res =
      run_simulation(net, fleet, trips, make_ring_options(PolicyKind::NonEvNoReb, 0.1, 1000.0));
  REQUIRE(res.served > 0);
  for (const VehicleAudit& a : res.vehicle_audits) {
    REQUIRE(a.final_soc_kwh == Catch::Approx(a.initial_soc_kwh));
    REQUIRE(a.charged_kwh == 0.0);
  }
}

TEST_CASE("larger V delays assignments on a fixed instance") {
  NetworkModel net = make_ring_network();
  auto fleet = make_ring_fleet();
  auto trips = make_ring_trips(net, 1.0, 2000.0, 21);
  double wait_small = run_simulation(net, fleet, trips,
                                     make_ring_options(PolicyKind::Mdpp, 0.001, 2000.0))
                          .mean_wait_to_assignment_min;
  double wait_large =
      run_simulation(net, fleet, trips, make_ring_options(PolicyKind::Mdpp, 1.0, 2000.0))
          .mean_wait_to_assignment_min;
  REQUIRE(wait_large > wait_small);
}
