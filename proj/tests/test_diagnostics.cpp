#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "saev/diagnostics.hpp"

using namespace saev;

namespace {

std::vector<SeriesPoint> series_from(const std::vector<double>& sums) {
  std::vector<SeriesPoint> out;
  for (std::size_t i = 0; i < sums.size(); ++i)
    out.push_back({SimTime::from_minutes(static_cast<double>(i)), 0, sums[i]});
  return out;
}

}  // namespace

TEST_CASE("drift bound constant evaluates exactly") {
  REQUIRE(lemma1_K({0.5}) == Catch::Approx(2.875));
  REQUIRE(lemma1_K({0.5, 0.5}) == Catch::Approx(5.75));
  REQUIRE_THROWS_AS(lemma1_K({0.0}), std::domain_error);
  REQUIRE_THROWS_AS(lemma1_K({1.0}), std::domain_error);
  REQUIRE_THROWS_AS(lemma1_K({1e-12}), std::domain_error);
  REQUIRE_THROWS_AS(lemma1_K({0.5, -0.1}), std::domain_error);
}

TEST_CASE("constant trajectories have zero drift") {
  std::vector<LyapunovSnapshot> traj;
  for (int t = 0; t < 5; ++t)
    traj.push_back(lyapunov_snapshot(SimTime::from_minutes(t), {0.5, 0.5}, {3.0, 4.0}));
  DriftSeries d = empirical_drift(traj);
  for (double x : d.deltas) REQUIRE(x == 0.0);
  for (double x : d.running_mean) REQUIRE(x == 0.0);
}

TEST_CASE("linear waiting growth gives linearly growing drift") {
  std::vector<LyapunovSnapshot> traj;
  for (int t = 0; t < 20; ++t)
    traj.push_back(
        lyapunov_snapshot(SimTime::from_minutes(t), {0.5}, {static_cast<double>(t)}));
  DriftSeries d = empirical_drift(traj);
  // L = 0.25 t^2, so delta(t) = 0.25 (2t + 1): linear in t
  for (std::size_t i = 1; i < d.deltas.size(); ++i)
    REQUIRE(d.deltas[i] - d.deltas[i - 1] == Catch::Approx(0.5));
}

TEST_CASE("drift telescopes to the endpoint difference") {
  std::vector<LyapunovSnapshot> traj;
  double h = 1.0;
  for (int t = 0; t < 50; ++t) {
    h = h * 1.1 + (t % 3);
    traj.push_back(lyapunov_snapshot(SimTime::from_minutes(t), {0.3, 0.6}, {h, 2.0 * h}));
  }
  DriftSeries d = empirical_drift(traj);
  double total = 0.0;
  for (double x : d.deltas) total += x;
  REQUIRE(total == Catch::Approx(traj.back().value - traj.front().value));
  REQUIRE_THROWS_AS(empirical_drift({traj[0]}), std::invalid_argument);
}

TEST_CASE("snapshot value is nonnegative and zero only at empty queues") {
  auto zero = lyapunov_snapshot(SimTime::zero(), {0.5, 0.5}, {0.0, 0.0});
  REQUIRE(zero.value == 0.0);
  auto busy = lyapunov_snapshot(SimTime::zero(), {0.5, 0.5}, {1.0, 0.0});
  REQUIRE(busy.value > 0.0);
  REQUIRE_THROWS_AS(lyapunov_snapshot(SimTime::zero(), {0.5}, {1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("flat waiting series is judged stable") {
  std::vector<double> sums(1000, 4.2);
  StabilityReport rep = stability_verdict(series_from(sums));
  REQUIRE(rep.verdict == StabilityVerdict::Stable);
  REQUIRE(rep.window_means.size() == 5);
}

TEST_CASE("all-zero series is stable, not a division artifact") {
  std::vector<double> sums(1000, 0.0);
  REQUIRE(stability_verdict(series_from(sums)).verdict == StabilityVerdict::Stable);
}

TEST_CASE("jitter around an empty queue stays below the noise floor") {
  // window means of 0.02 vs 0.09 violate the 1.2 ratio but describe a queue
  // that is empty nearly all the time
  std::vector<double> sums(1000, 0.0);
  for (int t = 0; t < 1000; t += 37) sums[static_cast<std::size_t>(t)] = (t > 700) ? 3.0 : 0.7;
  StabilityReport rep = stability_verdict(series_from(sums));
  REQUIRE(rep.verdict == StabilityVerdict::Stable);
  REQUIRE(stability_verdict(series_from(sums), 5, 1.2, 0.0).verdict ==
          StabilityVerdict::Growing);
}

TEST_CASE("steady growth is judged growing") {
  std::vector<double> sums;
  for (int t = 0; t < 1000; ++t) sums.push_back(0.5 * t);
  REQUIRE(stability_verdict(series_from(sums)).verdict == StabilityVerdict::Growing);
}

TEST_CASE("short horizons are flagged inconclusive") {
  std::vector<double> sums(6, 1.0);
  StabilityReport rep = stability_verdict(series_from(sums));
  REQUIRE(rep.verdict == StabilityVerdict::Inconclusive);
  REQUIRE_FALSE(rep.note.empty());
  REQUIRE_THROWS_AS(stability_verdict(series_from(sums), 2), std::invalid_argument);
}
