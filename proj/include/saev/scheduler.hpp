// scheduler.hpp - minimum drift-plus-penalty dispatch decisions
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "saev/matching.hpp"
#include "saev/network.hpp"
#include "saev/time.hpp"

namespace saev {

struct SchedulerConfig {
  double V = 0.1;                    // penalty constant on dispatch cost
  bool strict_viability = true;      // exclude H == V*C ties
  std::optional<SimDuration> tick;   // fixed-tick batch mode; event-driven when unset
};

struct AssignmentDecision {
  std::vector<std::pair<VehicleId, NodeId>> pairs;
  SimTime decided_at;
};

struct PassageEvent {
  SimTime time;
  enum class Kind { FirstPassage, VehicleTriggered } kind = Kind::FirstPassage;
  NodeId node = -1;        // set for FirstPassage
  VehicleId vehicle = -1;  // set for VehicleTriggered
};

/// Snapshot of one candidate vehicle: id plus its quoted cost per node
/// (nullopt = infeasible pair).
struct VehicleCosts {
  VehicleId id = 0;
  std::vector<std::optional<SimDuration>> cost_per_node;
};

namespace detail {
inline double coefficient(SimDuration hol_wait, double V, SimDuration cost) {
  return hol_wait.minutes() - V * cost.minutes();
}
}  // namespace detail

/// Pairs with H_c strictly above V*C_vc. H entries are per customer node;
/// nullopt marks an empty node.
inline std::vector<std::pair<VehicleId, NodeId>> viable_pairs(
    const std::vector<std::optional<SimDuration>>& hol_waits,
    const std::vector<VehicleCosts>& vehicles, double V) {
  std::vector<std::pair<VehicleId, NodeId>> out;
  for (const VehicleCosts& vc : vehicles)
    for (std::size_t c = 0; c < hol_waits.size(); ++c) {
      if (!hol_waits[c] || !vc.cost_per_node[c]) continue;
      SimDuration threshold = scale(V, *vc.cost_per_node[c]);
      if (*hol_waits[c] > threshold) out.emplace_back(vc.id, static_cast<NodeId>(c));
    }
  return out;
}

/// Batch assignment: maximizes sum of (H_c - V*C_vc) over one-to-one
/// assignments restricted to strictly positive coefficients. Exact via
/// maximum-weight bipartite matching (the constraint matrix is totally
/// unimodular, so matching solves the integer program).
inline AssignmentDecision solve_batch(const std::vector<std::optional<SimDuration>>& hol_waits,
                                      const std::vector<VehicleCosts>& vehicles, double V,
                                      SimTime now = SimTime::zero()) {
  // rows = nodes, cols = vehicles; both in ascending id order for
  // deterministic tie-breaking
  std::vector<std::vector<double>> w(hol_waits.size(),
                                     std::vector<double>(vehicles.size(), -1.0));
  for (std::size_t c = 0; c < hol_waits.size(); ++c) {
    if (!hol_waits[c]) continue;
    for (std::size_t vi = 0; vi < vehicles.size(); ++vi) {
      const auto& cost = vehicles[vi].cost_per_node[c];
      if (!cost) continue;
      if (*hol_waits[c] > scale(V, *cost))
        w[c][vi] = detail::coefficient(*hol_waits[c], V, *cost);
    }
  }
  std::vector<int> match = max_weight_matching(w);
  AssignmentDecision d;
  d.decided_at = now;
  for (std::size_t c = 0; c < match.size(); ++c)
    if (match[c] >= 0)
      d.pairs.emplace_back(vehicles[static_cast<std::size_t>(match[c])].id,
                           static_cast<NodeId>(c));
  std::sort(d.pairs.begin(), d.pairs.end());
  return d;
}

/// Objective value of a decision under the maximization form.
inline double decision_objective(const AssignmentDecision& d,
                                 const std::vector<std::optional<SimDuration>>& hol_waits,
                                 const std::vector<VehicleCosts>& vehicles, double V) {
  double total = 0.0;
  for (auto [veh, node] : d.pairs) {
    auto it = std::find_if(vehicles.begin(), vehicles.end(),
                           [veh](const VehicleCosts& v) { return v.id == veh; });
    total += detail::coefficient(*hol_waits[static_cast<std::size_t>(node)], V,
                                 *it->cost_per_node[static_cast<std::size_t>(node)]);
  }
  return total;
}

/// Earliest threshold crossing over occupied nodes: for node c the crossing is
/// hol_arrival + V * min_v C_vc. May lie in the past after a cost refresh; the
/// caller then fires it immediately.
inline std::optional<PassageEvent> next_passage_time(
    const std::vector<std::optional<SimTime>>& hol_arrivals,
    const std::vector<VehicleCosts>& vehicles, double V) {
  std::optional<PassageEvent> best;
  for (std::size_t c = 0; c < hol_arrivals.size(); ++c) {
    if (!hol_arrivals[c]) continue;
    std::optional<SimDuration> min_cost;
    for (const VehicleCosts& vc : vehicles) {
      const auto& cost = vc.cost_per_node[c];
      if (cost && (!min_cost || *cost < *min_cost)) min_cost = *cost;
    }
    if (!min_cost) continue;
    SimTime crossing = *hol_arrivals[c] + scale(V, *min_cost);
    if (!best || crossing < best->time) {
      best = PassageEvent{crossing, PassageEvent::Kind::FirstPassage,
                          static_cast<NodeId>(c), -1};
    }
  }
  return best;
}

/// Waiting-time passage at node c*: the cheapest feasible vehicle wins,
/// ties to the lowest vehicle id.
inline VehicleId assign_first_passage(NodeId node, const std::vector<VehicleCosts>& vehicles) {
  std::optional<SimDuration> best_cost;
  VehicleId best = -1;
  for (const VehicleCosts& vc : vehicles) {
    const auto& cost = vc.cost_per_node[static_cast<std::size_t>(node)];
    if (!cost) continue;
    if (!best_cost || *cost < *best_cost || (*cost == *best_cost && vc.id < best)) {
      best_cost = *cost;
      best = vc.id;
    }
  }
  if (best < 0) throw std::logic_error("passage event fired with no feasible vehicle");
  return best;
}

/// Newly available vehicle v*: serve the node maximizing H_c - V*C_v*c among
/// nodes whose waiting time strictly exceeds the threshold; ties to the lowest
/// node id. nullopt when nothing qualifies.
inline std::optional<NodeId> assign_vehicle_triggered(
    const VehicleCosts& vehicle, const std::vector<std::optional<SimDuration>>& hol_waits,
    double V) {
  std::optional<NodeId> best;
  double best_coeff = 0.0;
  for (std::size_t c = 0; c < hol_waits.size(); ++c) {
    if (!hol_waits[c] || !vehicle.cost_per_node[c]) continue;
    if (!(*hol_waits[c] > scale(V, *vehicle.cost_per_node[c]))) continue;
    double coeff = detail::coefficient(*hol_waits[c], V, *vehicle.cost_per_node[c]);
    if (!best || coeff > best_coeff) {
      best = static_cast<NodeId>(c);
      best_coeff = coeff;
    }
  }
  return best;
}

}  // namespace saev
