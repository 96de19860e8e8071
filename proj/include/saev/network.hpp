// network.hpp - zones, customer-charge nodes, and charging-aware dispatch costs
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "saev/graph.hpp"
#include "saev/time.hpp"
#include "saev/vehicle.hpp"

namespace saev {

using ZoneId = std::int64_t;
using NodeId = std::int32_t;  // dense index into the customer-node list

struct ChargerSpec {
  double power_kw = 0.0;
  int count = 0;
};

struct Zone {
  ZoneId id = 0;
  VertexId representative_vertex = 0;
  std::vector<ChargerSpec> charger_specs;  // non-empty iff the zone has a station

  [[nodiscard]] bool has_station() const { return !charger_specs.empty(); }
};

/// A (zone, required-charge-level) pair; the unit of queueing.
struct CustomerNode {
  ZoneId zone_id = 0;
  int required_charge_level = 1;  // 1..L, level k means SOC >= k/L of capacity
};

struct BatteryModel {
  double km_per_kwh = 7.0;
  int level_count = 5;

  [[nodiscard]] double energy_kwh(double km) const { return km / km_per_kwh; }
  [[nodiscard]] double level_fraction(int level) const {
    return static_cast<double>(level) / level_count;
  }
};

/// Enumerates (zone, level) pairs, zone-id major, level minor.
inline std::vector<CustomerNode> build_customer_nodes(std::vector<Zone> zones, int levels) {
  if (levels < 1) throw std::invalid_argument("level count must be >= 1");
  std::sort(zones.begin(), zones.end(), [](const Zone& a, const Zone& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < zones.size(); ++i)
    if (zones[i].id == zones[i - 1].id)
      throw std::invalid_argument("duplicate zone id " + std::to_string(zones[i].id));
  std::vector<CustomerNode> nodes;
  nodes.reserve(zones.size() * static_cast<std::size_t>(levels));
  for (const Zone& z : zones)
    for (int l = 1; l <= levels; ++l) nodes.push_back({z.id, l});
  return nodes;
}

struct Station {
  ZoneId zone_id = 0;
  VertexId vertex = 0;
  std::vector<ChargerSpec> chargers;

  [[nodiscard]] double max_power_kw() const {
    double p = 0.0;
    for (const auto& c : chargers) p = std::max(p, c.power_kw);
    return p;
  }
};

/// How a quoted dispatch cost is realized: drive straight, or detour via a
/// station and charge to a target level first. Leg times and distances are
/// kept so execution and energy audits replay the exact quoted plan.
struct ChargePlan {
  std::size_t station_index = 0;
  double target_kwh = 0.0;
  double power_kw = 0.0;
  SimDuration t_to_station;
  double km_to_station = 0.0;
  SimDuration charge_time;
  SimDuration t_station_to_zone;
  double km_station_to_zone = 0.0;
};

struct DispatchPlan {
  SimDuration cost;       // quoted C_vc in minutes
  double pickup_km = 0.0; // km of the direct leg (0 when a detour is planned)
  std::optional<ChargePlan> charge;
};

struct CostMatrix {
  // row per vehicle: per-node plan, nullopt = ABSENT (infeasible)
  std::map<VehicleId, std::vector<std::optional<DispatchPlan>>> rows;
  SimTime computed_at;

  [[nodiscard]] const std::optional<DispatchPlan>* find(VehicleId v, NodeId c) const {
    auto it = rows.find(v);
    if (it == rows.end()) return nullptr;
    return &it->second[static_cast<std::size_t>(c)];
  }
};

/// Static network state: road graph, zones, stations, customer nodes, and the
/// shortest-path trees and energy reserves derived from them. Travel times are
/// constant, so everything here is computed once.
class NetworkModel {
 public:
  NetworkModel(RoadGraph graph, std::vector<Zone> zones, std::vector<Station> stations,
               BatteryModel battery, bool charge_to_full = false)
      : graph_(std::move(graph)),
        zones_(std::move(zones)),
        stations_(std::move(stations)),
        battery_(battery),
        charge_to_full_(charge_to_full) {
    std::sort(zones_.begin(), zones_.end(),
              [](const Zone& a, const Zone& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < zones_.size(); ++i) {
      if (i > 0 && zones_[i].id == zones_[i - 1].id)
        throw std::invalid_argument("duplicate zone id " + std::to_string(zones_[i].id));
      if (!graph_.has_vertex(zones_[i].representative_vertex))
        throw std::invalid_argument("zone " + std::to_string(zones_[i].id) +
                                    " references unknown vertex");
      zone_index_[zones_[i].id] = i;
    }
    for (const Station& s : stations_) {
      if (!zone_index_.count(s.zone_id))
        throw std::invalid_argument("station references unknown zone " +
                                    std::to_string(s.zone_id));
      if (!graph_.has_vertex(s.vertex))
        throw std::invalid_argument("station vertex not in graph");
      graph_.mark_station_vertex(s.vertex);
      auto& specs = zones_[zone_index_.at(s.zone_id)].charger_specs;
      specs.insert(specs.end(), s.chargers.begin(), s.chargers.end());
    }
    nodes_ = build_customer_nodes(zones_, battery_.level_count);
    precompute();
  }

  [[nodiscard]] const RoadGraph& graph() const { return graph_; }
  [[nodiscard]] const std::vector<Zone>& zones() const { return zones_; }
  [[nodiscard]] const std::vector<Station>& stations() const { return stations_; }
  [[nodiscard]] const std::vector<CustomerNode>& customer_nodes() const { return nodes_; }
  [[nodiscard]] const BatteryModel& battery() const { return battery_; }

  [[nodiscard]] const Zone& zone(ZoneId id) const { return zones_[zone_index_.at(id)]; }
  [[nodiscard]] bool has_zone(ZoneId id) const { return zone_index_.count(id) > 0; }
  [[nodiscard]] std::size_t zone_pos(ZoneId id) const { return zone_index_.at(id); }

  [[nodiscard]] NodeId node_id(ZoneId zone, int level) const {
    return static_cast<NodeId>(zone_index_.at(zone) * battery_.level_count + (level - 1));
  }
  [[nodiscard]] const CustomerNode& node(NodeId id) const {
    return nodes_[static_cast<std::size_t>(id)];
  }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }

  /// Travel time between zone representatives along the time-shortest path.
  [[nodiscard]] std::optional<SimDuration> zone_travel_time(ZoneId from, ZoneId to) const {
    const auto& tree = zone_trees_[zone_index_.at(from)];
    std::size_t idx = graph_.index_of(zone(to).representative_vertex);
    if (!tree.reachable(idx)) return std::nullopt;
    return SimDuration::from_ticks(tree.time_ticks[idx]);
  }

  [[nodiscard]] std::optional<double> zone_trip_km(ZoneId from, ZoneId to) const {
    const auto& tree = zone_trees_[zone_index_.at(from)];
    std::size_t idx = graph_.index_of(zone(to).representative_vertex);
    if (!tree.reachable(idx)) return std::nullopt;
    return tree.dist_km[idx];
  }

  [[nodiscard]] const ShortestPathTree& zone_tree(ZoneId id) const {
    return zone_trees_[zone_index_.at(id)];
  }
  [[nodiscard]] const ShortestPathTree& station_tree(std::size_t station_index) const {
    return station_trees_[station_index];
  }

  /// Minimum energy at pickup for a node: the required charge level, or the
  /// worst-case trip from the zone plus the post-drop-off station reach,
  /// whichever is larger.
  [[nodiscard]] double required_pickup_kwh(const CustomerNode& c, double capacity_kwh) const {
    double level_kwh = battery_.level_fraction(c.required_charge_level) * capacity_kwh;
    return std::max(level_kwh, reserve_kwh_[zone_index_.at(c.zone_id)]);
  }

  /// Dispatch cost given a precomputed SSSP tree from the vehicle's location.
  [[nodiscard]] std::optional<DispatchPlan> dispatch_cost_from_tree(
      const ShortestPathTree& from_vehicle, const Vehicle& v, const CustomerNode& c) const {
    const double kpk = battery_.km_per_kwh;
    const std::size_t target = graph_.index_of(zone(c.zone_id).representative_vertex);
    const double required = required_pickup_kwh(c, v.capacity_kwh);

    // direct leg, no charging
    if (from_vehicle.reachable(target)) {
      double soc_at_pickup = v.soc_kwh - from_vehicle.dist_km[target] / kpk;
      if (soc_at_pickup >= required - kEps)
        return DispatchPlan{SimDuration::from_ticks(from_vehicle.time_ticks[target]),
                            from_vehicle.dist_km[target], std::nullopt};
    }

    // charging detour: enumerate stations, keep the cheapest workable one
    std::optional<DispatchPlan> best;
    for (std::size_t si = 0; si < stations_.size(); ++si) {
      const Station& s = stations_[si];
      const std::size_t sv = graph_.index_of(s.vertex);
      if (!from_vehicle.reachable(sv)) continue;
      double soc_at_station = v.soc_kwh - from_vehicle.dist_km[sv] / kpk;
      if (soc_at_station < -kEps) continue;
      const ShortestPathTree& st = station_trees_[si];
      if (!st.reachable(target)) continue;
      double leg_kwh = st.dist_km[target] / kpk;
      double target_kwh = charge_to_full_ ? v.capacity_kwh : required + leg_kwh;
      if (target_kwh > v.capacity_kwh + kEps) continue;
      if (v.capacity_kwh < required + leg_kwh - kEps) continue;  // full charge still short
      double deficit = std::max(0.0, target_kwh - soc_at_station);
      double power = s.max_power_kw();
      if (power <= 0.0) continue;
      SimDuration t_in = SimDuration::from_ticks(from_vehicle.time_ticks[sv]);
      SimDuration t_charge = SimDuration::from_minutes(deficit / power * 60.0);
      SimDuration t_out = SimDuration::from_ticks(st.time_ticks[target]);
      SimDuration total = t_in + t_charge + t_out;
      if (!best || total < best->cost)
        best = DispatchPlan{total, 0.0,
                            ChargePlan{si, target_kwh, power, t_in, from_vehicle.dist_km[sv],
                                       t_charge, t_out, st.dist_km[target]}};
    }
    return best;
  }

  [[nodiscard]] std::optional<DispatchPlan> dispatch_cost(const Vehicle& v,
                                                          const CustomerNode& c) const {
    if (!graph_.has_vertex(v.location)) return std::nullopt;
    return dispatch_cost_from_tree(sssp_tree(graph_, v.location), v, c);
  }

  /// One SSSP per vehicle, then a plan per customer node.
  [[nodiscard]] std::vector<std::optional<DispatchPlan>> cost_row(const Vehicle& v) const {
    std::vector<std::optional<DispatchPlan>> row(nodes_.size());
    if (!graph_.has_vertex(v.location)) return row;
    ShortestPathTree tree = sssp_tree(graph_, v.location);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      row[i] = dispatch_cost_from_tree(tree, v, nodes_[i]);
    return row;
  }

  [[nodiscard]] CostMatrix refresh_cost_matrix(const std::vector<Vehicle>& idle_vehicles,
                                               SimTime now) const {
    CostMatrix m;
    m.computed_at = now;
    for (const Vehicle& v : idle_vehicles) m.rows[v.id] = cost_row(v);
    return m;
  }

 private:
  static constexpr double kEps = 1e-9;

  void precompute() {
    zone_trees_.reserve(zones_.size());
    for (const Zone& z : zones_) zone_trees_.push_back(sssp_tree(graph_, z.representative_vertex));
    station_trees_.reserve(stations_.size());
    for (const Station& s : stations_) station_trees_.push_back(sssp_tree(graph_, s.vertex));

    // Station-reach energy from each zone's representative; 0 when no station
    // is reachable (the reserve then degrades to the trip energy alone).
    std::vector<double> station_reach_kwh(zones_.size(), 0.0);
    for (std::size_t zi = 0; zi < zones_.size(); ++zi) {
      const auto& tree = zone_trees_[zi];
      double best = std::numeric_limits<double>::infinity();
      for (const Station& s : stations_) {
        std::size_t sv = graph_.index_of(s.vertex);
        if (tree.reachable(sv)) best = std::min(best, tree.dist_km[sv] / battery_.km_per_kwh);
      }
      if (std::isfinite(best)) station_reach_kwh[zi] = best;
    }

    // Worst-case destination energy per origin zone: the trip is unknown at
    // assignment time, so reserve for the most expensive reachable zone.
    reserve_kwh_.assign(zones_.size(), 0.0);
    for (std::size_t zi = 0; zi < zones_.size(); ++zi) {
      const auto& tree = zone_trees_[zi];
      double worst = 0.0;
      for (std::size_t zj = 0; zj < zones_.size(); ++zj) {
        std::size_t rep = graph_.index_of(zones_[zj].representative_vertex);
        if (!tree.reachable(rep)) continue;
        worst = std::max(worst, tree.dist_km[rep] / battery_.km_per_kwh + station_reach_kwh[zj]);
      }
      reserve_kwh_[zi] = worst;
    }
  }

  RoadGraph graph_;
  std::vector<Zone> zones_;
  std::vector<Station> stations_;
  BatteryModel battery_;
  bool charge_to_full_ = false;
  std::vector<CustomerNode> nodes_;
  std::unordered_map<ZoneId, std::size_t> zone_index_;
  std::vector<ShortestPathTree> zone_trees_;
  std::vector<ShortestPathTree> station_trees_;
  std::vector<double> reserve_kwh_;
};

/// Loads `zone_id,vertex_id` rows.
inline std::vector<Zone> load_zones_csv(const std::string& path) {
  std::vector<Zone> zones;
  for (const auto& row : csv::read_file(path)) {
    if (row.fields.size() != 2)
      throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                               ": expected zone_id,vertex_id");
    zones.push_back({std::stoll(row.fields[0]), std::stoll(row.fields[1]), {}});
  }
  return zones;
}

/// Loads `zone_id,vertex_id,power_kw,charger_count` rows; multiple rows with
/// the same zone merge into one station with mixed charger classes.
inline std::vector<Station> load_stations_csv(const std::string& path) {
  std::vector<Station> stations;
  std::unordered_map<ZoneId, std::size_t> by_zone;
  for (const auto& row : csv::read_file(path)) {
    if (row.fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                               ": expected zone_id,vertex_id,power_kw,charger_count");
    ZoneId z = std::stoll(row.fields[0]);
    ChargerSpec spec{std::stod(row.fields[2]), std::stoi(row.fields[3])};
    auto it = by_zone.find(z);
    if (it == by_zone.end()) {
      by_zone[z] = stations.size();
      stations.push_back({z, std::stoll(row.fields[1]), {spec}});
    } else {
      stations[it->second].chargers.push_back(spec);
    }
  }
  return stations;
}

}  // namespace saev
