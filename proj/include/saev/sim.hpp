// sim.hpp - deterministic continuous-time discrete-event fleet simulator
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "saev/network.hpp"
#include "saev/queueing.hpp"
#include "saev/scheduler.hpp"
#include "saev/time.hpp"

namespace saev {

enum class PolicyKind { Mdpp, NearestFcfs, ChargerChasing, NonEvNoReb };

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Mdpp: return "mdpp";
    case PolicyKind::NearestFcfs: return "nearest_fcfs";
    case PolicyKind::ChargerChasing: return "charger_chasing";
    case PolicyKind::NonEvNoReb: return "nonev_noreb";
  }
  return "?";
}

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Mdpp;
  double V = 0.1;  // penalty constant, MDPP only
};

struct VehicleInit {
  VehicleId id = 0;
  VertexId vertex = 0;
  double soc_kwh = 0.0;
  double capacity_kwh = 0.0;
  SimTime available_from;  // > 0: the vehicle enters the system later
};

struct EngineOptions {
  PolicyConfig policy;
  SimDuration cost_refresh_period = SimDuration::from_minutes(5.0);
  std::optional<SimDuration> max_wait;
  SimTime horizon = SimTime::from_minutes(60.0);
  SimDuration sample_period = SimDuration::from_minutes(1.0);
  bool log_events = false;
};

struct AssignmentRecord {
  SimTime time;
  VehicleId vehicle = 0;
  CustomerId customer = 0;
  NodeId node = 0;
  SimDuration cost;
  SimDuration hol_wait;
};

struct SeriesPoint {
  SimTime time;
  std::int64_t waiting_count = 0;
  double sum_hol_wait_min = 0.0;  // sum of H_c over occupied nodes, minutes
};

struct VehicleAudit {
  VehicleId id = 0;
  double initial_soc_kwh = 0.0;
  double final_soc_kwh = 0.0;
  double driven_km = 0.0;
  double charged_kwh = 0.0;
  double idle_fraction = 0.0;
};

struct RunResult {
  std::int64_t arrivals = 0;
  std::int64_t served = 0;   // assigned to a vehicle
  std::int64_t picked_up = 0;
  std::int64_t lost = 0;
  std::int64_t waiting_at_end = 0;
  double mean_wait_to_assignment_min = 0.0;
  double mean_wait_to_pickup_min = 0.0;
  double mean_waiting_customers = 0.0;
  double total_dispatch_km = 0.0;  // pickup + charging detour + relocation legs
  std::int64_t quote_discrepancies = 0;  // realized pickup later than quoted
  std::int64_t charger_capacity_violations = 0;
  std::vector<AssignmentRecord> assignments;
  std::vector<SeriesPoint> waiting_series;
  std::vector<VehicleAudit> vehicle_audits;
  std::vector<std::string> event_log;
};

/// Pure charger-allocation rule: higher-power classes fill first, lower SOC
/// plugs first. Returns (contender index, charger class index) pairs in plug
/// order given free slots per class.
inline std::vector<std::pair<std::size_t, std::size_t>> plug_order(
    const std::vector<ChargerSpec>& classes, std::vector<std::pair<double, std::size_t>> contenders,
    std::vector<int> free_slots) {
  // contenders: (soc_kwh, index); classes assumed sorted by power descending
  std::sort(contenders.begin(), contenders.end());
  std::vector<std::pair<std::size_t, std::size_t>> order;
  std::size_t cls = 0;
  for (auto& [soc, idx] : contenders) {
    while (cls < classes.size() && free_slots[cls] == 0) ++cls;
    if (cls >= classes.size()) break;
    --free_slots[cls];
    order.emplace_back(idx, cls);
  }
  return order;
}

class SimulationEngine {
 public:
  SimulationEngine(const NetworkModel& net, std::vector<VehicleInit> fleet,
                   std::vector<CustomerRequest> trips, EngineOptions options)
      : net_(net), options_(std::move(options)), trips_(std::move(trips)) {
    const auto& nodes = net_.customer_nodes();
    nodes_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      nodes_.push_back(NodeRt{NodeQueue{static_cast<NodeId>(i)}, {}, -1, 0});

    for (const Station& s : net_.stations()) {
      StationRt rt;
      rt.classes = s.chargers;
      std::sort(rt.classes.begin(), rt.classes.end(),
                [](const ChargerSpec& a, const ChargerSpec& b) { return a.power_kw > b.power_kw; });
      rt.busy.assign(rt.classes.size(), 0);
      stations_.push_back(std::move(rt));
    }

    std::sort(fleet.begin(), fleet.end(),
              [](const VehicleInit& a, const VehicleInit& b) { return a.id < b.id; });
    for (const VehicleInit& vi : fleet) {
      VehicleRt rt;
      rt.v = Vehicle{vi.id, vi.vertex, vi.soc_kwh, vi.capacity_kwh, VehicleStatus::Idle, {}};
      rt.available_from = vi.available_from;
      rt.initial_soc = vi.soc_kwh;
      vindex_[vi.id] = vehicles_.size();
      vehicles_.push_back(std::move(rt));
    }
  }

  RunResult run() {
    // seed the event queue
    for (std::size_t i = 0; i < trips_.size(); ++i)
      push(trips_[i].arrival, Pri::Arrival, EvKind::Arrival, static_cast<std::int64_t>(i), 0, 0);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (vehicles_[i].available_from > SimTime::zero())
        push(vehicles_[i].available_from, Pri::Return, EvKind::VehicleEnter,
             static_cast<std::int64_t>(i), 0, 0);
      else
        activate_initial(i);
    }
    if (options_.cost_refresh_period > SimDuration::zero())
      push(options_.cost_refresh_period, Pri::CostRefresh, EvKind::CostRefresh, 0, 0, 0);
    push(SimTime::zero(), Pri::Sample, EvKind::Sample, 0, 0, 0);

    while (!events_.empty()) {
      Ev ev = events_.top();
      if (ev.t > options_.horizon) break;
      events_.pop();
      now_ = ev.t;
      dispatch(ev);
    }
    now_ = options_.horizon;
    return finalize();
  }

 private:
  // ---- events ------------------------------------------------------------
  enum class EvKind {
    VehicleEnter, Dropoff, ChargeComplete, ArriveStation, PickupArrive, RelocArrive,
    Arrival, CostRefresh, Passage, Abandon, Sample
  };
  // equal-timestamp ordering: vehicle returns, then charge completions, then
  // movement arrivals, then customer arrivals, then refresh, then passages
  enum Pri : int {
    Return = 0, Charge = 1, Move = 2, Arrival = 3, CostRefresh = 4, Passage = 5,
    Abandon = 6, Sample = 7
  };

  struct Ev {
    SimTime t;
    int pri = 0;
    std::uint64_t seq = 0;
    EvKind kind = EvKind::Sample;
    std::int64_t a = 0;  // vehicle index / trip index / node id / customer id
    std::int64_t b = 0;
    std::uint64_t gen = 0;

    bool operator>(const Ev& o) const {
      if (t != o.t) return t > o.t;
      if (pri != o.pri) return pri > o.pri;
      return seq > o.seq;
    }
  };

  void push(SimTime t, int pri, EvKind kind, std::int64_t a, std::int64_t b, std::uint64_t gen) {
    events_.push(Ev{t, pri, seq_++, kind, a, b, gen});
  }

  // ---- runtime state -----------------------------------------------------
  struct NodeRt {
    NodeQueue queue;
    std::optional<SimDuration> min_cost;  // over assignable vehicles with rows
    VehicleId argmin_vehicle = -1;
    std::uint64_t passage_gen = 0;
  };

  struct PickupPlan {
    CustomerId customer = 0;
    NodeId node = 0;
    ZoneId origin = 0, dest = 0;
    std::optional<SimDuration> trip_override;
    DispatchPlan plan;
    SimTime assigned_at;
    SimTime quoted_pickup;
  };

  struct ChargeSession {
    std::size_t station = 0;
    std::size_t cls = 0;
    double power_kw = 0.0;
    SimTime plugged_at;
    double start_soc = 0.0;
    double target_kwh = 0.0;
  };

  struct Reloc {
    std::size_t station = 0;
    std::vector<VertexId> path;
    std::vector<std::int64_t> arrive_ticks;  // absolute, per path vertex
    std::vector<double> cum_km;
  };

  struct VehicleRt {
    Vehicle v;
    SimTime available_from;
    bool present = false;
    std::optional<ChargeSession> session;
    std::optional<std::size_t> waiting_at_station;
    std::optional<PickupPlan> pickup;
    std::optional<Reloc> reloc;
    std::vector<std::optional<DispatchPlan>> row;
    bool row_valid = false;
    std::uint64_t gen = 0;  // invalidates scheduled charge/move events
    double initial_soc = 0.0;
    double driven_km = 0.0;
    double charged_kwh = 0.0;
    std::int64_t committed_ticks = 0;
    SimTime committed_since;
    SimTime entered_at;
  };

  struct CustomerRt {
    std::size_t trip_index = 0;
    NodeId node = 0;
    enum class State { Waiting, Assigned, PickedUp, Lost } state = State::Waiting;
    SimTime arrival;
    SimTime assigned_at;
    SimTime picked_up_at;
  };

  // ---- helpers -----------------------------------------------------------
  VehicleRt& veh(VehicleId id) { return vehicles_[vindex_.at(id)]; }

  double current_soc(const VehicleRt& r) const {
    if (!r.session) return r.v.soc_kwh;
    double mins = (now_ - r.session->plugged_at).minutes();
    return std::min(r.session->target_kwh, r.session->start_soc + r.session->power_kw * mins / 60.0);
  }

  bool unlimited_range() const { return options_.policy.kind == PolicyKind::NonEvNoReb; }

  void log(const std::string& kind, const std::string& ids, const std::string& detail) {
    if (!options_.log_events) return;
    event_log_.push_back(format_minutes(now_) + "," + kind + "," + ids + "," + detail);
  }

  // Quoted dispatch plans for a vehicle from its current state. NonEV mode
  // ignores charge levels entirely.
  std::vector<std::optional<DispatchPlan>> compute_row(const VehicleRt& r) const {
    Vehicle probe = r.v;
    probe.soc_kwh = current_soc(r);
    if (unlimited_range()) {
      std::vector<std::optional<DispatchPlan>> row(net_.node_count());
      if (!net_.graph().has_vertex(probe.location)) return row;
      ShortestPathTree tree = sssp_tree(net_.graph(), probe.location);
      for (std::size_t i = 0; i < net_.node_count(); ++i) {
        const CustomerNode& c = net_.customer_nodes()[i];
        std::size_t target = net_.graph().index_of(net_.zone(c.zone_id).representative_vertex);
        if (tree.reachable(target))
          row[i] = DispatchPlan{SimDuration::from_ticks(tree.time_ticks[target]),
                                tree.dist_km[target], std::nullopt};
      }
      return row;
    }
    return net_.cost_row(probe);
  }

  void refresh_vehicle_row(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    if (!r.present || !r.v.assignable() || r.reloc) {
      r.row_valid = false;
      return;
    }
    r.row = compute_row(r);
    r.row_valid = true;
  }

  // Effective plan for FCFS-family policies, covering relocating vehicles by
  // diverting at the next vertex on their path.
  std::optional<DispatchPlan> fcfs_quote(const VehicleRt& r, NodeId node) {
    if (!r.reloc) {
      if (!r.row_valid) return std::nullopt;
      return r.row[static_cast<std::size_t>(node)];
    }
    auto [idx, divert_t] = reloc_divert_point(r);
    Vehicle probe = r.v;
    probe.location = r.reloc->path[idx];
    probe.soc_kwh = current_soc(r) - r.reloc->cum_km[idx] / net_.battery().km_per_kwh;
    auto plan = unlimited_range()
                    ? compute_row_single(probe, node)
                    : net_.dispatch_cost(probe, net_.node(node));
    if (!plan) return std::nullopt;
    plan->cost += divert_t - now_;
    return plan;
  }

  std::optional<DispatchPlan> compute_row_single(const Vehicle& probe, NodeId node) const {
    const CustomerNode& c = net_.customer_nodes()[static_cast<std::size_t>(node)];
    ShortestPathTree tree = sssp_tree(net_.graph(), probe.location);
    std::size_t target = net_.graph().index_of(net_.zone(c.zone_id).representative_vertex);
    if (!tree.reachable(target)) return std::nullopt;
    return DispatchPlan{SimDuration::from_ticks(tree.time_ticks[target]), tree.dist_km[target],
                        std::nullopt};
  }

  std::pair<std::size_t, SimTime> reloc_divert_point(const VehicleRt& r) const {
    const Reloc& rl = *r.reloc;
    for (std::size_t i = 0; i < rl.arrive_ticks.size(); ++i)
      if (rl.arrive_ticks[i] >= now_.ticks())
        return {i, SimTime::from_ticks(rl.arrive_ticks[i])};
    return {rl.arrive_ticks.size() - 1, SimTime::from_ticks(rl.arrive_ticks.back())};
  }

  // ---- initial placement -------------------------------------------------
  void activate_initial(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    r.present = true;
    r.entered_at = SimTime::zero();
    refresh_vehicle_row(vi);
    try_autoplug(vi);
  }

  // ---- charger management ------------------------------------------------
  std::optional<std::size_t> station_at_vertex(VertexId v) const {
    for (std::size_t i = 0; i < net_.stations().size(); ++i)
      if (net_.stations()[i].vertex == v) return i;
    return std::nullopt;
  }

  void try_autoplug(std::size_t vi) {
    if (unlimited_range()) return;
    VehicleRt& r = vehicles_[vi];
    if (r.v.status != VehicleStatus::Idle) return;
    auto si = station_at_vertex(r.v.location);
    if (!si) return;
    request_charger(vi, *si, r.v.capacity_kwh);
  }

  void request_charger(std::size_t vi, std::size_t station, double target_kwh) {
    VehicleRt& r = vehicles_[vi];
    target_kwh = std::min(target_kwh, r.v.capacity_kwh);
    StationRt& st = stations_[station];
    for (std::size_t cls = 0; cls < st.classes.size(); ++cls) {
      if (st.busy[cls] < st.classes[cls].count) {
        plug(vi, station, cls, target_kwh);
        return;
      }
    }
    r.waiting_at_station = station;
    st.waiting.push_back(r.v.id);
    log("charger_wait", "v" + std::to_string(r.v.id), "station=" + std::to_string(station));
  }

  void plug(std::size_t vi, std::size_t station, std::size_t cls, double target_kwh) {
    VehicleRt& r = vehicles_[vi];
    StationRt& st = stations_[station];
    ++st.busy[cls];
    if (st.busy[cls] > st.classes[cls].count) ++charger_capacity_violations_;
    r.session = ChargeSession{station, cls, st.classes[cls].power_kw, now_, r.v.soc_kwh, target_kwh};
    if (r.v.status == VehicleStatus::Idle) r.v.status = VehicleStatus::ChargingIdle;
    r.waiting_at_station.reset();
    double deficit = std::max(0.0, target_kwh - r.v.soc_kwh);
    SimTime done = now_ + SimDuration::from_minutes(deficit / r.session->power_kw * 60.0);
    push(done, Pri::Charge, EvKind::ChargeComplete, static_cast<std::int64_t>(vi), 0, ++r.gen);
    log("plug", "v" + std::to_string(r.v.id),
        "station=" + std::to_string(station) + " power=" + std::to_string(r.session->power_kw));
  }

  // Stop charging now, book the delivered energy, free the plug.
  void unplug(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    if (!r.session) return;
    double soc = current_soc(r);
    double delta = soc - r.session->start_soc;
    r.charged_kwh += delta;
    r.v.soc_kwh = soc;
    StationRt& st = stations_[r.session->station];
    --st.busy[r.session->cls];
    std::size_t station = r.session->station;
    r.session.reset();
    ++r.gen;  // cancels the pending ChargeComplete
    if (r.v.status == VehicleStatus::ChargingIdle) r.v.status = VehicleStatus::Idle;
    log("unplug", "v" + std::to_string(r.v.id), "soc=" + std::to_string(soc));
    allocate_waiters(station);
  }

  void allocate_waiters(std::size_t station) {
    StationRt& st = stations_[station];
    while (!st.waiting.empty()) {
      std::optional<std::size_t> free_cls;
      for (std::size_t cls = 0; cls < st.classes.size(); ++cls)
        if (st.busy[cls] < st.classes[cls].count) {
          free_cls = cls;
          break;
        }
      if (!free_cls) return;
      // lowest SOC first, ties by id
      std::size_t best = 0;
      double best_soc = 0.0;
      for (std::size_t i = 0; i < st.waiting.size(); ++i) {
        double soc = veh(st.waiting[i]).v.soc_kwh;
        if (i == 0 || soc < best_soc ||
            (soc == best_soc && st.waiting[i] < st.waiting[best])) {
          best = i;
          best_soc = soc;
        }
      }
      VehicleId vid = st.waiting[best];
      st.waiting.erase(st.waiting.begin() + static_cast<std::ptrdiff_t>(best));
      std::size_t vi = vindex_.at(vid);
      VehicleRt& r = vehicles_[vi];
      double target = r.pickup && r.pickup->plan.charge ? r.pickup->plan.charge->target_kwh
                                                        : r.v.capacity_kwh;
      plug(vi, station, *free_cls, target);
    }
  }

  void leave_station_queue(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    if (!r.waiting_at_station) return;
    StationRt& st = stations_[*r.waiting_at_station];
    st.waiting.erase(std::remove(st.waiting.begin(), st.waiting.end(), r.v.id), st.waiting.end());
    r.waiting_at_station.reset();
  }

  // ---- MDPP bookkeeping --------------------------------------------------
  void recompute_node_min(std::size_t ni) {
    NodeRt& n = nodes_[ni];
    n.min_cost.reset();
    n.argmin_vehicle = -1;
    for (const VehicleRt& r : vehicles_) {
      if (!r.present || !r.v.assignable() || !r.row_valid) continue;
      const auto& plan = r.row[ni];
      if (!plan) continue;
      if (!n.min_cost || plan->cost < *n.min_cost) {
        n.min_cost = plan->cost;
        n.argmin_vehicle = r.v.id;
      }
    }
  }

  void schedule_passage(std::size_t ni) {
    NodeRt& n = nodes_[ni];
    ++n.passage_gen;
    if (!n.queue.occupied() || !n.min_cost) return;
    // fire one tick past the threshold so the wait strictly exceeds V*C
    SimTime crossing = *n.queue.hol_arrival() + scale(options_.policy.V, *n.min_cost) +
                       SimDuration::from_ticks(1);
    SimTime at = std::max(crossing, now_);
    push(at, Pri::Passage, EvKind::Passage, static_cast<std::int64_t>(ni), 0, n.passage_gen);
  }

  void mdpp_on_vehicle_available(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    refresh_vehicle_row(vi);
    if (!r.row_valid) return;
    // strict vehicle-triggered knapsack; equality cases resolve through an
    // immediately scheduled passage event instead
    std::vector<std::optional<SimDuration>> hol(nodes_.size());
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni)
      if (nodes_[ni].queue.occupied()) hol[ni] = nodes_[ni].queue.hol_wait(now_);
    VehicleCosts vc{r.v.id, {}};
    vc.cost_per_node.resize(nodes_.size());
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni)
      if (r.row[ni]) vc.cost_per_node[ni] = r.row[ni]->cost;
    auto target = assign_vehicle_triggered(vc, hol, options_.policy.V);
    if (target) {
      execute_assignment(vi, *target);
      return;
    }
    // no strict pair: fold the new vehicle into the per-node minima
    bool changed = false;
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
      const auto& plan = r.row[ni];
      if (!plan) continue;
      NodeRt& n = nodes_[ni];
      if (!n.min_cost || plan->cost < *n.min_cost) {
        n.min_cost = plan->cost;
        n.argmin_vehicle = r.v.id;
        if (n.queue.occupied()) schedule_passage(ni);
        changed = true;
      }
    }
    (void)changed;
  }

  void mdpp_on_vehicle_removed(VehicleId vid) {
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
      if (nodes_[ni].argmin_vehicle != vid) continue;
      recompute_node_min(ni);
      if (nodes_[ni].queue.occupied()) schedule_passage(ni);
    }
  }

  void mdpp_full_reschedule() {
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
      recompute_node_min(ni);
      if (nodes_[ni].queue.occupied()) schedule_passage(ni);
    }
  }

  // ---- FCFS-family policies ----------------------------------------------
  void fcfs_scan() {
    // waiting customers in global arrival order
    for (auto it = fcfs_waiting_.begin(); it != fcfs_waiting_.end();) {
      CustomerId cid = it->second;
      NodeId node = customers_.at(cid).node;
      std::optional<SimDuration> best_cost;
      std::optional<std::size_t> best_vi;
      std::optional<DispatchPlan> best_plan;
      for (std::size_t vi = 0; vi < vehicles_.size(); ++vi) {
        VehicleRt& r = vehicles_[vi];
        if (!r.present || !r.v.assignable()) continue;
        auto plan = fcfs_quote(r, node);
        if (!plan) continue;
        if (!best_cost || plan->cost < *best_cost) {
          best_cost = plan->cost;
          best_vi = vi;
          best_plan = plan;
        }
      }
      if (best_vi) {
        it = fcfs_waiting_.erase(it);
        execute_assignment_planned(*best_vi, node, *best_plan);
      } else {
        ++it;  // skipped, nothing feasible now
      }
    }
  }

  void charger_chasing_relocate(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    if (station_at_vertex(r.v.location)) return;  // auto-connected instead
    ShortestPathTree tree = sssp_tree(net_.graph(), r.v.location);
    std::optional<std::size_t> best;
    std::int64_t best_ticks = 0;
    for (std::size_t si = 0; si < net_.stations().size(); ++si) {
      std::size_t sv = net_.graph().index_of(net_.stations()[si].vertex);
      if (!tree.reachable(sv)) continue;
      if (!best || tree.time_ticks[sv] < best_ticks) {
        best = si;
        best_ticks = tree.time_ticks[sv];
      }
    }
    if (!best) return;
    std::vector<VertexId> path = tree_path(net_.graph(), tree, net_.stations()[*best].vertex);
    Reloc rl;
    rl.station = *best;
    rl.path = path;
    for (VertexId pv : path) {
      std::size_t idx = net_.graph().index_of(pv);
      rl.arrive_ticks.push_back(now_.ticks() + tree.time_ticks[idx]);
      rl.cum_km.push_back(tree.dist_km[idx]);
    }
    r.reloc = std::move(rl);
    r.v.status = VehicleStatus::EnRouteCharge;
    r.row_valid = false;
    push(SimTime::from_ticks(r.reloc->arrive_ticks.back()), Pri::Move, EvKind::RelocArrive,
         static_cast<std::int64_t>(vi), 0, ++r.gen);
    log("relocate", "v" + std::to_string(r.v.id), "station=" + std::to_string(*best));
  }

  // ---- assignment execution ----------------------------------------------
  void execute_assignment(std::size_t vi, NodeId node) {
    const auto& plan = vehicles_[vi].row[static_cast<std::size_t>(node)];
    assert(plan);
    execute_assignment_planned(vi, node, *plan);
  }

  void execute_assignment_planned(std::size_t vi, NodeId node, const DispatchPlan& plan) {
    VehicleRt& r = vehicles_[vi];
    NodeRt& n = nodes_[static_cast<std::size_t>(node)];
    SimDuration hol_wait = n.queue.hol_wait(now_);
    CustomerId cid = n.queue.serve_hol();
    CustomerRt& cust = customers_.at(cid);
    cust.state = CustomerRt::State::Assigned;
    cust.assigned_at = now_;
    fcfs_waiting_.erase({cust.arrival.ticks(), cid});
    ++served_;
    sum_wait_assign_ticks_ += (now_ - cust.arrival).ticks();

    assignments_.push_back({now_, r.v.id, cid, node, plan.cost, hol_wait});
    log("assign", "v" + std::to_string(r.v.id) + ":c" + std::to_string(cid),
        "node=" + std::to_string(node) + " cost=" + format_minutes(plan.cost));

    // vehicle leaves the assignable pool
    if (r.session) unplug(vi);
    leave_station_queue(vi);
    SimTime start = now_;
    if (r.reloc) {
      auto [idx, divert_t] = reloc_divert_point(r);
      double km = r.reloc->cum_km[idx];
      r.driven_km += km;
      r.v.soc_kwh -= unlimited_range() ? 0.0 : km / net_.battery().km_per_kwh;
      dispatch_km_ += km;
      r.v.location = r.reloc->path[idx];
      start = divert_t;
      r.reloc.reset();
      ++r.gen;  // cancels RelocArrive
    }
    r.row_valid = false;
    r.v.status = VehicleStatus::EnRoutePickup;
    r.v.committed_customer = cid;
    r.committed_since = now_;

    const CustomerRequest& req = trips_[cust.trip_index];
    PickupPlan pp;
    pp.customer = cid;
    pp.node = node;
    pp.origin = req.origin_zone;
    pp.dest = req.dest_zone;
    pp.trip_override = req.trip_duration_override;
    pp.plan = plan;
    pp.assigned_at = now_;
    pp.quoted_pickup = now_ + plan.cost;
    r.pickup = std::move(pp);

    if (plan.charge) {
      push(start + plan.charge->t_to_station, Pri::Move, EvKind::ArriveStation,
           static_cast<std::int64_t>(vi), 0, ++r.gen);
    } else {
      // plan.cost already covers any divert wait, so arrival is now + cost
      push(now_ + plan.cost, Pri::Move, EvKind::PickupArrive,
           static_cast<std::int64_t>(vi), 0, ++r.gen);
    }

    // policy bookkeeping after removing vehicle and customer
    if (options_.policy.kind == PolicyKind::Mdpp) {
      mdpp_on_vehicle_removed(r.v.id);
      schedule_passage(static_cast<std::size_t>(node));
    }
  }

  // ---- event handlers ----------------------------------------------------
  void dispatch(const Ev& ev) {
    switch (ev.kind) {
      case EvKind::Arrival: on_arrival(static_cast<std::size_t>(ev.a)); break;
      case EvKind::VehicleEnter: on_vehicle_enter(static_cast<std::size_t>(ev.a)); break;
      case EvKind::Dropoff: on_dropoff(static_cast<std::size_t>(ev.a), ev.gen); break;
      case EvKind::ChargeComplete: on_charge_complete(static_cast<std::size_t>(ev.a), ev.gen); break;
      case EvKind::ArriveStation: on_arrive_station(static_cast<std::size_t>(ev.a), ev.gen); break;
      case EvKind::PickupArrive: on_pickup(static_cast<std::size_t>(ev.a), ev.gen); break;
      case EvKind::RelocArrive: on_reloc_arrive(static_cast<std::size_t>(ev.a), ev.gen); break;
      case EvKind::CostRefresh: on_cost_refresh(); break;
      case EvKind::Passage: on_passage(static_cast<std::size_t>(ev.a), ev.gen); break;
      case EvKind::Abandon: on_abandon(ev.a); break;
      case EvKind::Sample: on_sample(); break;
    }
  }

  void on_arrival(std::size_t trip_index) {
    const CustomerRequest& req = trips_[trip_index];
    NodeId node = net_.node_id(req.origin_zone, req.required_level);
    NodeRt& n = nodes_[static_cast<std::size_t>(node)];
    bool was_empty = !n.queue.occupied();
    n.queue.enqueue(req.id, now_);
    customers_[req.id] = CustomerRt{trip_index, node, CustomerRt::State::Waiting, now_, {}, {}};
    fcfs_waiting_.insert({now_.ticks(), req.id});
    ++arrivals_;
    log("arrival", "c" + std::to_string(req.id),
        "zone=" + std::to_string(req.origin_zone) + " level=" + std::to_string(req.required_level));
    if (options_.max_wait)
      push(now_ + *options_.max_wait, Pri::Abandon, EvKind::Abandon, req.id, 0, 0);

    if (options_.policy.kind == PolicyKind::Mdpp) {
      if (was_empty) {
        recompute_node_min(static_cast<std::size_t>(node));
        schedule_passage(static_cast<std::size_t>(node));
      }
    } else {
      fcfs_scan();
    }
  }

  void on_vehicle_enter(std::size_t vi) {
    VehicleRt& r = vehicles_[vi];
    r.present = true;
    r.entered_at = now_;
    log("vehicle_enter", "v" + std::to_string(r.v.id), "soc=" + std::to_string(r.v.soc_kwh));
    vehicle_became_available(vi);
  }

  void vehicle_became_available(std::size_t vi) {
    if (options_.policy.kind == PolicyKind::Mdpp) {
      mdpp_on_vehicle_available(vi);
      if (vehicles_[vi].v.assignable()) try_autoplug(vi);
    } else {
      refresh_vehicle_row(vi);
      fcfs_scan();
      VehicleRt& r = vehicles_[vi];
      if (r.present && r.v.status == VehicleStatus::Idle) {
        if (options_.policy.kind == PolicyKind::ChargerChasing)
          charger_chasing_relocate(vi);
        if (r.v.status == VehicleStatus::Idle) try_autoplug(vi);
      }
    }
  }

  void on_dropoff(std::size_t vi, std::uint64_t gen) {
    VehicleRt& r = vehicles_[vi];
    if (gen != r.gen) return;
    const PickupPlan& pp = *r.pickup;
    // trip leg energy
    double trip_km = net_.zone_trip_km(pp.origin, pp.dest).value_or(0.0);
    if (!unlimited_range()) r.v.soc_kwh -= trip_km / net_.battery().km_per_kwh;
    r.driven_km += trip_km;
    assert(r.v.soc_kwh > -1e-6);
    r.v.location = net_.zone(pp.dest).representative_vertex;
    r.v.status = VehicleStatus::Idle;
    r.v.committed_customer.reset();
    r.committed_ticks += (now_ - r.committed_since).ticks();
    r.pickup.reset();
    log("dropoff", "v" + std::to_string(r.v.id), "zone=" + std::to_string(pp.dest));
    vehicle_became_available(vi);
  }

  void on_charge_complete(std::size_t vi, std::uint64_t gen) {
    VehicleRt& r = vehicles_[vi];
    if (gen != r.gen) return;
    bool detour = r.pickup.has_value();
    std::size_t station = r.session->station;
    unplug(vi);
    log("charge_complete", "v" + std::to_string(r.v.id), "soc=" + std::to_string(r.v.soc_kwh));
    if (detour) {
      const ChargePlan& cp = *r.pickup->plan.charge;
      push(now_ + cp.t_station_to_zone, Pri::Move, EvKind::PickupArrive,
           static_cast<std::int64_t>(vi), 0, ++r.gen);
    } else {
      // idle vehicle reached full charge; it stays put, unplugged
      (void)station;
      if (options_.policy.kind == PolicyKind::Mdpp)
        mdpp_on_vehicle_available(vi);
      else
        fcfs_scan();
    }
  }

  void on_arrive_station(std::size_t vi, std::uint64_t gen) {
    VehicleRt& r = vehicles_[vi];
    if (gen != r.gen) return;
    const ChargePlan& cp = *r.pickup->plan.charge;
    r.driven_km += cp.km_to_station;
    if (!unlimited_range()) r.v.soc_kwh -= cp.km_to_station / net_.battery().km_per_kwh;
    dispatch_km_ += cp.km_to_station;
    r.v.location = net_.stations()[cp.station_index].vertex;
    assert(r.v.soc_kwh > -1e-6);
    request_charger(vi, cp.station_index, cp.target_kwh);
  }

  void on_pickup(std::size_t vi, std::uint64_t gen) {
    VehicleRt& r = vehicles_[vi];
    if (gen != r.gen) return;
    PickupPlan& pp = *r.pickup;
    double leg_km = pp.plan.charge ? pp.plan.charge->km_station_to_zone : pp.plan.pickup_km;
    r.driven_km += leg_km;
    if (!unlimited_range()) r.v.soc_kwh -= leg_km / net_.battery().km_per_kwh;
    dispatch_km_ += leg_km;
    assert(r.v.soc_kwh > -1e-6);
    r.v.location = net_.zone(pp.origin).representative_vertex;
    r.v.status = VehicleStatus::Serving;
    if (now_ > pp.quoted_pickup) ++quote_discrepancies_;

    CustomerRt& cust = customers_.at(pp.customer);
    cust.state = CustomerRt::State::PickedUp;
    cust.picked_up_at = now_;
    ++picked_up_;
    sum_wait_pickup_ticks_ += (now_ - cust.arrival).ticks();
    log("pickup", "v" + std::to_string(r.v.id) + ":c" + std::to_string(pp.customer), "");

    SimDuration trip_time = pp.trip_override
                                ? *pp.trip_override
                                : net_.zone_travel_time(pp.origin, pp.dest)
                                      .value_or(SimDuration::zero());
    push(now_ + trip_time, Pri::Return, EvKind::Dropoff, static_cast<std::int64_t>(vi), 0,
         ++r.gen);
  }

  void on_reloc_arrive(std::size_t vi, std::uint64_t gen) {
    VehicleRt& r = vehicles_[vi];
    if (gen != r.gen) return;
    const Reloc& rl = *r.reloc;
    double km = rl.cum_km.back();
    r.driven_km += km;
    if (!unlimited_range()) r.v.soc_kwh -= km / net_.battery().km_per_kwh;
    dispatch_km_ += km;
    r.v.location = net_.stations()[rl.station].vertex;
    std::size_t station = rl.station;
    r.reloc.reset();
    r.v.status = VehicleStatus::Idle;
    refresh_vehicle_row(vi);
    assert(r.v.soc_kwh > -1e-6);
    request_charger(vi, station, r.v.capacity_kwh);
    fcfs_scan();
  }

  void on_cost_refresh() {
    push(now_ + options_.cost_refresh_period, Pri::CostRefresh, EvKind::CostRefresh, 0, 0, 0);
    for (std::size_t vi = 0; vi < vehicles_.size(); ++vi) refresh_vehicle_row(vi);
    log("cost_refresh", "-", "");
    if (options_.policy.kind == PolicyKind::Mdpp)
      mdpp_full_reschedule();
    else
      fcfs_scan();
  }

  void on_passage(std::size_t ni, std::uint64_t gen) {
    NodeRt& n = nodes_[ni];
    if (gen != n.passage_gen) return;
    if (!n.queue.occupied()) return;
    recompute_node_min(ni);
    if (!n.min_cost) return;
    SimTime crossing = *n.queue.hol_arrival() + scale(options_.policy.V, *n.min_cost);
    if (crossing >= now_) {  // not strictly past the threshold yet
      schedule_passage(ni);
      return;
    }
    // the waiting time has reached the viability threshold: cheapest vehicle
    std::size_t vi = vindex_.at(n.argmin_vehicle);
    execute_assignment(vi, static_cast<NodeId>(ni));
  }

  void on_abandon(CustomerId cid) {
    auto it = customers_.find(cid);
    if (it == customers_.end() || it->second.state != CustomerRt::State::Waiting) return;
    CustomerRt& cust = it->second;
    NodeRt& n = nodes_[static_cast<std::size_t>(cust.node)];
    bool was_hol = n.queue.occupied() && n.queue.hol().id == cid;
    n.queue.remove(cid);
    cust.state = CustomerRt::State::Lost;
    fcfs_waiting_.erase({cust.arrival.ticks(), cid});
    ++lost_;
    log("abandon", "c" + std::to_string(cid), "");
    if (options_.policy.kind == PolicyKind::Mdpp && was_hol)
      schedule_passage(static_cast<std::size_t>(cust.node));
  }

  void on_sample() {
    SeriesPoint p;
    p.time = now_;
    for (const NodeRt& n : nodes_) {
      p.waiting_count += static_cast<std::int64_t>(n.queue.backlog_size());
      p.sum_hol_wait_min += n.queue.hol_wait(now_).minutes();
    }
    series_.push_back(p);
    if (now_ + options_.sample_period <= options_.horizon)
      push(now_ + options_.sample_period, Pri::Sample, EvKind::Sample, 0, 0, 0);
  }

  // ---- results -----------------------------------------------------------
  RunResult finalize() {
    RunResult res;
    res.arrivals = arrivals_;
    res.served = served_;
    res.picked_up = picked_up_;
    res.lost = lost_;
    for (const NodeRt& n : nodes_)
      res.waiting_at_end += static_cast<std::int64_t>(n.queue.backlog_size());
    res.mean_wait_to_assignment_min =
        served_ ? static_cast<double>(sum_wait_assign_ticks_) / served_ / SimTime::kTicksPerMinute
                : 0.0;
    res.mean_wait_to_pickup_min =
        picked_up_
            ? static_cast<double>(sum_wait_pickup_ticks_) / picked_up_ / SimTime::kTicksPerMinute
            : 0.0;
    double sum_waiting = 0.0;
    for (const SeriesPoint& p : series_) sum_waiting += static_cast<double>(p.waiting_count);
    res.mean_waiting_customers = series_.empty() ? 0.0 : sum_waiting / series_.size();
    res.total_dispatch_km = dispatch_km_;
    res.quote_discrepancies = quote_discrepancies_;
    res.charger_capacity_violations = charger_capacity_violations_;
    res.assignments = std::move(assignments_);
    res.waiting_series = std::move(series_);
    res.event_log = std::move(event_log_);

    for (VehicleRt& r : vehicles_) {
      if (r.session) {  // materialize in-progress charging at the horizon
        double soc = current_soc(r);
        r.charged_kwh += soc - r.session->start_soc;
        r.v.soc_kwh = soc;
        r.session.reset();
      }
      std::int64_t committed = r.committed_ticks;
      if (r.v.committed_customer) committed += (now_ - r.committed_since).ticks();
      std::int64_t present_ticks = r.present ? (now_ - r.entered_at).ticks() : 0;
      VehicleAudit a;
      a.id = r.v.id;
      a.initial_soc_kwh = r.initial_soc;
      a.final_soc_kwh = r.v.soc_kwh;
      a.driven_km = r.driven_km;
      a.charged_kwh = r.charged_kwh;
      a.idle_fraction = present_ticks > 0
                            ? 1.0 - static_cast<double>(committed) / present_ticks
                            : 1.0;
      res.vehicle_audits.push_back(a);
    }
    return res;
  }

  // ---- members -----------------------------------------------------------
  struct StationRt {
    std::vector<ChargerSpec> classes;  // sorted by power descending
    std::vector<int> busy;
    std::vector<VehicleId> waiting;
  };

  const NetworkModel& net_;
  EngineOptions options_;
  std::vector<CustomerRequest> trips_;
  std::vector<NodeRt> nodes_;
  std::vector<VehicleRt> vehicles_;
  std::unordered_map<VehicleId, std::size_t> vindex_;
  std::vector<StationRt> stations_;
  std::unordered_map<CustomerId, CustomerRt> customers_;
  std::set<std::pair<std::int64_t, CustomerId>> fcfs_waiting_;
  std::priority_queue<Ev, std::vector<Ev>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  SimTime now_;

  std::int64_t arrivals_ = 0, served_ = 0, picked_up_ = 0, lost_ = 0;
  std::int64_t sum_wait_assign_ticks_ = 0, sum_wait_pickup_ticks_ = 0;
  double dispatch_km_ = 0.0;
  std::int64_t quote_discrepancies_ = 0, charger_capacity_violations_ = 0;
  std::vector<AssignmentRecord> assignments_;
  std::vector<SeriesPoint> series_;
  std::vector<std::string> event_log_;
};

struct AuditReport {
  std::vector<std::string> violations;
  [[nodiscard]] bool clean() const { return violations.empty(); }
};

/// Post-hoc log checks: per-vehicle energy books balance, customers are
/// conserved, chargers never oversubscribe, and each assignment strictly
/// clears its viability threshold.
inline AuditReport audit_run(const RunResult& res, const std::vector<VehicleInit>& fleet,
                             const BatteryModel& battery, const PolicyConfig& policy) {
  AuditReport rep;
  if (policy.kind != PolicyKind::NonEvNoReb) {
    std::unordered_map<VehicleId, double> capacity;
    for (const VehicleInit& vi : fleet) capacity[vi.id] = vi.capacity_kwh;
    for (const VehicleAudit& a : res.vehicle_audits) {
      double expect = a.initial_soc_kwh - a.driven_km / battery.km_per_kwh + a.charged_kwh;
      if (std::abs(a.final_soc_kwh - expect) > 1e-6)
        rep.violations.push_back("vehicle " + std::to_string(a.id) +
                                 ": energy books off by " +
                                 std::to_string(a.final_soc_kwh - expect) + " kWh");
      if (a.final_soc_kwh < -1e-6)
        rep.violations.push_back("vehicle " + std::to_string(a.id) + ": negative SOC");
      auto cap = capacity.find(a.id);
      if (cap != capacity.end() && a.final_soc_kwh > cap->second + 1e-6)
        rep.violations.push_back("vehicle " + std::to_string(a.id) + ": SOC above capacity");
    }
  }
  if (res.arrivals != res.served + res.lost + res.waiting_at_end)
    rep.violations.push_back(
        "customer conservation: " + std::to_string(res.arrivals) + " arrivals vs " +
        std::to_string(res.served) + " served + " + std::to_string(res.lost) + " lost + " +
        std::to_string(res.waiting_at_end) + " waiting");
  if (res.charger_capacity_violations > 0)
    rep.violations.push_back(std::to_string(res.charger_capacity_violations) +
                             " charger capacity violations");
  if (policy.kind == PolicyKind::Mdpp) {
    for (const AssignmentRecord& a : res.assignments)
      if (!(a.hol_wait > scale(policy.V, a.cost)))
        rep.violations.push_back("assignment of customer " + std::to_string(a.customer) +
                                 " at " + format_minutes(a.time) +
                                 " below the viability threshold");
  }
  return rep;
}

inline RunResult run_simulation(const NetworkModel& net, std::vector<VehicleInit> fleet,
                                std::vector<CustomerRequest> trips, const EngineOptions& options) {
  SimulationEngine engine(net, std::move(fleet), std::move(trips), options);
  return engine.run();
}

}  // namespace saev
