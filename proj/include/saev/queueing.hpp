// queueing.hpp - per-node FIFO queues and head-of-line waiting-time dynamics
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "saev/network.hpp"
#include "saev/rng.hpp"
#include "saev/time.hpp"

namespace saev {

struct CustomerRequest {
  CustomerId id = 0;
  ZoneId origin_zone = 0;
  ZoneId dest_zone = 0;
  int required_level = 1;
  SimTime arrival;
  std::optional<SimDuration> trip_duration_override;
  std::optional<SimTime> deadline;  // abandonment instant, when a max wait applies
};

// ---------------------------------------------------------------------------
// Discrete (unit-step) mode. The HOL waiting time follows
//   H(t+1) = chi(t) * [H(t) + 1 - x(t) * tau]^+ + (1 - chi(t)) * A(t)
// with arrival timestamps as the backing store, so tau is derived, never kept.
// ---------------------------------------------------------------------------

struct DiscreteHolState {
  NodeId node_id = 0;
  std::int64_t step = 0;                    // current time t
  std::deque<std::int64_t> arrival_steps;   // FIFO backlog, oldest first

  [[nodiscard]] bool occupied() const {
    // a customer arriving at step a joins the queue at a+1
    return !arrival_steps.empty() && arrival_steps.front() < step;
  }
  [[nodiscard]] std::int64_t hol_wait() const {
    return occupied() ? step - arrival_steps.front() : 0;
  }
  // inter-arrival time between the HOL customer and its successor
  [[nodiscard]] std::optional<std::int64_t> tau() const {
    if (arrival_steps.size() < 2) return std::nullopt;
    return arrival_steps[1] - arrival_steps[0];
  }
  [[nodiscard]] std::size_t backlog_size() const { return arrival_steps.size(); }
};

/// Advances one unit step: serve decision x, arrival indicator A.
inline DiscreteHolState step_waiting_time(DiscreteHolState state, bool serve, bool arrival) {
  if (serve && !state.occupied())
    throw std::logic_error("serve decision on an empty customer node");
  if (serve) state.arrival_steps.pop_front();
  if (arrival) state.arrival_steps.push_back(state.step);
  ++state.step;
  return state;
}

/// Second moment of inter-arrival times as a function of the arrival
/// probability per step, (2 + lambda) / lambda^2.
inline double inter_arrival_second_moment(double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::domain_error("arrival rate must lie in (0, 1)");
  return (2.0 + lambda) / (lambda * lambda);
}

struct ArrivalProcess {
  NodeId node_id = 0;
  double lambda = 0.0;  // arrivals per step (Bernoulli) or per minute (Poisson)

  [[nodiscard]] bool sample_bernoulli(Rng& rng) const { return rng.bernoulli(lambda); }
};

// ---------------------------------------------------------------------------
// Continuous mode. H of an occupied node grows at unit rate between events;
// arrival timestamps make every waiting time exact.
// ---------------------------------------------------------------------------

struct WaitingCustomer {
  CustomerId id = 0;
  SimTime arrival;
};

class NodeQueue {
 public:
  explicit NodeQueue(NodeId node = 0) : node_id_(node) {}

  [[nodiscard]] NodeId node_id() const { return node_id_; }
  [[nodiscard]] bool occupied() const { return !backlog_.empty(); }
  [[nodiscard]] std::size_t backlog_size() const { return backlog_.size(); }

  [[nodiscard]] SimDuration hol_wait(SimTime now) const {
    return occupied() ? now - backlog_.front().arrival : SimDuration::zero();
  }
  [[nodiscard]] std::optional<SimTime> hol_arrival() const {
    if (!occupied()) return std::nullopt;
    return backlog_.front().arrival;
  }
  [[nodiscard]] const WaitingCustomer& hol() const { return backlog_.front(); }

  [[nodiscard]] std::optional<SimDuration> tau() const {
    if (backlog_.size() < 2) return std::nullopt;
    return backlog_[1].arrival - backlog_[0].arrival;
  }

  void enqueue(CustomerId id, SimTime now) {
    if (ids_.count(id)) throw std::logic_error("duplicate customer id in queue");
    ids_.insert(id);
    backlog_.push_back({id, now});
  }

  CustomerId serve_hol() {
    if (backlog_.empty()) throw std::logic_error("serve on empty customer node");
    CustomerId id = backlog_.front().id;
    backlog_.pop_front();
    ids_.erase(id);
    return id;
  }

  bool remove(CustomerId id) {
    if (!ids_.count(id)) return false;
    for (auto it = backlog_.begin(); it != backlog_.end(); ++it)
      if (it->id == id) {
        backlog_.erase(it);
        break;
      }
    ids_.erase(id);
    return true;
  }

  /// Drops every customer waiting at least `max_wait`; returns those removed.
  std::vector<CustomerId> abandon_expired(SimTime now, SimDuration max_wait) {
    std::vector<CustomerId> lost;
    while (!backlog_.empty() && now - backlog_.front().arrival >= max_wait) {
      lost.push_back(backlog_.front().id);
      ids_.erase(backlog_.front().id);
      backlog_.pop_front();
    }
    return lost;
  }

  [[nodiscard]] const std::deque<WaitingCustomer>& backlog() const { return backlog_; }

 private:
  NodeId node_id_ = 0;
  std::deque<WaitingCustomer> backlog_;
  std::unordered_set<CustomerId> ids_;
};

}  // namespace saev
