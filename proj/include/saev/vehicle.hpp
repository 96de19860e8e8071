// vehicle.hpp - vehicle state shared by the cost model and the simulator
#pragma once

#include <cstdint>
#include <optional>

#include "saev/graph.hpp"

namespace saev {

using VehicleId = std::int64_t;
using CustomerId = std::int64_t;

enum class VehicleStatus {
  Idle,
  ChargingIdle,    // plugged in, still assignable
  EnRoutePickup,   // driving to a customer, possibly via a charging detour
  EnRouteCharge,   // baseline relocation toward a station (charger chasing)
  Serving,
};

struct Vehicle {
  VehicleId id = 0;
  VertexId location = 0;
  double soc_kwh = 0.0;
  double capacity_kwh = 0.0;
  VehicleStatus status = VehicleStatus::Idle;
  std::optional<CustomerId> committed_customer;

  [[nodiscard]] double soc_fraction() const {
    return capacity_kwh > 0.0 ? soc_kwh / capacity_kwh : 0.0;
  }
  [[nodiscard]] bool assignable() const {
    return status == VehicleStatus::Idle || status == VehicleStatus::ChargingIdle ||
           status == VehicleStatus::EnRouteCharge;
  }
};

}  // namespace saev
