#pragma once

#include <cstdint>

#include "forksim/core.hpp"

namespace forksim {

/// One vehicle's completed pass through the measurement zone.
/// entry_s/exit_s are absolute simulation times of zone entry and exit.
struct TrajectoryRecord {
  uint32_t id = 0;
  VehicleType type = VehicleType::Car;
  int route = 1;
  double entry_s = 0.0;
  double exit_s = 0.0;
  double stopped_s = 0.0;
  double dist_m = 0.0;
  double zone_s = 0.0; // time spent in the zone, exit_s - entry_s
};

} // namespace forksim
