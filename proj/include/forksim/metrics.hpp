#pragma once

#include <cstddef>
#include <vector>

#include "forksim/core.hpp"
#include "forksim/trajectory.hpp"

namespace forksim::metrics {

/// Per-step accumulation while a vehicle is inside the zone: time always,
/// distance as v*dt, stopped time whenever v is below the stop threshold.
void zone_step(ZoneAccumulators& acc, double v, double dt, double v_stop);

/// Accumulated stopped time inside the zone.
double delay_time(const TrajectoryRecord& r);

/// Space-mean speed of this vehicle's zone traversal: distance over time,
/// stops included in the denominator. Zero zone time is undefined.
double mean_speed(const TrajectoryRecord& r);

struct VehicleMetrics {
  double tau_s = 0.0;   // zone travel time
  double delta_s = 0.0; // stopped time
  double sigma_mps = 0.0;
};

VehicleMetrics vehicle_metrics(const TrajectoryRecord& r);

struct Aggregate {
  double mean_tau_s = 0.0;
  double mean_delta_s = 0.0;
  double mean_sigma_mps = 0.0;
  size_t n = 0;
  bool empty = true;
};

/// Arithmetic means over completed records; empty input flags the
/// aggregate rather than inventing values.
Aggregate aggregate(const std::vector<TrajectoryRecord>& records);

inline double mps_to_kmh(double v) { return v * 3.6; }

} // namespace forksim::metrics
