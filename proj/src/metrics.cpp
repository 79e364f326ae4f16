#include "forksim/metrics.hpp"

#include <stdexcept>

namespace forksim::metrics {

void zone_step(ZoneAccumulators& acc, double v, double dt, double v_stop) {
  acc.time_s += dt;
  acc.distance_m += v * dt;
  if (v < v_stop)
    acc.stopped_time_s += dt;
}

double delay_time(const TrajectoryRecord& r) { return r.stopped_s; }

double mean_speed(const TrajectoryRecord& r) {
  if (!(r.zone_s > 0.0))
    throw std::domain_error("mean_speed: zero time in zone");
  return r.dist_m / r.zone_s;
}

VehicleMetrics vehicle_metrics(const TrajectoryRecord& r) {
  return {r.zone_s, r.stopped_s, mean_speed(r)};
}

Aggregate aggregate(const std::vector<TrajectoryRecord>& records) {
  Aggregate a;
  if (records.empty())
    return a;
  for (const auto& r : records) {
    a.mean_tau_s += r.zone_s;
    a.mean_delta_s += r.stopped_s;
    a.mean_sigma_mps += mean_speed(r);
  }
  const double n = static_cast<double>(records.size());
  a.mean_tau_s /= n;
  a.mean_delta_s /= n;
  a.mean_sigma_mps /= n;
  a.n = records.size();
  a.empty = false;
  return a;
}

} // namespace forksim::metrics
