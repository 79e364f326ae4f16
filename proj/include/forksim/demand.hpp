#pragma once

#include <array>
#include <vector>

#include "forksim/core.hpp"
#include "forksim/rng.hpp"

namespace forksim {

/// Observed demand: vehicles per route over one observation horizon and
/// the class mix. Defaults are the survey table values.
struct DemandTable {
  std::array<double, 6> route_counts{778.0, 719.0, 524.0,
                                     934.0, 815.0, 156.0};
  std::array<double, 8> class_shares{0.3830, 0.0064, 0.0275, 0.0588,
                                     0.0960, 0.3173, 0.0038, 0.1072};
  double horizon_s = 3600.0;

  double total_count() const;
  void validate() const; // throws std::invalid_argument
  bool operator==(const DemandTable&) const = default;
};

struct Arrival {
  double time_s = 0.0;
  int route = 1; // 1..6
  VehicleType type = VehicleType::Car;
  double v_desired = 0.0; // truncated normal draw, <= legal speed
};

/// Inverse-CDF draw over the class listing order. u in [0, 1).
VehicleType sample_vehicle_class(double u,
                                 const std::array<double, 8>& shares);

/// All route counts scaled by mult; shares untouched.
DemandTable scale_volume(const DemandTable& table, double mult);

/// Independent Poisson stream per route at rate mult * count / horizon,
/// merged and sorted by time. Desired speeds are truncated normal on
/// [2 m/s, legal]. Pure function of the rng state.
std::vector<Arrival> arrival_schedule(const DemandTable& table,
                                      double duration_s, double mult,
                                      const VehicleClassSet& classes,
                                      double legal_speed_mps, Rng& rng);

} // namespace forksim
