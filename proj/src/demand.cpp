#include "forksim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace forksim {

double DemandTable::total_count() const {
  return std::accumulate(route_counts.begin(), route_counts.end(), 0.0);
}

void DemandTable::validate() const {
  for (double c : route_counts)
    if (!(c >= 0.0))
      throw std::invalid_argument("demand: route counts must be >= 0");
  double sum = 0.0;
  for (double s : class_shares) {
    if (!(s >= 0.0 && s <= 1.0))
      throw std::invalid_argument("demand: class shares must be in [0,1]");
    sum += s;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("demand: class shares must sum to 1");
  if (!(horizon_s > 0.0))
    throw std::invalid_argument("demand: horizon must be positive");
}

VehicleType sample_vehicle_class(double u,
                                 const std::array<double, 8>& shares) {
  double cum = 0.0;
  for (size_t i = 0; i < shares.size(); ++i) {
    cum += shares[i];
    if (u < cum)
      return static_cast<VehicleType>(i);
  }
  // u at or beyond the accumulated mass (rounding): last class.
  return static_cast<VehicleType>(shares.size() - 1);
}

DemandTable scale_volume(const DemandTable& table, double mult) {
  if (!(mult >= 0.0))
    throw std::invalid_argument("demand: volume multiplier must be >= 0");
  DemandTable out = table;
  for (double& c : out.route_counts)
    c *= mult;
  return out;
}

std::vector<Arrival> arrival_schedule(const DemandTable& table,
                                      double duration_s, double mult,
                                      const VehicleClassSet& classes,
                                      double legal_speed_mps, Rng& rng) {
  if (!(mult >= 0.0))
    throw std::invalid_argument("demand: volume multiplier must be >= 0");
  table.validate();

  std::vector<Arrival> out;
  for (int route = 1; route <= 6; ++route) {
    const double rate =
        mult * table.route_counts[size_t(route - 1)] / table.horizon_s;
    if (rate <= 0.0)
      continue;
    double t = rng.exponential(rate);
    while (t < duration_s) {
      Arrival a;
      a.time_s = t;
      a.route = route;
      a.type = sample_vehicle_class(rng.uniform01(), table.class_shares);
      const VehicleClass& cls = classes[size_t(a.type)];
      a.v_desired =
          rng.truncated_normal(cls.desired_speed_mean, cls.desired_speed_sd,
                               2.0, legal_speed_mps);
      out.push_back(a);
      t += rng.exponential(rate);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Arrival& a, const Arrival& b) {
                     if (a.time_s != b.time_s)
                       return a.time_s < b.time_s;
                     return a.route < b.route;
                   });
  return out;
}

} // namespace forksim
