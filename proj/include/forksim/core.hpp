#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace forksim {

/// Raised when two vehicles on the same lane would occupy overlapping
/// space. This is a simulation integrity error: the replication that
/// detects it must abort and surface the diagnostic.
class OverlapFault : public std::runtime_error {
public:
  explicit OverlapFault(const std::string& what) : std::runtime_error(what) {}
};

enum class VehicleType : std::uint8_t {
  Motorcycle = 0,
  Wheeler4x8,
  Wheeler4x6,
  Van,
  Jeepney,
  Car,
  Bus,
  Bicycle,
};

inline constexpr std::size_t kVehicleTypeCount = 8;

const char* to_string(VehicleType t);
std::optional<VehicleType> vehicle_type_from_string(const std::string& s);

/// Per-type physical and behavioral parameters. Lengths/widths and the
/// population shares default to the observed survey values; acceleration
/// limits and desired-speed distributions are simulation parameters.
struct VehicleClass {
  VehicleType type = VehicleType::Car;
  double length_m = 4.5;
  double width_m = 1.5;
  double effective_length_m = 5.5;  // length + standstill buffer
  double a_max = 2.5;               // m/s^2, > 0
  double a_normal = -3.0;           // m/s^2, stored signed-negative
  double a_emergency = -6.0;        // strongest allowed braking, < a_normal
  double desired_speed_mean = 11.0; // m/s
  double desired_speed_sd = 1.5;    // m/s
  double share = 0.0;               // fraction of the population, [0,1]

  void validate() const; // throws std::invalid_argument on violation
  bool operator==(const VehicleClass&) const = default;
};

/// The eight default classes in survey listing order
/// (Motorcycle, 4x8, 4x6, Van, Jeepney, Car, Bus, Bicycle).
using VehicleClassSet = std::array<VehicleClass, kVehicleTypeCount>;

VehicleClassSet default_vehicle_classes();

/// Checks that shares sum to 1 (1e-9) and every class validates.
void validate_class_set(const VehicleClassSet& classes);

using LaneId = int;

struct KinematicState {
  double x = 0.0;  // longitudinal position of the front bumper, m
  LaneId lane = 0; // lane index within the current link, 0 = rightmost
  double v = 0.0;  // m/s, always >= 0
  double a = 0.0;  // m/s^2, acceleration applied over the last step
};

/// What a follower knows about its leader.
struct LeaderContext {
  double delta_x = 0.0;       // bumper-to-bumper gap, m
  double delta_v = 0.0;       // leader_v - v_follower, m/s
  double leader_v = 0.0;      // m/s
  double leader_a = 0.0;      // leader acceleration from the previous step
  double leader_length = 0.0; // m
};

enum class DrivingState : std::uint8_t { Free, Following, Emergency };

const char* to_string(DrivingState s);

struct ZoneAccumulators {
  double stopped_time_s = 0.0;
  double distance_m = 0.0;
  double time_s = 0.0;
};

/// One driver-vehicle unit.
struct VehicleAgent {
  std::uint32_t id = 0;
  VehicleClass cls;
  int route = 1; // 1..6
  KinematicState kin;
  DrivingState state = DrivingState::Free;
  double v_desired = 0.0;      // m/s, 0 < v_desired <= legal
  double reaction_time = 1.0;  // s
  double entry_time = 0.0;     // network entry, s
  ZoneAccumulators zone;
};

struct SimClock {
  double t = 0.0;
  double dt = 0.1; // fixed per run, > 0
};

/// Bumper-to-bumper gap: x_lead - L_lead - x_follow. A negative result
/// (beyond float slop) means overlapping vehicles and throws OverlapFault.
double effective_gap(double leader_x, double leader_length, double follower_x);

inline double effective_gap(const KinematicState& leader, double leader_length,
                            const KinematicState& follower) {
  return effective_gap(leader.x, leader_length, follower.x);
}

} // namespace forksim
