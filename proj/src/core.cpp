#include "forksim/core.hpp"

#include <cmath>
#include <sstream>

namespace forksim {

namespace {
constexpr double kShareTolerance = 1e-9;
// Gaps this close to zero are rounding noise, not an overlap.
constexpr double kGapSlop = 1e-9;
} // namespace

const char* to_string(VehicleType t) {
  switch (t) {
    case VehicleType::Motorcycle: return "Motorcycle";
    case VehicleType::Wheeler4x8: return "Wheeler4x8";
    case VehicleType::Wheeler4x6: return "Wheeler4x6";
    case VehicleType::Van:        return "Van";
    case VehicleType::Jeepney:    return "Jeepney";
    case VehicleType::Car:        return "Car";
    case VehicleType::Bus:        return "Bus";
    case VehicleType::Bicycle:    return "Bicycle";
  }
  return "?";
}

std::optional<VehicleType> vehicle_type_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kVehicleTypeCount; ++i) {
    auto t = static_cast<VehicleType>(i);
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

const char* to_string(DrivingState s) {
  switch (s) {
    case DrivingState::Free:      return "Free";
    case DrivingState::Following: return "Following";
    case DrivingState::Emergency: return "Emergency";
  }
  return "?";
}

void VehicleClass::validate() const {
  auto fail = [this](const std::string& msg) {
    throw std::invalid_argument(std::string(to_string(type)) + ": " + msg);
  };
  if (!(length_m > 0.0)) fail("length must be > 0");
  if (!(width_m > 0.0)) fail("width must be > 0");
  if (effective_length_m < length_m) fail("effective length must be >= length");
  if (!(a_max > 0.0)) fail("a_max must be > 0");
  if (!(a_normal < 0.0)) fail("a_normal must be < 0");
  if (!(a_emergency <= a_normal)) fail("a_emergency must be <= a_normal");
  if (!(desired_speed_mean > 0.0)) fail("desired speed mean must be > 0");
  if (desired_speed_sd < 0.0) fail("desired speed sd must be >= 0");
  if (share < 0.0 || share > 1.0) fail("share must be in [0,1]");
}

VehicleClassSet default_vehicle_classes() {
  // Lengths, widths and shares come from the field survey; the standstill
  // buffer is 1.0 m. Acceleration limits and speed distributions are
  // simulation parameters, overridable per scenario.
  auto mk = [](VehicleType t, double len, double wid, double amax, double anorm,
               double vmean, double vsd, double share) {
    VehicleClass c;
    c.type = t;
    c.length_m = len;
    c.width_m = wid;
    c.effective_length_m = len + 1.0;
    c.a_max = amax;
    c.a_normal = anorm;
    c.a_emergency = 2.0 * anorm;
    c.desired_speed_mean = vmean;
    c.desired_speed_sd = vsd;
    c.share = share;
    return c;
  };
  return VehicleClassSet{
      mk(VehicleType::Motorcycle, 2.00, 1.5, 3.5, -3.5, 11.0, 1.5, 0.3830),
      mk(VehicleType::Wheeler4x8, 6.59, 1.5, 1.2, -2.0, 9.0, 1.0, 0.0064),
      mk(VehicleType::Wheeler4x6, 5.41, 1.5, 1.2, -2.0, 9.5, 1.0, 0.0275),
      mk(VehicleType::Van,        5.50, 1.5, 2.0, -2.5, 10.5, 1.2, 0.0588),
      mk(VehicleType::Jeepney,    4.00, 1.5, 2.2, -2.5, 10.0, 1.2, 0.0960),
      mk(VehicleType::Car,        4.50, 1.5, 3.0, -3.0, 11.0, 1.5, 0.3173),
      mk(VehicleType::Bus,       11.54, 2.5, 1.2, -2.0, 9.0, 1.0, 0.0038),
      mk(VehicleType::Bicycle,    1.45, 0.5, 1.0, -1.5, 4.5, 1.0, 0.1072),
  };
}

void validate_class_set(const VehicleClassSet& classes) {
  double total = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].type != static_cast<VehicleType>(i))
      throw std::invalid_argument("class set must be in listing order");
    classes[i].validate();
    total += classes[i].share;
  }
  if (std::abs(total - 1.0) > kShareTolerance) {
    std::ostringstream os;
    os << "class shares must sum to 1, got " << total;
    throw std::invalid_argument(os.str());
  }
}

double effective_gap(double leader_x, double leader_length, double follower_x) {
  const double gap = leader_x - leader_length - follower_x;
  if (gap < -kGapSlop) {
    std::ostringstream os;
    os << "overlap fault: gap " << gap << " (leader front " << leader_x
       << ", leader length " << leader_length << ", follower front "
       << follower_x << ")";
    throw OverlapFault(os.str());
  }
  return gap < 0.0 ? 0.0 : gap;
}

} // namespace forksim
