#include <doctest.h>

#include "forksim/core.hpp"

using namespace forksim;

TEST_CASE("effective gap is bumper to bumper") {
  CHECK(effective_gap(50.0, 4.0, 26.0) == doctest::Approx(20.0));
  CHECK(effective_gap(30.0, 5.0, 25.0) == doctest::Approx(0.0));
}

TEST_CASE("kinematic overload matches the scalar form") {
  KinematicState lead{50.0, 0, 10.0, 0.0};
  KinematicState foll{26.0, 0, 12.0, 0.0};
  CHECK(effective_gap(lead, 4.0, foll) == doctest::Approx(20.0));
}

TEST_CASE("overlapping vehicles raise a fault") {
  CHECK_THROWS_AS(effective_gap(30.0, 5.0, 25.5), OverlapFault);
  CHECK_THROWS_AS(effective_gap(10.0, 4.0, 9.0), OverlapFault);
}

TEST_CASE("sub-nanometre intrusions clamp to zero instead of faulting") {
  CHECK(effective_gap(30.0, 5.0, 25.0 + 5e-10) == 0.0);
}

TEST_CASE("default class set is complete and consistent") {
  const auto classes = default_vehicle_classes();
  REQUIRE(classes.size() == kVehicleTypeCount);
  for (std::size_t i = 0; i < classes.size(); ++i)
    CHECK(classes[i].type == static_cast<VehicleType>(i));
  CHECK_NOTHROW(validate_class_set(classes));

  double shares = 0.0;
  for (const auto& c : classes) {
    shares += c.share;
    CHECK(c.effective_length_m == doctest::Approx(c.length_m + 1.0));
    CHECK(c.a_emergency <= c.a_normal);
  }
  CHECK(shares == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("class validation rejects inconsistent parameters") {
  VehicleClass c = default_vehicle_classes()[std::size_t(VehicleType::Car)];
  SUBCASE("nonpositive length") {
    c.length_m = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("nonpositive a_max") {
    c.a_max = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("emergency weaker than normal braking") {
    c.a_emergency = c.a_normal + 0.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("share outside the unit interval") {
    c.share = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("effective length shorter than the body") {
    c.effective_length_m = c.length_m - 0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
}

TEST_CASE("class set validation rejects a perturbed share sum") {
  auto classes = default_vehicle_classes();
  classes[0].share += 0.01;
  CHECK_THROWS_AS(validate_class_set(classes), std::invalid_argument);
}

TEST_CASE("class set validation rejects out-of-order entries") {
  auto classes = default_vehicle_classes();
  std::swap(classes[0], classes[1]);
  CHECK_THROWS_AS(validate_class_set(classes), std::invalid_argument);
}

TEST_CASE("vehicle type names round-trip") {
  for (std::size_t i = 0; i < kVehicleTypeCount; ++i) {
    const auto t = static_cast<VehicleType>(i);
    const auto back = vehicle_type_from_string(to_string(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK_FALSE(vehicle_type_from_string("Tricycle").has_value());
  CHECK_FALSE(vehicle_type_from_string("").has_value());
}

TEST_CASE("driving state names") {
  CHECK(std::string(to_string(DrivingState::Free)) == "Free");
  CHECK(std::string(to_string(DrivingState::Following)) == "Following");
  CHECK(std::string(to_string(DrivingState::Emergency)) == "Emergency");
}
