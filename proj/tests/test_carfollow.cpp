#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "forksim/carfollow.hpp"

using namespace forksim;

namespace {
LeaderContext ctx_of(double gap, double v_follow, double v_lead,
                     double a_lead = 0.0, double lead_len = 4.5) {
  return LeaderContext{gap, v_lead - v_follow, v_lead, a_lead, lead_len};
}
} // namespace

TEST_CASE("no leader means free driving") {
  CHECK(classify_state(10.0, 11.0, std::nullopt, 1.0, -2.0) ==
        DrivingState::Free);
}

TEST_CASE("a distant leader leaves the driver free") {
  // d_follow = max(10*1 + 1, 10) * 5 = 55
  const auto ctx = ctx_of(56.0, 10.0, 10.0);
  CHECK(classify_state(10.0, 11.0, ctx, 1.0, -2.0) == DrivingState::Free);
}

TEST_CASE("inside the horizon but outside the danger zone is following") {
  const auto ctx = ctx_of(30.0, 10.0, 10.0);
  CHECK(classify_state(10.0, 11.0, ctx, 1.0, -2.0) == DrivingState::Following);
}

TEST_CASE("closing fast on a slow leader is an emergency") {
  // d_emerg = 15*1 + (225 - 25) / 4 = 65 > 20
  const auto ctx = ctx_of(20.0, 15.0, 5.0);
  CHECK(classify_state(15.0, 16.0, ctx, 1.0, -2.0) == DrivingState::Emergency);
}

TEST_CASE("classification boundaries are inclusive toward caution") {
  // At v = v_lead = 10, a_n = -2: d_emerg = 10, d_follow = 55.
  CHECK(classify_state(10.0, 11.0, ctx_of(10.0, 10.0, 10.0), 1.0, -2.0) ==
        DrivingState::Emergency);
  CHECK(classify_state(10.0, 11.0, ctx_of(10.0 + 1e-6, 10.0, 10.0), 1.0,
                       -2.0) == DrivingState::Following);
  CHECK(classify_state(10.0, 11.0, ctx_of(55.0, 10.0, 10.0), 1.0, -2.0) ==
        DrivingState::Following);
  CHECK(classify_state(10.0, 11.0, ctx_of(55.0 + 1e-6, 10.0, 10.0), 1.0,
                       -2.0) == DrivingState::Free);
}

TEST_CASE("slow traffic keeps the minimum following horizon") {
  // v = 0.5: pre-factor distance max(0.5 + 1, 10) = 10, horizon 50.
  CHECK(classify_state(0.5, 11.0, ctx_of(49.0, 0.5, 0.5), 1.0, -2.0) ==
        DrivingState::Following);
  CHECK(classify_state(0.5, 11.0, ctx_of(51.0, 0.5, 0.5), 1.0, -2.0) ==
        DrivingState::Free);
}

TEST_CASE("emergency distance never drops below the standstill buffer") {
  // Stopped behind a mover: braking terms go negative, floor holds at 1 m.
  CHECK(classify_state(0.0, 11.0, ctx_of(0.99, 0.0, 8.0), 1.0, -2.0) ==
        DrivingState::Emergency);
  CHECK(classify_state(0.0, 11.0, ctx_of(1.01, 0.0, 8.0), 1.0, -2.0) ==
        DrivingState::Following);
}

TEST_CASE("free acceleration is bang-bang around the desired speed") {
  CHECK(free_acceleration(8.0, 11.0, 2.5, -3.0) == 2.5);
  CHECK(free_acceleration(12.0, 11.0, 2.5, -3.0) == -3.0);
  CHECK(free_acceleration(11.0, 11.0, 2.5, -3.0) == 0.0);
  CHECK(free_acceleration(11.0 + 1e-10, 11.0, 2.5, -3.0) == 0.0);
}

TEST_CASE("time to desired speed under the free law") {
  CHECK(time_to_desired(5.0, 11.0, 2.0, -3.0) == doctest::Approx(3.0));
  CHECK(time_to_desired(14.0, 11.0, 2.0, -3.0) == doctest::Approx(1.0));
  CHECK(time_to_desired(11.0, 11.0, 2.0, -3.0) == doctest::Approx(0.0));
}

TEST_CASE("stimulus response accelerates toward a faster leader") {
  // r+ = 1.2, s+ = 0, t+ = 1: a = 1.2 * (9 - 8) / 12 = 0.1
  GhrParams p;
  CHECK(ghr_acceleration(8.0, ctx_of(12.0, 8.0, 9.0), p) ==
        doctest::Approx(0.1));
}

TEST_CASE("stimulus response brakes toward a slower leader") {
  // r- = 1.6, s- = 0, t- = 1: a = 1.6 * (9 - 12) / 10 = -0.48
  GhrParams p;
  CHECK(ghr_acceleration(12.0, ctx_of(10.0, 12.0, 9.0), p) ==
        doctest::Approx(-0.48));
}

TEST_CASE("matched speeds produce no stimulus") {
  GhrParams p;
  CHECK(ghr_acceleration(10.0, ctx_of(25.0, 10.0, 10.0), p) == 0.0);
}

TEST_CASE("response carries the sign of the speed difference") {
  GhrParams p;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = 15.0 * U(rng);
    const double vl = 15.0 * U(rng);
    const double gap = 0.5 + 60.0 * U(rng);
    const double a = ghr_acceleration(v, ctx_of(gap, v, vl), p);
    if (vl > v)
      CHECK(a > 0.0);
    else if (vl < v)
      CHECK(a < 0.0);
    else
      CHECK(a == 0.0);
  }
}

TEST_CASE("speed exponents scale the stimulus") {
  GhrParams p;
  p.s_plus = 1.0;
  p.t_plus = 2.0;
  // a = 1.2 * 4^1 / 4^2 * (6 - 4) = 0.6
  CHECK(ghr_acceleration(4.0, ctx_of(4.0, 4.0, 6.0), p) ==
        doctest::Approx(0.6));
}

TEST_CASE("ghr parameter validation") {
  GhrParams p;
  CHECK_NOTHROW(p.validate());
  p.r_plus = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("emergency braking against a slower leader") {
  // min{-2, -1 - (10-6)^2 / (2*4)} = min{-2, -3} = -3
  CHECK(emergency_deceleration(10.0, ctx_of(4.0, 10.0, 6.0, -1.0), -2.0) ==
        doctest::Approx(-3.0));
}

TEST_CASE("emergency braking when the leader is not slower") {
  // min{a_n, a_lead + 0.25 a_n}
  CHECK(emergency_deceleration(5.0, ctx_of(2.0, 5.0, 6.0, 1.0), -2.0) ==
        doctest::Approx(-2.0));
  CHECK(emergency_deceleration(5.0, ctx_of(2.0, 5.0, 6.0, -3.0), -2.0) ==
        doctest::Approx(-3.5));
}

TEST_CASE("emergency output is never weaker than normal braking") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = 15.0 * U(rng);
    const double vl = 15.0 * U(rng);
    const double gap = 0.2 + 30.0 * U(rng);
    const double al = -6.0 + 9.0 * U(rng);
    const double a_n = -(1.0 + 3.0 * U(rng));
    CHECK(emergency_deceleration(v, ctx_of(gap, v, vl, al), a_n) <= a_n);
  }
}

TEST_CASE("following composes with the leader and clamps") {
  CHECK(compose_acceleration(0.1, 0.2, DrivingState::Following, -4.0, 2.5) ==
        doctest::Approx(0.2));
  CHECK(compose_acceleration(0.3, -1.0, DrivingState::Following, -4.0, 2.5) ==
        doctest::Approx(0.3));
  CHECK(compose_acceleration(5.0, 0.0, DrivingState::Following, -4.0, 2.5) ==
        doctest::Approx(2.5));
  CHECK(compose_acceleration(-9.0, -10.0, DrivingState::Following, -4.0,
                             2.5) == doctest::Approx(-4.0));
}

TEST_CASE("outside the following state the leader term is ignored") {
  // No max rule: a strong own command is kept (up to the clamp), a weak
  // one is not pulled toward the leader's.
  CHECK(compose_acceleration(-3.0, 3.0, DrivingState::Emergency, -4.0, 2.5) ==
        doctest::Approx(-3.0));
  CHECK(compose_acceleration(-9.0, 3.0, DrivingState::Emergency, -4.0, 2.5) ==
        doctest::Approx(-4.0));
  CHECK(compose_acceleration(1.0, -2.0, DrivingState::Free, -4.0, 2.5) ==
        doctest::Approx(1.0));
}

// Closed-loop spacing survival: a follower driven by the full state
// machine, integrated the same way the engine does it (speed capped by
// the gap observed before the simultaneous move), never touches a leader
// that accelerates, cruises and panic-brakes at random.
TEST_CASE("two-vehicle closed loop keeps a nonnegative gap") {
  const GhrParams ghr;
  const StateThresholds th;
  const double dt = 0.1;
  std::mt19937_64 rng(20240816);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  for (int trial = 0; trial < 100; ++trial) {
    const double a_n = -(1.5 + 2.0 * U(rng));
    const double a_e = 2.0 * a_n;
    const double a_max = 1.0 + 2.5 * U(rng);
    const double vd = 6.0 + 8.0 * U(rng);
    const double lead_len = 2.0 + 8.0 * U(rng);

    double xf = 0.0, vf = vd * U(rng);
    double xl = lead_len + 1.0 + 80.0 * U(rng), vl = 12.0 * U(rng);
    double al = 0.0, lead_a_prev = 0.0;
    bool follower_moved = false;

    for (int s = 0; s < 10000; ++s) {
      if (s % 200 == 0) {
        const double r = U(rng);
        al = r < 0.35 ? -(2.0 + 5.0 * U(rng))
                      : (r < 0.6 ? 1.5 * U(rng) : 0.0);
      }
      const double gap = xl - lead_len - xf;
      REQUIRE(gap >= 0.0);

      const LeaderContext ctx{gap, vl - vf, vl, lead_a_prev, lead_len};
      const DrivingState st = classify_state(vf, vd, ctx, 1.0, a_n, th);
      double a;
      if (st == DrivingState::Free) {
        a = free_acceleration(vf, vd, a_max, a_n);
      } else if (st == DrivingState::Following) {
        a = compose_acceleration(ghr_acceleration(vf, ctx, ghr), lead_a_prev,
                                 st, a_e, a_max);
      } else {
        a = gap <= 1e-9 && vf > vl ? -vf / dt
                                   : emergency_deceleration(vf, ctx, a_n);
      }

      double vf2 = std::max(0.0, vf + a * dt);
      vf2 = std::min(vf2, gap / dt); // the engine's hard distance budget
      lead_a_prev = al;
      vl = std::max(0.0, vl + al * dt);
      xl += vl * dt;
      vf = vf2;
      xf += vf * dt;
      follower_moved = follower_moved || vf > 0.1;
    }
    CHECK(follower_moved);
    CHECK(xl - lead_len - xf >= 0.0);
  }
}
