#pragma once

#include <optional>

#include "forksim/core.hpp"

namespace forksim {

/// Parameters of the asymmetric stimulus-response following law.
/// The plus set applies while closing is not happening (v_i <= v_lead),
/// the minus set while the follower is faster than its leader.
struct GhrParams {
  double r_plus = 1.2;
  double s_plus = 0.0;
  double t_plus = 1.0;
  double r_minus = 1.6;
  double s_minus = 0.0;
  double t_minus = 1.0;

  void validate() const; // throws std::invalid_argument
  bool operator==(const GhrParams&) const = default;
};

/// Distance thresholds used to classify the driving state. Not part of
/// the following law itself; exposed in scenario configuration.
struct StateThresholds {
  double horizon_factor = 5.0; // following horizon multiplier H
  double min_follow_m = 10.0;  // floor of the pre-factor horizon distance
  double stop_buffer_m = 1.0;  // standstill buffer, also floors d_emerg

  bool operator==(const StateThresholds&) const = default;
};

/// Free / Following / Emergency decision for one agent against its
/// (optional) leader. With no leader, or a leader beyond the following
/// horizon, the agent drives free.
///
/// d_follow = max(v*T + stop_buffer, min_follow) * horizon_factor
/// d_emerg  = max(stop_buffer, v*T + v^2/(2|a_n|) - v_lead^2/(2|a_n|))
DrivingState classify_state(double v, double v_desired,
                            const std::optional<LeaderContext>& leader,
                            double reaction_time, double a_normal,
                            const StateThresholds& th = {});

/// Bang-bang regulation toward the desired speed: a_max below it,
/// a_normal above it, zero at it (1e-9 band). Deliberately discontinuous.
double free_acceleration(double v, double v_desired, double a_max,
                         double a_normal);

/// Time to reach the desired speed under free driving,
/// |v_desired - v| / (rate toward it).
double time_to_desired(double v, double v_desired, double a_max,
                       double a_normal);

/// a = r * v_i^s / delta_x^t * (v_lead - v_i), with the plus parameter set
/// when v_i <= v_lead and the minus set otherwise. delta_x must be > 0;
/// routing too-small gaps to the emergency law is the caller's job.
double ghr_acceleration(double v_i, const LeaderContext& ctx,
                        const GhrParams& p);

/// Collision-preventing deceleration:
///   v_i >  v_lead: min{ a_normal, a_lead - (v_i - v_lead)^2 / (2 delta_x) }
///   v_i <= v_lead: min{ a_normal, a_lead + 0.25 a_normal }
/// Signed-negative convention: min selects the stronger braking.
double emergency_deceleration(double v_i, const LeaderContext& ctx,
                              double a_normal);

/// max{own, leader_prev} clamped to [a_floor, a_ceil]. Only meaningful in
/// the Following state; emergency values are applied raw.
double compose_acceleration(double own_a, double leader_a, DrivingState state,
                            double a_floor, double a_ceil);

} // namespace forksim
