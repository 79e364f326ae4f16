#include "forksim/carfollow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forksim {

void GhrParams::validate() const {
  if (!(r_plus > 0.0) || !(r_minus > 0.0))
    throw std::invalid_argument("ghr: sensitivity factors must be positive");
  if (s_plus < 0.0 || s_minus < 0.0)
    throw std::invalid_argument("ghr: speed exponents must be >= 0");
  if (t_plus < 0.0 || t_minus < 0.0)
    throw std::invalid_argument("ghr: spacing exponents must be >= 0");
}

DrivingState classify_state(double v, double /*v_desired*/,
                            const std::optional<LeaderContext>& leader,
                            double reaction_time, double a_normal,
                            const StateThresholds& th) {
  if (!leader)
    return DrivingState::Free;

  const double dx = leader->delta_x;
  const double abs_an = std::abs(a_normal);

  const double horizon =
      std::max(v * reaction_time + th.stop_buffer_m, th.min_follow_m) *
      th.horizon_factor;
  if (dx > horizon)
    return DrivingState::Free;

  // Braking-distance difference, floored: even against a faster leader a
  // minimal buffer is kept.
  double d_emerg = v * reaction_time + v * v / (2.0 * abs_an) -
                   leader->leader_v * leader->leader_v / (2.0 * abs_an);
  d_emerg = std::max(d_emerg, th.stop_buffer_m);
  if (dx <= d_emerg)
    return DrivingState::Emergency;

  return DrivingState::Following;
}

double free_acceleration(double v, double v_desired, double a_max,
                         double a_normal) {
  constexpr double kBand = 1e-9;
  if (v < v_desired - kBand)
    return a_max;
  if (v > v_desired + kBand)
    return a_normal;
  return 0.0;
}

double time_to_desired(double v, double v_desired, double a_max,
                       double a_normal) {
  const double dv = v_desired - v;
  if (std::abs(dv) <= 1e-9)
    return 0.0;
  const double rate = dv > 0.0 ? a_max : a_normal;
  return dv / rate;
}

double ghr_acceleration(double v_i, const LeaderContext& ctx,
                        const GhrParams& p) {
  if (!(ctx.delta_x > 0.0))
    throw std::domain_error("ghr: nonpositive gap");
  const bool closing = v_i > ctx.leader_v;
  const double r = closing ? p.r_minus : p.r_plus;
  const double s = closing ? p.s_minus : p.s_plus;
  const double t = closing ? p.t_minus : p.t_plus;
  const double num = r * std::pow(v_i, s);
  return num / std::pow(ctx.delta_x, t) * (ctx.leader_v - v_i);
}

double emergency_deceleration(double v_i, const LeaderContext& ctx,
                              double a_normal) {
  if (v_i > ctx.leader_v) {
    if (!(ctx.delta_x > 0.0))
      throw std::domain_error("emergency law: nonpositive gap");
    const double dv = v_i - ctx.leader_v;
    return std::min(a_normal, ctx.leader_a - 0.5 * dv * dv / ctx.delta_x);
  }
  return std::min(a_normal, ctx.leader_a + 0.25 * a_normal);
}

double compose_acceleration(double own_a, double leader_a, DrivingState state,
                            double a_floor, double a_ceil) {
  double a = own_a;
  if (state == DrivingState::Following)
    a = std::max(own_a, leader_a);
  return std::clamp(a, a_floor, a_ceil);
}

} // namespace forksim
