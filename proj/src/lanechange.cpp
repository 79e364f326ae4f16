#include "forksim/lanechange.hpp"

#include <limits>
#include <stdexcept>

namespace forksim {

const char* to_string(LaneAction a) {
  switch (a) {
  case LaneAction::Stay: return "stay";
  case LaneAction::MoveLeft: return "move_left";
  case LaneAction::MoveRight: return "move_right";
  }
  return "?";
}

const char* to_string(LaneChangeReason r) {
  switch (r) {
  case LaneChangeReason::None: return "none";
  case LaneChangeReason::RouteRequired: return "route_required";
  case LaneChangeReason::SpeedGain: return "speed_gain";
  }
  return "?";
}

namespace {

bool gap_test(const VehicleAgent& agent, const LaneView& lane,
              const GapAcceptance& cfg) {
  if (lane.leader) {
    if (lane.leader->delta_x < agent.kin.v * cfg.lead_headway_s)
      return false;
  }
  if (lane.lag_gap) {
    if (*lane.lag_gap < lane.lag_v * cfg.lag_headway_s + cfg.lag_buffer_m)
      return false;
  }
  return true;
}

double lead_speed(const LaneView& lane) {
  return lane.leader ? lane.leader->leader_v
                     : std::numeric_limits<double>::infinity();
}

double lead_room(const LaneView& lane) {
  return lane.leader ? lane.leader->delta_x
                     : std::numeric_limits<double>::infinity();
}

} // namespace

LaneChangeDecision evaluate_lane_change(const VehicleAgent& agent,
                                        const LaneNeighborhood& n,
                                        const GapAcceptance& cfg) {
  if (!n.left.exists && !n.right.exists)
    return {LaneAction::Stay, LaneChangeReason::None};

  // Mandatory: current lane does not reach the next link.
  if (!n.current.connects) {
    const bool l_ok =
        n.left.exists && n.left.connects && gap_test(agent, n.left, cfg);
    const bool r_ok =
        n.right.exists && n.right.connects && gap_test(agent, n.right, cfg);
    if (l_ok && r_ok) {
      // Both sides work; take the roomier one, left on a tie.
      if (lead_room(n.right) > lead_room(n.left))
        return {LaneAction::MoveRight, LaneChangeReason::RouteRequired};
      return {LaneAction::MoveLeft, LaneChangeReason::RouteRequired};
    }
    if (l_ok)
      return {LaneAction::MoveLeft, LaneChangeReason::RouteRequired};
    if (r_ok)
      return {LaneAction::MoveRight, LaneChangeReason::RouteRequired};
    return {LaneAction::Stay, LaneChangeReason::None};
  }

  // Discretionary: only worthwhile when a leader is actually holding the
  // agent back, and only into lanes that keep the route reachable.
  if (!n.current.leader)
    return {LaneAction::Stay, LaneChangeReason::None};
  const double cur_v = n.current.leader->leader_v;

  double best_gain = cfg.speed_gain_mps;
  LaneAction best = LaneAction::Stay;
  double best_room = -1.0;
  const struct {
    const LaneView* view;
    LaneAction act;
  } sides[2] = {{&n.left, LaneAction::MoveLeft},
                {&n.right, LaneAction::MoveRight}};
  for (const auto& s : sides) {
    if (!s.view->exists || !s.view->connects)
      continue;
    const double gain = lead_speed(*s.view) - cur_v;
    if (gain < cfg.speed_gain_mps)
      continue;
    if (!gap_test(agent, *s.view, cfg))
      continue;
    const double room = lead_room(*s.view);
    if (gain > best_gain || (gain == best_gain && room > best_room)) {
      best_gain = gain;
      best = s.act;
      best_room = room;
    }
  }
  if (best != LaneAction::Stay)
    return {best, LaneChangeReason::SpeedGain};
  return {LaneAction::Stay, LaneChangeReason::None};
}

VehicleAgent execute_lane_change(const VehicleAgent& agent,
                                 const LaneChangeDecision& decision,
                                 const LaneView& target) {
  if (decision.action == LaneAction::Stay)
    throw std::logic_error("execute_lane_change: Stay is not executable");

  // Safety override: an overlap on either side voids the move.
  if (target.leader && target.leader->delta_x < 0.0)
    return agent;
  if (target.lag_gap && *target.lag_gap < 0.0)
    return agent;

  VehicleAgent out = agent;
  out.kin.lane += decision.action == LaneAction::MoveLeft ? 1 : -1;
  return out;
}

} // namespace forksim
