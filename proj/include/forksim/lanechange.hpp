#pragma once

#include <optional>

#include "forksim/core.hpp"

namespace forksim {

enum class LaneAction : uint8_t { Stay, MoveLeft, MoveRight };
enum class LaneChangeReason : uint8_t { None, RouteRequired, SpeedGain };

struct LaneChangeDecision {
  LaneAction action = LaneAction::Stay;
  LaneChangeReason reason = LaneChangeReason::None;
};

const char* to_string(LaneAction a);
const char* to_string(LaneChangeReason r);

/// Acceptance constants for moving into a gap, and the discretionary
/// speed-gain trigger. All configurable; these are the defaults.
struct GapAcceptance {
  double lead_headway_s = 1.0;
  double lag_headway_s = 1.0;
  double lag_buffer_m = 2.0;
  double speed_gain_mps = 1.0;

  bool operator==(const GapAcceptance&) const = default;
};

/// What one candidate lane looks like from the agent's position. Gaps are
/// effective gaps (bumper to bumper). A missing leader/lag means the lane
/// is clear in that direction.
struct LaneView {
  bool exists = false;
  bool connects = false; // lane continues toward the agent's next link
  std::optional<LeaderContext> leader;
  std::optional<double> lag_gap;
  double lag_v = 0.0;
};

/// Neighborhood snapshot the engine assembles per agent before deciding.
/// Lane index grows leftward, so MoveLeft targets `left` (index + 1).
struct LaneNeighborhood {
  LaneView current;
  LaneView left;
  LaneView right;
};

/// Mandatory (route connectivity) changes first, then discretionary
/// speed-gain changes; both subject to the gap-acceptance test. Returns
/// Stay when nothing passes.
LaneChangeDecision evaluate_lane_change(const VehicleAgent& agent,
                                        const LaneNeighborhood& n,
                                        const GapAcceptance& cfg = {});

/// Applies a non-Stay decision: lane id shifts by one, x is preserved.
/// If the target slot would overlap (either effective gap negative), the
/// decision is voided and the agent is returned unchanged.
VehicleAgent execute_lane_change(const VehicleAgent& agent,
                                 const LaneChangeDecision& decision,
                                 const LaneView& target);

} // namespace forksim
