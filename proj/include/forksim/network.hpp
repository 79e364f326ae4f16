#pragma once

#include <string>
#include <vector>

#include "forksim/core.hpp"

namespace forksim {

/// Infrastructure variants: the present layout plus three widening
/// overlays. Only lane counts differ; lengths and topology are shared.
enum class Variant : uint8_t { ID0, ID1, ID2, ID3 };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s); // throws on unknown

enum class LinkKind : uint8_t { Approach, Exit, RoundaboutArc };

using NodeId = int;
using LinkId = int;

// Boundary nodes (vehicle sources/sinks) and the three circle nodes where
// the legs meet the circulating lane.
enum : NodeId {
  kNodePnrIn,
  kNodePnrOut,
  kNodeDostIn,
  kNodeDostOut,
  kNodePnccIn,
  kNodePnccOut,
  kNodeWsw, // circle node on the PNR side
  kNodeEne, // circle node on the DOST side
  kNodeNne, // circle node on the PNCC/ESR side
};

struct Lane {
  int index = 0; // 0 = rightmost
  double width_m = 3.5;
};

struct Link {
  LinkId id = -1;
  std::string name;
  NodeId from = -1;
  NodeId to = -1;
  double length_m = 0.0;
  std::vector<Lane> lanes;
  double legal_speed_mps = 40.0 / 3.6;
  LinkKind kind = LinkKind::Approach;

  int lane_count() const { return static_cast<int>(lanes.size()); }
};

struct Route {
  int id = 0; // 1..6
  std::vector<LinkId> links;
  NodeId entry = -1;
  NodeId exit = -1;
};

struct RoadNetwork {
  Variant variant = Variant::ID0;
  std::vector<Link> links;
  std::vector<Route> routes;
  double zone_tail_m = 50.0; // final stretch of each approach in the zone

  const Link& link(LinkId id) const { return links.at(size_t(id)); }
  const Route& route(int route_id) const; // throws on unknown id
  bool is_arc(LinkId id) const {
    return link(id).kind == LinkKind::RoundaboutArc;
  }
  /// Measurement zone membership for a position on a link: every arc,
  /// plus the last zone_tail_m meters of each approach.
  bool in_zone(LinkId id, double x) const;
  /// Total circulating length (sum of the arcs).
  double circle_length() const;
};

/// Builds the fork-and-circle network for a variant. The circulating
/// roadway is one lane split into three arcs at the leg nodes; approach
/// and exit legs are two lanes except where a variant widens them to
/// three. Leg lengths follow the distances from the three landmarks.
RoadNetwork build_br_network(Variant v, double legal_speed_mps = 40.0 / 3.6,
                             double zone_tail_m = 50.0);

/// Ordered link ids of one route (1..6). Throws on unknown id.
const std::vector<LinkId>& route_links(const RoadNetwork& net, int route_id);

enum class EntryDecision : uint8_t { Proceed, Yield };

/// One circulating vehicle as seen from an entry node: its distance along
/// the circle to the conflict point (>= 0, measured in travel direction)
/// and its current speed.
struct CirculatingVehicle {
  double dist_to_conflict_m = 0.0;
  double v = 0.0;
};

/// Gap acceptance at the circle: an entering vehicle waits whenever any
/// circulating vehicle would reach the conflict node within critical_gap_s
/// at its current speed. Stationary circulating vehicles block only
/// through the insertion gap check, not through this time test.
EntryDecision roundabout_entry_check(
    const std::vector<CirculatingVehicle>& circulating,
    double critical_gap_s = 3.0);

} // namespace forksim
