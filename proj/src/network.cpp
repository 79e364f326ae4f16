#include "forksim/network.hpp"

#include <cmath>
#include <stdexcept>

namespace forksim {

const char* to_string(Variant v) {
  switch (v) {
  case Variant::ID0: return "ID0";
  case Variant::ID1: return "ID1";
  case Variant::ID2: return "ID2";
  case Variant::ID3: return "ID3";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "ID0") return Variant::ID0;
  if (s == "ID1") return Variant::ID1;
  if (s == "ID2") return Variant::ID2;
  if (s == "ID3") return Variant::ID3;
  throw std::invalid_argument("unknown infrastructure variant: " + s);
}

const Route& RoadNetwork::route(int route_id) const {
  for (const auto& r : routes)
    if (r.id == route_id)
      return r;
  throw std::out_of_range("unknown route id: " + std::to_string(route_id));
}

bool RoadNetwork::in_zone(LinkId id, double x) const {
  const Link& l = link(id);
  switch (l.kind) {
  case LinkKind::RoundaboutArc:
    return true;
  case LinkKind::Approach:
    return x >= l.length_m - zone_tail_m;
  case LinkKind::Exit:
    return false;
  }
  return false;
}

double RoadNetwork::circle_length() const {
  double sum = 0.0;
  for (const auto& l : links)
    if (l.kind == LinkKind::RoundaboutArc)
      sum += l.length_m;
  return sum;
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInscribedDiameterM = 34.0;

// Leg lengths from the three landmark distances.
constexpr double kPnrLegM = 106.0;
constexpr double kDostLegM = 100.0;
constexpr double kEsrLegM = 150.0;

std::vector<Lane> make_lanes(int n) {
  std::vector<Lane> lanes(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    lanes[static_cast<size_t>(i)] = Lane{i, 3.5};
  return lanes;
}

} // namespace

RoadNetwork build_br_network(Variant v, double legal_speed_mps,
                             double zone_tail_m) {
  RoadNetwork net;
  net.variant = v;
  net.zone_tail_m = zone_tail_m;

  // Circle nodes sit at the bearings of the three legs; circulation is
  // counterclockwise (right-hand traffic). Arc lengths follow from the
  // angular separations on the inscribed circle:
  //   wsw -> ene : 180 deg, ene -> nne : 45 deg, nne -> wsw : 135 deg.
  const double r = kInscribedDiameterM / 2.0;
  const double arc_a = kPi * r;              // wsw -> ene
  const double arc_b = kPi / 4.0 * r;        // ene -> nne
  const double arc_c = 3.0 * kPi / 4.0 * r;  // nne -> wsw

  auto add = [&](const std::string& name, NodeId from, NodeId to, double len,
                 int lanes, LinkKind kind) {
    Link l;
    l.id = static_cast<LinkId>(net.links.size());
    l.name = name;
    l.from = from;
    l.to = to;
    l.length_m = len;
    l.lanes = make_lanes(lanes);
    l.legal_speed_mps = legal_speed_mps;
    l.kind = kind;
    const LinkId id = l.id;
    net.links.push_back(std::move(l));
    return id;
  };

  int pnr_app_lanes = 2, dost_app_lanes = 2, esr_app_lanes = 2;
  int pnr_exit_lanes = 2, dost_exit_lanes = 2, esr_exit_lanes = 2;
  switch (v) {
  case Variant::ID0:
    break;
  case Variant::ID1: // widen both east-west approaches, toward the circle only
    pnr_app_lanes = 3;
    dost_app_lanes = 3;
    break;
  case Variant::ID2: // widen the eastbound side through the circle
    pnr_app_lanes = 3;
    dost_exit_lanes = 3;
    break;
  case Variant::ID3: // widen the southbound approach through to the west leg
    esr_app_lanes = 3;
    pnr_exit_lanes = 3;
    break;
  }

  const LinkId pnr_app =
      add("pnr_to_br", kNodePnrIn, kNodeWsw, kPnrLegM, pnr_app_lanes,
          LinkKind::Approach);
  const LinkId pnr_exit =
      add("br_to_pnr", kNodeWsw, kNodePnrOut, kPnrLegM, pnr_exit_lanes,
          LinkKind::Exit);
  const LinkId dost_app =
      add("dost_to_br", kNodeDostIn, kNodeEne, kDostLegM, dost_app_lanes,
          LinkKind::Approach);
  const LinkId dost_exit =
      add("br_to_dost", kNodeEne, kNodeDostOut, kDostLegM, dost_exit_lanes,
          LinkKind::Exit);
  const LinkId esr_app =
      add("esr_to_br", kNodePnccIn, kNodeNne, kEsrLegM, esr_app_lanes,
          LinkKind::Approach);
  const LinkId esr_exit =
      add("br_to_esr", kNodeNne, kNodePnccOut, kEsrLegM, esr_exit_lanes,
          LinkKind::Exit);
  const LinkId a = add("arc_wsw_ene", kNodeWsw, kNodeEne, arc_a, 1,
                       LinkKind::RoundaboutArc);
  const LinkId b = add("arc_ene_nne", kNodeEne, kNodeNne, arc_b, 1,
                       LinkKind::RoundaboutArc);
  const LinkId c = add("arc_nne_wsw", kNodeNne, kNodeWsw, arc_c, 1,
                       LinkKind::RoundaboutArc);

  net.routes = {
      {1, {pnr_app, a, dost_exit}, kNodePnrIn, kNodeDostOut},
      {2, {pnr_app, a, b, esr_exit}, kNodePnrIn, kNodePnccOut},
      {3, {dost_app, b, c, pnr_exit}, kNodeDostIn, kNodePnrOut},
      {4, {dost_app, b, esr_exit}, kNodeDostIn, kNodePnccOut},
      {5, {esr_app, c, pnr_exit}, kNodePnccIn, kNodePnrOut},
      {6, {esr_app, c, a, dost_exit}, kNodePnccIn, kNodeDostOut},
  };
  return net;
}

const std::vector<LinkId>& route_links(const RoadNetwork& net, int route_id) {
  return net.route(route_id).links;
}

EntryDecision roundabout_entry_check(
    const std::vector<CirculatingVehicle>& circulating,
    double critical_gap_s) {
  for (const auto& c : circulating) {
    if (c.v <= 0.0)
      continue;
    if (c.dist_to_conflict_m / c.v <= critical_gap_s)
      return EntryDecision::Yield;
  }
  return EntryDecision::Proceed;
}

} // namespace forksim
