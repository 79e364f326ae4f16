#include "forksim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "forksim/carfollow.hpp"

namespace forksim {

uint64_t replication_seed(uint64_t base_seed, int rep_index) {
  return mix_seed(base_seed, static_cast<uint64_t>(rep_index));
}

namespace {
// Cross-lane boundary straddles are merge-zone geometry, not same-lane
// overlaps; the scan floors such gaps at a small positive value and lets
// the emergency law hold the follower.
constexpr double kStraddleFloor = 0.01;
constexpr double kLaneChangeCooldownS = 5.0;
constexpr double kLaneChangeEndSuppressM = 20.0;
constexpr double kScanHorizonM = 200.0;
} // namespace

World::World(const Scenario& sc, const RoadNetwork& net, uint64_t seed)
    : sc_(sc), net_(net), seed_(seed) {
  clock_.t = 0.0;
  clock_.dt = sc_.dt_s;

  occ_.resize(net_.links.size());
  for (size_t l = 0; l < net_.links.size(); ++l)
    occ_[l].resize(size_t(net_.links[l].lane_count()));

  entry_queue_.resize(net_.links.size());
  entry_queue_head_.assign(net_.links.size(), 0);
  entry_cache_.assign(16, EntryDecision::Proceed);

  // Arcs in circulation order, starting from the PNR-side node.
  std::vector<LinkId> arcs;
  for (const auto& l : net_.links)
    if (l.kind == LinkKind::RoundaboutArc)
      arcs.push_back(l.id);
  if (!arcs.empty()) {
    LinkId cur = -1;
    for (LinkId a : arcs)
      if (net_.link(a).from == kNodeWsw)
        cur = a;
    if (cur < 0)
      cur = arcs.front();
    while (arc_cycle_.size() < arcs.size()) {
      arc_cycle_.push_back(cur);
      const NodeId to = net_.link(cur).to;
      for (LinkId a : arcs)
        if (net_.link(a).from == to) {
          cur = a;
          break;
        }
    }
  }

  Rng rng(seed_);
  schedule_ =
      arrival_schedule(sc_.demand, sc_.warmup_s + sc_.duration_s,
                       sc_.volume_multiplier, sc_.classes,
                       sc_.legal_speed_mps, rng);
}

size_t World::queued_count() const {
  size_t n = 0;
  for (size_t l = 0; l < entry_queue_.size(); ++l)
    n += entry_queue_[l].size() - entry_queue_head_[l];
  return n;
}

World::LinkStats World::link_stats(LinkId id) const {
  LinkStats s;
  for (const LaneVec& lv : occ_[size_t(id)])
    for (uint32_t slot : lv) {
      s.mean_v += agents_[slot].pub.kin.v;
      ++s.count;
    }
  if (s.count > 0)
    s.mean_v /= double(s.count);
  return s;
}

size_t World::incomplete_zone_entrants(double since) const {
  size_t n = 0;
  for (const auto& a : agents_)
    if (a.zone_entered && !a.completed && a.zone_entry_t >= since)
      ++n;
  return n;
}

void World::step() {
  phase_decisions();
  phase_apply();
  ++step_index_;
  clock_.t = static_cast<double>(step_index_) * clock_.dt;

  if (injected_ != active_ + exited_)
    throw std::logic_error("vehicle conservation violated");
#ifdef NDEBUG
  if (step_index_ % 100 == 0)
    check_overlaps();
#else
  check_overlaps();
#endif
}

void World::run_until(double t_end) {
  while (clock_.t + 1e-9 < t_end)
    step();
  check_overlaps();
}

void World::phase_decisions() {
  entry_cache_[kNodeWsw] = entry_decision(kNodeWsw);
  entry_cache_[kNodeEne] = entry_decision(kNodeEne);
  entry_cache_[kNodeNne] = entry_decision(kNodeNne);

  const auto& th = sc_.thresholds;
  for (size_t slot = 0; slot < agents_.size(); ++slot) {
    AgentRec& a = agents_[slot];
    if (!a.alive)
      continue;
    const Link& L = net_.link(a.link);
    const auto& rl = net_.route(a.pub.route).links;
    const double v = a.pub.kin.v;
    const VehicleClass& cls = a.pub.cls;

    LeaderHit lh = find_leader(a);
    std::optional<LeaderContext> ctx;
    int leader_slot = -1;
    if (lh.found) {
      ctx = lh.ctx;
      leader_slot = lh.leader_slot;
    }

    // Yield at the circle: a stationary virtual wall just past the give-way
    // line, taken only when it is the nearer constraint.
    if (L.kind == LinkKind::Approach && a.route_pos + 1 < rl.size() &&
        net_.is_arc(rl[a.route_pos + 1]) &&
        entry_cache_[size_t(L.to)] == EntryDecision::Yield) {
      const double d_virt = (L.length_m + th.stop_buffer_m) - a.pub.kin.x;
      if (!ctx || d_virt < ctx->delta_x) {
        ctx = LeaderContext{d_virt, -v, 0.0, 0.0, 0.0};
        leader_slot = -1;
      }
    }

    const DrivingState st = classify_state(v, a.pub.v_desired, ctx,
                                           a.pub.reaction_time, cls.a_normal,
                                           th);
    double a_cmd = 0.0;
    switch (st) {
    case DrivingState::Free:
      a_cmd = free_acceleration(v, a.pub.v_desired, cls.a_max, cls.a_normal);
      break;
    case DrivingState::Following: {
      const double own = ghr_acceleration(v, *ctx, sc_.ghr);
      if (leader_slot >= 0)
        a_cmd = compose_acceleration(own, agents_[size_t(leader_slot)].pub.kin.a,
                                     st, cls.a_emergency, cls.a_max);
      else
        a_cmd = std::clamp(own, cls.a_emergency, cls.a_max);
      break;
    }
    case DrivingState::Emergency:
      if (ctx->delta_x <= 1e-9 && v > ctx->leader_v)
        a_cmd = -v / clock_.dt;
      else
        a_cmd = emergency_deceleration(v, *ctx, cls.a_normal);
      break;
    }
    a.pub.state = st;
    a.a_cmd = a_cmd;
    // Hard speed cap: never move past the leader's rear within one step.
    a.gap_cap = ctx ? std::max(0.0, ctx->delta_x) : -1.0;

    a.lc = {LaneAction::Stay, LaneChangeReason::None};
    if (L.lane_count() > 1 && L.kind != LinkKind::RoundaboutArc &&
        a.lc_cooldown == 0 &&
        (L.length_m - a.pub.kin.x) > kLaneChangeEndSuppressM)
      a.lc = evaluate_lane_change(a.pub, neighborhood(a), sc_.gap);
  }
}

void World::phase_apply() {
  apply_lane_changes();
  integrate();
  transfers();
  injections();
  zone_accounting();
}

World::LeaderHit World::find_leader(const AgentRec& a) const {
  LeaderHit hit;
  const Link& L = net_.link(a.link);
  const LaneVec& vec = occ_[size_t(a.link)][size_t(a.pub.kin.lane)];

  // Position in own lane: entries are sorted by front position.
  const double x = a.pub.kin.x;
  size_t idx = size_t(std::lower_bound(vec.begin(), vec.end(), x,
                                       [this](uint32_t s, double key) {
                                         return agents_[s].pub.kin.x < key;
                                       }) -
                      vec.begin());
  while (idx < vec.size() && vec[idx] != a.pub.id)
    ++idx; // identical positions cannot happen; this walks at most one tie

  if (idx + 1 < vec.size()) {
    const AgentRec& lead = agents_[vec[idx + 1]];
    const double gap = lead.pub.kin.x - lead.pub.cls.length_m - x;
    if (gap > kScanHorizonM)
      return hit;
    hit.found = true;
    hit.ctx = LeaderContext{gap, lead.pub.kin.v - a.pub.kin.v, lead.pub.kin.v,
                            lead.pub.kin.a, lead.pub.cls.length_m};
    hit.leader_slot = int(vec[idx + 1]);
    return hit;
  }

  // Nothing ahead on this lane: continue along the route.
  const auto& rl = net_.route(a.pub.route).links;
  double acc = L.length_m - x;
  for (size_t q = a.route_pos + 1; q < rl.size() && acc <= kScanHorizonM;
       ++q) {
    const Link& nl = net_.link(rl[q]);
    int best = -1;
    double bx = std::numeric_limits<double>::infinity();
    for (const LaneVec& lv : occ_[size_t(rl[q])]) {
      if (lv.empty())
        continue;
      const AgentRec& r = agents_[lv.front()];
      if (r.pub.kin.x < bx) {
        bx = r.pub.kin.x;
        best = int(lv.front());
      }
    }
    if (best >= 0) {
      const AgentRec& lead = agents_[size_t(best)];
      double gap = acc + bx - lead.pub.cls.length_m;
      if (gap < kStraddleFloor)
        gap = kStraddleFloor;
      if (gap > kScanHorizonM)
        return hit;
      hit.found = true;
      hit.ctx = LeaderContext{gap, lead.pub.kin.v - a.pub.kin.v,
                              lead.pub.kin.v, lead.pub.kin.a,
                              lead.pub.cls.length_m};
      hit.leader_slot = best;
      return hit;
    }
    acc += nl.length_m;
  }
  return hit;
}

double World::circulating_distance_to(NodeId node,
                                      const AgentRec& arc_agent) const {
  double d = net_.link(arc_agent.link).length_m - arc_agent.pub.kin.x;
  LinkId cur = arc_agent.link;
  for (size_t guard = 0; guard < arc_cycle_.size() + 1; ++guard) {
    if (net_.link(cur).to == node)
      return d;
    const auto it = std::find(arc_cycle_.begin(), arc_cycle_.end(), cur);
    const size_t i = size_t(it - arc_cycle_.begin());
    cur = arc_cycle_[(i + 1) % arc_cycle_.size()];
    d += net_.link(cur).length_m;
  }
  return d;
}

bool World::crosses_node(const AgentRec& arc_agent, NodeId node) const {
  // A circulating vehicle conflicts with an entry only if its remaining
  // route traverses the arc leaving that node; one exiting there diverges
  // before the entry throat.
  const auto& rl = net_.route(arc_agent.pub.route).links;
  for (size_t q = arc_agent.route_pos + 1; q < rl.size(); ++q)
    if (net_.is_arc(rl[q]) && net_.link(rl[q]).from == node)
      return true;
  return false;
}

EntryDecision World::entry_decision(NodeId node) const {
  std::vector<CirculatingVehicle> circ;
  for (LinkId arc : arc_cycle_)
    for (const LaneVec& lv : occ_[size_t(arc)])
      for (uint32_t slot : lv) {
        const AgentRec& a = agents_[slot];
        if (!crosses_node(a, node))
          continue;
        circ.push_back({circulating_distance_to(node, a), a.pub.kin.v});
      }
  return roundabout_entry_check(circ, sc_.critical_gap_s);
}

LaneNeighborhood World::neighborhood(const AgentRec& a) const {
  LaneNeighborhood n;
  const Link& L = net_.link(a.link);
  const double x = a.pub.kin.x;
  const double my_len = a.pub.cls.length_m;

  auto view = [&](int lane, bool is_current) {
    LaneView v;
    if (lane < 0 || lane >= L.lane_count())
      return v;
    v.exists = true;
    v.connects = true; // every lane reaches the next link on this network
    const LaneVec& vec = occ_[size_t(a.link)][size_t(lane)];
    size_t i = size_t(std::upper_bound(vec.begin(), vec.end(), x,
                                       [this](double key, uint32_t s) {
                                         return key < agents_[s].pub.kin.x;
                                       }) -
                      vec.begin());
    if (is_current) {
      // skip self (same position)
      while (i < vec.size() && vec[i] == a.pub.id)
        ++i;
    }
    if (i < vec.size()) {
      const AgentRec& lead = agents_[vec[i]];
      v.leader = LeaderContext{lead.pub.kin.x - lead.pub.cls.length_m - x,
                               lead.pub.kin.v - a.pub.kin.v, lead.pub.kin.v,
                               lead.pub.kin.a, lead.pub.cls.length_m};
    }
    if (!is_current && i > 0) {
      const AgentRec& lag = agents_[vec[i - 1]];
      v.lag_gap = (x - my_len) - lag.pub.kin.x;
      v.lag_v = lag.pub.kin.v;
    }
    return v;
  };

  n.current = view(a.pub.kin.lane, true);
  n.left = view(a.pub.kin.lane + 1, false);
  n.right = view(a.pub.kin.lane - 1, false);
  return n;
}

void World::apply_lane_changes() {
  for (size_t slot = 0; slot < agents_.size(); ++slot) {
    AgentRec& a = agents_[slot];
    if (!a.alive || a.lc.action == LaneAction::Stay)
      continue;
    const int target =
        a.pub.kin.lane + (a.lc.action == LaneAction::MoveLeft ? 1 : -1);
    const Link& L = net_.link(a.link);
    if (target < 0 || target >= L.lane_count())
      continue;
    // Re-derive the target view against current occupancy; earlier changes
    // this phase may have filled the slot.
    LaneNeighborhood n = neighborhood(a);
    const LaneView& tv =
        a.lc.action == LaneAction::MoveLeft ? n.left : n.right;
    if (!gap_ok(a, tv))
      continue;
    const VehicleAgent updated = execute_lane_change(a.pub, a.lc, tv);
    if (updated.kin.lane == a.pub.kin.lane)
      continue;
    remove_from_lane(uint32_t(slot));
    a.pub.kin.lane = updated.kin.lane;
    insert_into_lane(uint32_t(slot), a.link, a.pub.kin.lane);
    a.lc_cooldown = int(kLaneChangeCooldownS / clock_.dt);
  }
}

bool World::gap_ok(const AgentRec& a, const LaneView& tv) const {
  if (!tv.exists)
    return false;
  if (tv.leader &&
      tv.leader->delta_x < a.pub.kin.v * sc_.gap.lead_headway_s)
    return false;
  if (tv.lag_gap &&
      *tv.lag_gap < tv.lag_v * sc_.gap.lag_headway_s + sc_.gap.lag_buffer_m)
    return false;
  return true;
}

void World::integrate() {
  const double dt = clock_.dt;
  for (auto& a : agents_) {
    if (!a.alive)
      continue;
    double v = std::max(0.0, a.pub.kin.v + a.a_cmd * dt);
    if (a.gap_cap >= 0.0)
      v = std::min(v, a.gap_cap / dt); // cannot cross the leader's rear
    a.pub.kin.v = v;
    a.pub.kin.x += v * dt;
    a.pub.kin.a = a.a_cmd;
    if (a.lc_cooldown > 0)
      --a.lc_cooldown;
  }
}

bool World::insertion_clear(LinkId link, int lane, double x_front,
                            double length, int* leader_slot,
                            int* follower_slot) const {
  const LaneVec& vec = occ_[size_t(link)][size_t(lane)];
  const size_t i = size_t(std::upper_bound(vec.begin(), vec.end(), x_front,
                                           [this](double key, uint32_t s) {
                                             return key < agents_[s].pub.kin.x;
                                           }) -
                          vec.begin());
  if (leader_slot)
    *leader_slot = -1;
  if (follower_slot)
    *follower_slot = -1;
  if (i < vec.size()) {
    const AgentRec& lead = agents_[vec[i]];
    if (lead.pub.kin.x - lead.pub.cls.length_m - x_front < 0.0)
      return false;
    if (leader_slot)
      *leader_slot = int(vec[i]);
  }
  if (i > 0) {
    const AgentRec& lag = agents_[vec[i - 1]];
    if (x_front - length - lag.pub.kin.x < 0.0)
      return false;
    if (follower_slot)
      *follower_slot = int(vec[i - 1]);
  }
  return true;
}

bool World::try_transfer(uint32_t slot) {
  AgentRec& a = agents_[slot];
  const Link& L = net_.link(a.link);
  const auto& rl = net_.route(a.pub.route).links;

  auto clamp_at_end = [&]() {
    a.pub.kin.x = L.length_m;
    a.pub.kin.v = 0.0;
    ++blocked_merges_;
  };

  const LinkId nid = rl[a.route_pos + 1];
  const Link& NL = net_.link(nid);
  const double x_new = a.pub.kin.x - L.length_m;

  // Entering the circle: re-test the time gap against the already-updated
  // circulating traffic, so circulating vehicles keep priority, and demand
  // a space gap so the merge never wedges into the stream.
  const bool merge =
      L.kind == LinkKind::Approach && NL.kind == LinkKind::RoundaboutArc;
  if (merge) {
    if (entry_decision(L.to) == EntryDecision::Yield) {
      clamp_at_end();
      return false;
    }
    const LaneVec& vec = occ_[size_t(nid)][0];
    const size_t i =
        size_t(std::upper_bound(vec.begin(), vec.end(), x_new,
                                [this](double key, uint32_t s) {
                                  return key < agents_[s].pub.kin.x;
                                }) -
               vec.begin());
    if (i < vec.size()) {
      const AgentRec& lead = agents_[vec[i]];
      if (lead.pub.kin.x - lead.pub.cls.length_m - x_new <
          sc_.thresholds.stop_buffer_m) {
        clamp_at_end();
        return false;
      }
    }
    if (i > 0) {
      // The time-gap test above already protects the circulating stream;
      // here only a physical clearance behind the merger is required.
      const AgentRec& lag = agents_[vec[i - 1]];
      const double lag_gap =
          x_new - a.pub.cls.length_m - lag.pub.kin.x;
      if (lag_gap < sc_.thresholds.stop_buffer_m) {
        clamp_at_end();
        return false;
      }
    }
  }

  int lane = 0;
  if (NL.lane_count() > 1) {
    // Freest lane: the one whose rearmost occupant leaves the most room.
    double best = -1.0;
    for (int cand = 0; cand < NL.lane_count(); ++cand) {
      const LaneVec& lv = occ_[size_t(nid)][size_t(cand)];
      double room = NL.length_m;
      if (!lv.empty()) {
        const AgentRec& r = agents_[lv.front()];
        room = r.pub.kin.x - r.pub.cls.length_m;
      }
      if (room > best) {
        best = room;
        lane = cand;
      }
    }
  }

  if (!insertion_clear(nid, lane, x_new, a.pub.cls.length_m, nullptr,
                       nullptr)) {
    clamp_at_end();
    return false;
  }

  remove_from_lane(slot);
  const LinkKind from_kind = L.kind;
  a.link = nid;
  ++a.route_pos;
  a.pub.kin.x = x_new;
  a.pub.kin.lane = lane;
  insert_into_lane(slot, nid, lane);

  if (from_kind == LinkKind::RoundaboutArc && NL.kind == LinkKind::Exit &&
      a.zone_entered && !a.completed) {
    a.completed = true;
    TrajectoryRecord rec;
    rec.id = a.pub.id;
    rec.type = a.pub.cls.type;
    rec.route = a.pub.route;
    rec.entry_s = a.zone_entry_t;
    rec.zone_s = a.pub.zone.time_s;
    rec.exit_s = a.zone_entry_t + a.pub.zone.time_s;
    rec.stopped_s = a.pub.zone.stopped_time_s;
    rec.dist_m = a.pub.zone.distance_m;
    completions_.push_back(rec);
  }
  return true;
}

void World::transfers() {
  auto drain = [&](LinkId lid) {
    const Link& L = net_.link(lid);
    for (auto& vec : occ_[size_t(lid)]) {
      while (!vec.empty()) {
        const uint32_t slot = vec.back();
        AgentRec& a = agents_[slot];
        if (a.pub.kin.x <= L.length_m)
          break;
        if (L.kind == LinkKind::Exit) {
          vec.pop_back();
          a.alive = false;
          --active_;
          ++exited_;
          continue;
        }
        if (!try_transfer(slot))
          break;
      }
    }
  };

  for (const auto& l : net_.links)
    if (l.kind == LinkKind::Exit)
      drain(l.id);
  for (LinkId arc : arc_cycle_)
    drain(arc);
  for (const auto& l : net_.links)
    if (l.kind == LinkKind::Approach)
      drain(l.id);
}

void World::injections() {
  const double now = time_now_end();
  while (schedule_pos_ < schedule_.size() &&
         schedule_[schedule_pos_].time_s <= now) {
    const Arrival& arr = schedule_[schedule_pos_];
    const LinkId entry = net_.route(arr.route).links.front();
    entry_queue_[size_t(entry)].push_back(uint32_t(schedule_pos_));
    ++schedule_pos_;
  }

  for (size_t lid = 0; lid < entry_queue_.size(); ++lid) {
    auto& q = entry_queue_[lid];
    size_t& head = entry_queue_head_[lid];
    while (head < q.size()) {
      const Arrival& arr = schedule_[q[head]];
      const LinkId entry = LinkId(lid);
      const Link& L = net_.link(entry);
      const VehicleClass& cls = sc_.classes[size_t(arr.type)];

      double clear = -1.0;
      int lane = -1;
      for (int cand = 0; cand < L.lane_count(); ++cand) {
        const LaneVec& lv = occ_[size_t(entry)][size_t(cand)];
        double room = L.length_m;
        if (!lv.empty()) {
          const AgentRec& r = agents_[lv.front()];
          room = r.pub.kin.x - r.pub.cls.length_m;
        }
        if (room > clear) {
          clear = room;
          lane = cand;
        }
      }
      const double need = cls.length_m + sc_.thresholds.stop_buffer_m;
      if (lane < 0 || clear < need)
        break; // head of the queue waits; arrivals stay FIFO per route

      AgentRec rec;
      rec.pub.id = uint32_t(agents_.size());
      rec.pub.cls = cls;
      rec.pub.route = arr.route;
      rec.pub.kin.x = cls.length_m;
      rec.pub.kin.lane = lane;
      const double brake_room = clear - need;
      rec.pub.kin.v = std::min(
          arr.v_desired, std::sqrt(2.0 * -cls.a_normal * brake_room));
      rec.pub.kin.a = 0.0;
      rec.pub.state = DrivingState::Free;
      rec.pub.v_desired = arr.v_desired;
      rec.pub.reaction_time = sc_.reaction_time_s;
      rec.pub.entry_time = now;
      rec.link = entry;
      rec.route_pos = 0;
      rec.alive = true;
      agents_.push_back(rec);
      insert_into_lane(rec.pub.id, entry, lane);
      ++injected_;
      ++active_;
      ++head;
    }
    if (head > 0 && head == q.size()) {
      q.clear();
      head = 0;
    }
  }
}

void World::zone_accounting() {
  const double t_start = clock_.t; // step start; accumulation covers one dt
  for (auto& a : agents_) {
    if (!a.alive || a.completed)
      continue;
    if (!net_.in_zone(a.link, a.pub.kin.x))
      continue;
    if (!a.zone_entered) {
      a.zone_entered = true;
      a.zone_entry_t = t_start;
    }
    metrics::zone_step(a.pub.zone, a.pub.kin.v, clock_.dt, sc_.v_stop_mps);
  }
}

void World::remove_from_lane(uint32_t slot) {
  AgentRec& a = agents_[slot];
  LaneVec& vec = occ_[size_t(a.link)][size_t(a.pub.kin.lane)];
  const auto it = std::find(vec.begin(), vec.end(), slot);
  if (it == vec.end())
    throw std::logic_error("occupancy index out of sync");
  vec.erase(it);
}

void World::insert_into_lane(uint32_t slot, LinkId link, int lane) {
  LaneVec& vec = occ_[size_t(link)][size_t(lane)];
  const double x = agents_[slot].pub.kin.x;
  const auto it = std::upper_bound(vec.begin(), vec.end(), x,
                                   [this](double key, uint32_t s) {
                                     return key < agents_[s].pub.kin.x;
                                   });
  vec.insert(it, slot);
}

void World::check_overlaps() const {
  for (const auto& link : net_.links) {
    for (const auto& vec : occ_[size_t(link.id)]) {
      for (size_t i = 0; i + 1 < vec.size(); ++i) {
        const AgentRec& f = agents_[vec[i]];
        const AgentRec& l = agents_[vec[i + 1]];
        const double gap =
            l.pub.kin.x - l.pub.cls.length_m - f.pub.kin.x;
        if (gap < -1e-9) {
          std::ostringstream os;
          os << "overlap fault: seed=" << seed_ << " step=" << step_index_
             << " link=" << link.name << " lane=" << f.pub.kin.lane
             << " agents=(" << f.pub.id << "," << l.pub.id << ") gap=" << gap
             << " xf=" << f.pub.kin.x << " xl=" << l.pub.kin.x;
          throw OverlapFault(os.str());
        }
      }
    }
  }
}

uint32_t World::spawn_for_test(int route, size_t route_pos, int lane,
                               double x, double v, VehicleType type,
                               double v_desired) {
  const auto& rl = net_.route(route).links;
  AgentRec rec;
  rec.pub.id = uint32_t(agents_.size());
  rec.pub.cls = sc_.classes[size_t(type)];
  rec.pub.route = route;
  rec.pub.kin.x = x;
  rec.pub.kin.lane = lane;
  rec.pub.kin.v = v;
  rec.pub.state = DrivingState::Free;
  rec.pub.v_desired = v_desired;
  rec.pub.reaction_time = sc_.reaction_time_s;
  rec.pub.entry_time = clock_.t;
  rec.link = rl.at(route_pos);
  rec.route_pos = route_pos;
  rec.alive = true;
  agents_.push_back(rec);
  insert_into_lane(rec.pub.id, rec.link, lane);
  ++injected_;
  ++active_;
  return rec.pub.id;
}

const VehicleAgent& World::agent_state(uint32_t id) const {
  return agents_.at(id).pub;
}

LinkId World::agent_link(uint32_t id) const { return agents_.at(id).link; }

ReplicationResult run_replication(const Scenario& sc, const RoadNetwork& net,
                                  int rep_index) {
  ReplicationResult r;
  r.rep_index = rep_index;
  r.derived_seed = replication_seed(sc.seed, rep_index);

  World w(sc, net, r.derived_seed);
  const double total = sc.warmup_s + sc.duration_s;
  w.run_until(total);

  const double w_start = sc.warmup_s - 1e-9;
  for (const auto& rec : w.completions())
    if (rec.entry_s >= w_start && rec.exit_s <= total + 1e-9)
      r.records.push_back(rec);
  r.injected = w.injected();
  r.exited = w.exited();
  r.active_at_end = w.active_count();
  r.queued_at_end = w.queued_count();
  r.censored = w.incomplete_zone_entrants(w_start);
  r.agg = metrics::aggregate(r.records);
  return r;
}

std::vector<ReplicationResult> run_experiment(const Scenario& sc,
                                              const RoadNetwork& net) {
  if (sc.replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  std::vector<ReplicationResult> out;
  out.reserve(size_t(sc.replications));
  for (int rep = 0; rep < sc.replications; ++rep) {
    try {
      out.push_back(run_replication(sc, net, rep));
    } catch (const OverlapFault& e) {
      throw OverlapFault("replication " + std::to_string(rep) + ": " +
                         e.what());
    }
  }
  return out;
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& records) {
  std::string out = "id,class,route,entry_s,exit_s,stopped_s,dist_m,zone_s\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%u,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  r.id, to_string(r.type), r.route, r.entry_s, r.exit_s,
                  r.stopped_s, r.dist_m, r.zone_s);
    out += buf;
  }
  return out;
}

std::vector<TrajectoryRecord> parse_trajectory_csv(const std::string& text) {
  std::vector<TrajectoryRecord> out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("trajectory csv: empty input");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != "id,class,route,entry_s,exit_s,stopped_s,dist_m,zone_s")
    throw std::runtime_error("trajectory csv: unexpected header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> f;
    size_t pos = 0;
    while (true) {
      const size_t c = line.find(',', pos);
      f.push_back(line.substr(pos, c - pos));
      if (c == std::string::npos)
        break;
      pos = c + 1;
    }
    if (f.size() != 8)
      throw std::runtime_error("trajectory csv: line " +
                               std::to_string(line_no) + ": want 8 fields");
    TrajectoryRecord r;
    try {
      r.id = uint32_t(std::stoul(f[0]));
      const auto type = vehicle_type_from_string(f[1]);
      if (!type)
        throw std::invalid_argument("class");
      r.type = *type;
      r.route = std::stoi(f[2]);
      r.entry_s = std::stod(f[3]);
      r.exit_s = std::stod(f[4]);
      r.stopped_s = std::stod(f[5]);
      r.dist_m = std::stod(f[6]);
      r.zone_s = std::stod(f[7]);
    } catch (const std::exception&) {
      throw std::runtime_error("trajectory csv: line " +
                               std::to_string(line_no) + ": malformed field");
    }
    out.push_back(r);
  }
  return out;
}

} // namespace forksim
