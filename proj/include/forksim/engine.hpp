#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forksim/demand.hpp"
#include "forksim/lanechange.hpp"
#include "forksim/metrics.hpp"
#include "forksim/network.hpp"
#include "forksim/scenario.hpp"
#include "forksim/trajectory.hpp"

namespace forksim {

struct ReplicationResult {
  int rep_index = 0;
  uint64_t derived_seed = 0;
  std::vector<TrajectoryRecord> records; // completed inside the window
  size_t injected = 0;
  size_t exited = 0;
  size_t active_at_end = 0;
  size_t queued_at_end = 0;
  size_t censored = 0; // in-window zone entrants without a completion
  metrics::Aggregate agg;
};

/// Per-replication generator seed: a 64-bit finalizer over
/// (scenario seed, replication index), so replications are decorrelated
/// and reproducible on any platform.
uint64_t replication_seed(uint64_t base_seed, int rep_index);

/// One running simulation. The update is synchronous and two-phase:
/// decisions are computed for every agent against the state at time t,
/// then movement, lane changes, boundary transfers, injections and
/// retirements are applied together. All iteration orders are fixed, so a
/// run is a pure function of (scenario, network, seed).
class World {
public:
  World(const Scenario& sc, const RoadNetwork& net, uint64_t seed);

  void step();
  void run_until(double t_end);

  const SimClock& clock() const { return clock_; }
  size_t injected() const { return injected_; }
  size_t exited() const { return exited_; }
  size_t active_count() const { return active_; }
  size_t queued_count() const;
  size_t blocked_merges() const { return blocked_merges_; }
  const std::vector<TrajectoryRecord>& completions() const {
    return completions_;
  }

  /// Zone entrants that have not completed; `since` filters by zone entry
  /// time (absolute seconds).
  size_t incomplete_zone_entrants(double since) const;

  struct LinkStats {
    size_t count = 0;
    double mean_v = 0.0; // 0 when the link is empty
  };
  LinkStats link_stats(LinkId id) const;

  /// Same-lane / cross-link ordering and spacing invariant. Throws
  /// OverlapFault with seed, step and the offending pair.
  void check_overlaps() const;

  /// Test access: place one vehicle directly, bypassing demand. The
  /// position is the front bumper; the slot participates in conservation
  /// as an injection.
  uint32_t spawn_for_test(int route, size_t route_pos, int lane, double x,
                          double v, VehicleType type, double v_desired);
  const VehicleAgent& agent_state(uint32_t id) const;
  LinkId agent_link(uint32_t id) const;

private:
  struct AgentRec {
    VehicleAgent pub;
    LinkId link = -1;
    size_t route_pos = 0;
    bool alive = false;
    bool zone_entered = false;
    bool completed = false;
    double zone_entry_t = 0.0;
    int lc_cooldown = 0;
    // phase-1 buffers
    double a_cmd = 0.0;
    double gap_cap = -1.0; // distance budget to the leader's rear; <0 = none
    LaneChangeDecision lc{};
  };

  struct LeaderHit {
    bool found = false;
    LeaderContext ctx{};
    int leader_slot = -1; // -1 for cross-link or virtual constraints
  };

  // occupancy: occ_[link][lane] = agent slots sorted by front position
  using LaneVec = std::vector<uint32_t>;

  const Scenario sc_;
  const RoadNetwork& net_;
  uint64_t seed_;
  SimClock clock_;
  uint64_t step_index_ = 0;

  std::vector<Arrival> schedule_;
  size_t schedule_pos_ = 0;
  // FIFO of pending schedule indices per entry link, in arrival-time order,
  // so congestion never distorts the route mix of a shared approach.
  std::vector<std::vector<uint32_t>> entry_queue_;
  std::vector<size_t> entry_queue_head_;

  std::vector<AgentRec> agents_;
  std::vector<std::vector<LaneVec>> occ_;
  size_t injected_ = 0;
  size_t exited_ = 0;
  size_t active_ = 0;
  size_t blocked_merges_ = 0;
  std::vector<TrajectoryRecord> completions_;

  std::vector<LinkId> arc_cycle_; // arcs in circulation order
  std::vector<EntryDecision> entry_cache_;

  void phase_decisions();
  void phase_apply();
  LeaderHit find_leader(const AgentRec& a) const;
  double circulating_distance_to(NodeId node, const AgentRec& arc_agent) const;
  bool crosses_node(const AgentRec& arc_agent, NodeId node) const;
  EntryDecision entry_decision(NodeId node) const;
  LaneNeighborhood neighborhood(const AgentRec& a) const;
  void apply_lane_changes();
  bool gap_ok(const AgentRec& a, const LaneView& tv) const;
  void integrate();
  void transfers();
  void injections();
  void zone_accounting();
  bool try_transfer(uint32_t slot);
  bool insertion_clear(LinkId link, int lane, double x_front, double length,
                       int* leader_slot, int* follower_slot) const;
  void remove_from_lane(uint32_t slot);
  void insert_into_lane(uint32_t slot, LinkId link, int lane);
  double time_now_end() const { return (double)(step_index_ + 1) * sc_.dt_s; }
};

ReplicationResult run_replication(const Scenario& sc, const RoadNetwork& net,
                                  int rep_index);

std::vector<ReplicationResult> run_experiment(const Scenario& sc,
                                              const RoadNetwork& net);

/// CSV for the per-vehicle records (header + one row per completion).
std::string trajectory_csv(const std::vector<TrajectoryRecord>& records);

/// Parses the CSV format written by trajectory_csv. Throws
/// std::runtime_error on malformed input.
std::vector<TrajectoryRecord> parse_trajectory_csv(const std::string& text);

} // namespace forksim
