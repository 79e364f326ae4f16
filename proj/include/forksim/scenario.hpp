#pragma once

#include <stdexcept>
#include <string>

#include "forksim/carfollow.hpp"
#include "forksim/core.hpp"
#include "forksim/demand.hpp"
#include "forksim/lanechange.hpp"
#include "forksim/network.hpp"

namespace forksim {

/// A complete, self-contained run description. Everything an experiment
/// depends on lives here so that (scenario, seed) reproduces bytes.
struct Scenario {
  Variant variant = Variant::ID0;
  double volume_multiplier = 1.0;
  double duration_s = 3600.0; // measurement window after warmup
  double warmup_s = 300.0;
  double dt_s = 0.1;
  uint64_t seed = 1;
  int replications = 10;

  double legal_speed_mps = 40.0 / 3.6;
  double reaction_time_s = 1.0;
  double critical_gap_s = 3.0;
  double v_stop_mps = 0.1;
  double zone_tail_m = 50.0;

  VehicleClassSet classes = default_vehicle_classes();
  GhrParams ghr;
  StateThresholds thresholds;
  GapAcceptance gap;
  DemandTable demand;

  void validate() const; // throws ScenarioError (semantic)
  bool operator==(const Scenario&) const = default;
};

/// Parse or validation failure. `line` is 1-based for syntax errors and
/// 0 when the problem is semantic (an invariant named in what()).
class ScenarioError : public std::runtime_error {
public:
  enum class Kind { Syntax, Semantic };
  ScenarioError(Kind kind, int line, const std::string& msg)
      : std::runtime_error(msg), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }

private:
  Kind kind_;
  int line_;
};

/// Sectioned key-value text, UTF-8, '#' comments. Sections: [scenario],
/// [classes], [demand], [ghr], [thresholds]. Unknown sections or keys are
/// syntax errors with the offending line number; invariant violations are
/// semantic errors naming the invariant. Total over byte strings.
Scenario parse_scenario(const std::string& text);

/// Canonical text form: sections and keys in sorted order, every key
/// explicit, doubles printed round-trip exact. parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// 64-bit FNV-1a of the canonical serialization, hex string.
std::string scenario_hash(const Scenario& s);

} // namespace forksim
