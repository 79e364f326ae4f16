#include "forksim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace forksim {

namespace {

const char* class_key(VehicleType t) {
  switch (t) {
  case VehicleType::Motorcycle: return "motorcycle";
  case VehicleType::Wheeler4x8: return "wheeler_4x8";
  case VehicleType::Wheeler4x6: return "wheeler_4x6";
  case VehicleType::Van: return "van";
  case VehicleType::Jeepney: return "jeepney";
  case VehicleType::Car: return "car";
  case VehicleType::Bus: return "bus";
  case VehicleType::Bicycle: return "bicycle";
  }
  return "?";
}

std::optional<VehicleType> class_from_key(const std::string& s) {
  for (size_t i = 0; i < kVehicleTypeCount; ++i) {
    const auto t = static_cast<VehicleType>(i);
    if (s == class_key(t))
      return t;
  }
  return std::nullopt;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    --e;
  return s.substr(b, e - b);
}

[[noreturn]] void syntax(int line, const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::Syntax, line,
                      "line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
  const std::string s = trim(v);
  if (s.empty())
    syntax(line, "expected a number");
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    syntax(line, "malformed number '" + s + "'");
  return x;
}

uint64_t parse_u64(const std::string& v, int line) {
  const std::string s = trim(v);
  if (s.empty() || s[0] == '-')
    syntax(line, "expected an unsigned integer");
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    syntax(line, "malformed unsigned integer '" + s + "'");
  return x;
}

int parse_int(const std::string& v, int line) {
  const std::string s = trim(v);
  if (s.empty())
    syntax(line, "expected an integer");
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE || x < INT_MIN ||
      x > INT_MAX)
    syntax(line, "malformed integer '" + s + "'");
  return static_cast<int>(x);
}

[[noreturn]] void semantic(const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::Semantic, 0, msg);
}

void set_scenario_key(Scenario& s, const std::string& key,
                      const std::string& val, int line) {
  if (key == "variant") {
    try {
      s.variant = variant_from_string(trim(val));
    } catch (const std::invalid_argument& e) {
      semantic(e.what());
    }
  } else if (key == "volume_multiplier") {
    s.volume_multiplier = parse_double(val, line);
  } else if (key == "duration_s") {
    s.duration_s = parse_double(val, line);
  } else if (key == "warmup_s") {
    s.warmup_s = parse_double(val, line);
  } else if (key == "dt_s") {
    s.dt_s = parse_double(val, line);
  } else if (key == "seed") {
    s.seed = parse_u64(val, line);
  } else if (key == "replications") {
    s.replications = parse_int(val, line);
  } else if (key == "legal_speed_mps") {
    s.legal_speed_mps = parse_double(val, line);
  } else if (key == "reaction_time_s") {
    s.reaction_time_s = parse_double(val, line);
  } else if (key == "critical_gap_s") {
    s.critical_gap_s = parse_double(val, line);
  } else if (key == "v_stop_mps") {
    s.v_stop_mps = parse_double(val, line);
  } else if (key == "zone_tail_m") {
    s.zone_tail_m = parse_double(val, line);
  } else if (key == "lead_headway_s") {
    s.gap.lead_headway_s = parse_double(val, line);
  } else if (key == "lag_headway_s") {
    s.gap.lag_headway_s = parse_double(val, line);
  } else if (key == "lag_buffer_m") {
    s.gap.lag_buffer_m = parse_double(val, line);
  } else if (key == "speed_gain_mps") {
    s.gap.speed_gain_mps = parse_double(val, line);
  } else {
    syntax(line, "unknown key '" + key + "' in [scenario]");
  }
}

void set_class_key(Scenario& s, const std::string& key,
                   const std::string& val, int line) {
  const size_t dot = key.find('.');
  if (dot == std::string::npos)
    syntax(line, "class keys take the form <class>.<field>");
  const std::string cls = key.substr(0, dot);
  const std::string field = key.substr(dot + 1);
  const auto type = class_from_key(cls);
  if (!type)
    syntax(line, "unknown vehicle class '" + cls + "'");
  VehicleClass& c = s.classes[static_cast<size_t>(*type)];
  const double x = parse_double(val, line);
  if (field == "length_m")
    c.length_m = x;
  else if (field == "width_m")
    c.width_m = x;
  else if (field == "effective_length_m")
    c.effective_length_m = x;
  else if (field == "a_max")
    c.a_max = x;
  else if (field == "a_normal")
    c.a_normal = x;
  else if (field == "a_emergency")
    c.a_emergency = x;
  else if (field == "desired_speed_mean")
    c.desired_speed_mean = x;
  else if (field == "desired_speed_sd")
    c.desired_speed_sd = x;
  else if (field == "share")
    c.share = x;
  else
    syntax(line, "unknown class field '" + field + "'");
}

void set_demand_key(Scenario& s, const std::string& key,
                    const std::string& val, int line) {
  if (key == "horizon_s") {
    s.demand.horizon_s = parse_double(val, line);
    return;
  }
  if (key.rfind("route_", 0) == 0 && key.size() == 7) {
    const char d = key[6];
    if (d >= '1' && d <= '6') {
      s.demand.route_counts[size_t(d - '1')] = parse_double(val, line);
      return;
    }
  }
  syntax(line, "unknown key '" + key + "' in [demand]");
}

void set_ghr_key(Scenario& s, const std::string& key, const std::string& val,
                 int line) {
  const double x = parse_double(val, line);
  if (key == "r_plus")
    s.ghr.r_plus = x;
  else if (key == "s_plus")
    s.ghr.s_plus = x;
  else if (key == "t_plus")
    s.ghr.t_plus = x;
  else if (key == "r_minus")
    s.ghr.r_minus = x;
  else if (key == "s_minus")
    s.ghr.s_minus = x;
  else if (key == "t_minus")
    s.ghr.t_minus = x;
  else
    syntax(line, "unknown key '" + key + "' in [ghr]");
}

void set_thresholds_key(Scenario& s, const std::string& key,
                        const std::string& val, int line) {
  const double x = parse_double(val, line);
  if (key == "horizon_factor")
    s.thresholds.horizon_factor = x;
  else if (key == "min_follow_m")
    s.thresholds.min_follow_m = x;
  else if (key == "stop_buffer_m")
    s.thresholds.stop_buffer_m = x;
  else
    syntax(line, "unknown key '" + key + "' in [thresholds]");
}

} // namespace

void Scenario::validate() const {
  if (!(volume_multiplier >= 0.0))
    semantic("volume multiplier must be >= 0");
  if (!(warmup_s >= 0.0))
    semantic("warmup must be >= 0");
  if (!(duration_s > warmup_s))
    semantic("duration must exceed warmup");
  if (!(dt_s > 0.0))
    semantic("dt must be > 0");
  if (replications < 1)
    semantic("replications must be >= 1");
  if (!(legal_speed_mps > 2.0))
    semantic("legal speed must exceed 2 m/s");
  if (!(reaction_time_s >= 0.0))
    semantic("reaction time must be >= 0");
  if (!(critical_gap_s >= 0.0))
    semantic("critical gap must be >= 0");
  if (!(v_stop_mps >= 0.0))
    semantic("stop-speed threshold must be >= 0");
  if (!(zone_tail_m >= 0.0 && zone_tail_m <= 100.0))
    semantic("zone tail must be in [0, 100] m");
  if (!(thresholds.horizon_factor >= 1.0))
    semantic("horizon factor must be >= 1");
  if (!(thresholds.min_follow_m > 0.0))
    semantic("minimum following distance must be > 0");
  if (!(thresholds.stop_buffer_m > 0.0))
    semantic("stop buffer must be > 0");
  if (!(gap.lead_headway_s >= 0.0) || !(gap.lag_headway_s >= 0.0))
    semantic("gap-acceptance headways must be >= 0");
  if (!(gap.lag_buffer_m >= 0.0))
    semantic("gap-acceptance lag buffer must be >= 0");
  if (!(gap.speed_gain_mps >= 0.0))
    semantic("speed-gain threshold must be >= 0");
  try {
    validate_class_set(classes);
    ghr.validate();
    demand.validate();
  } catch (const std::invalid_argument& e) {
    semantic(e.what());
  }
}

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  enum class Section { None, Scenario, Classes, Demand, Ghr, Thresholds };
  Section cur = Section::None;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos)
      nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        syntax(line_no, "unterminated section header");
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (name == "scenario")
        cur = Section::Scenario;
      else if (name == "classes")
        cur = Section::Classes;
      else if (name == "demand")
        cur = Section::Demand;
      else if (name == "ghr")
        cur = Section::Ghr;
      else if (name == "thresholds")
        cur = Section::Thresholds;
      else
        syntax(line_no, "unknown section [" + name + "]");
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      syntax(line_no, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = t.substr(eq + 1);
    if (key.empty())
      syntax(line_no, "empty key");
    switch (cur) {
    case Section::None:
      syntax(line_no, "key outside any section");
    case Section::Scenario:
      set_scenario_key(s, key, val, line_no);
      break;
    case Section::Classes:
      set_class_key(s, key, val, line_no);
      break;
    case Section::Demand:
      set_demand_key(s, key, val, line_no);
      break;
    case Section::Ghr:
      set_ghr_key(s, key, val, line_no);
      break;
    case Section::Thresholds:
      set_thresholds_key(s, key, val, line_no);
      break;
    }
    if (pos > text.size())
      break;
  }

  s.validate();
  return s;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string serialize_scenario(const Scenario& s) {
  std::string out;
  out.reserve(4096);
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };

  // Sections and keys in sorted order; every key explicit.
  out += "[classes]\n";
  {
    struct Entry {
      std::string key;
      double value;
    };
    std::vector<Entry> entries;
    for (size_t i = 0; i < kVehicleTypeCount; ++i) {
      const VehicleClass& c = s.classes[i];
      const std::string p = class_key(static_cast<VehicleType>(i));
      entries.push_back({p + ".a_emergency", c.a_emergency});
      entries.push_back({p + ".a_max", c.a_max});
      entries.push_back({p + ".a_normal", c.a_normal});
      entries.push_back({p + ".desired_speed_mean", c.desired_speed_mean});
      entries.push_back({p + ".desired_speed_sd", c.desired_speed_sd});
      entries.push_back({p + ".effective_length_m", c.effective_length_m});
      entries.push_back({p + ".length_m", c.length_m});
      entries.push_back({p + ".share", c.share});
      entries.push_back({p + ".width_m", c.width_m});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.key < b.key; });
    for (const auto& e : entries)
      kv(e.key, num(e.value));
  }

  out += "[demand]\n";
  kv("horizon_s", num(s.demand.horizon_s));
  for (int r = 1; r <= 6; ++r)
    kv("route_" + std::to_string(r), num(s.demand.route_counts[size_t(r - 1)]));

  out += "[ghr]\n";
  kv("r_minus", num(s.ghr.r_minus));
  kv("r_plus", num(s.ghr.r_plus));
  kv("s_minus", num(s.ghr.s_minus));
  kv("s_plus", num(s.ghr.s_plus));
  kv("t_minus", num(s.ghr.t_minus));
  kv("t_plus", num(s.ghr.t_plus));

  out += "[scenario]\n";
  kv("critical_gap_s", num(s.critical_gap_s));
  kv("dt_s", num(s.dt_s));
  kv("duration_s", num(s.duration_s));
  kv("lag_buffer_m", num(s.gap.lag_buffer_m));
  kv("lag_headway_s", num(s.gap.lag_headway_s));
  kv("lead_headway_s", num(s.gap.lead_headway_s));
  kv("legal_speed_mps", num(s.legal_speed_mps));
  kv("reaction_time_s", num(s.reaction_time_s));
  kv("replications", std::to_string(s.replications));
  kv("seed", std::to_string(s.seed));
  kv("speed_gain_mps", num(s.gap.speed_gain_mps));
  kv("v_stop_mps", num(s.v_stop_mps));
  kv("variant", to_string(s.variant));
  kv("volume_multiplier", num(s.volume_multiplier));
  kv("warmup_s", num(s.warmup_s));
  kv("zone_tail_m", num(s.zone_tail_m));

  out += "[thresholds]\n";
  kv("horizon_factor", num(s.thresholds.horizon_factor));
  kv("min_follow_m", num(s.thresholds.min_follow_m));
  kv("stop_buffer_m", num(s.thresholds.stop_buffer_m));

  return out;
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = serialize_scenario(s);
  uint64_t h = 1469598103934665603ULL; // FNV offset basis
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL; // FNV prime
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

} // namespace forksim
