#include "forksim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "forksim/engine.hpp"
#include "forksim/stats.hpp"

namespace forksim {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw UsageError("cannot write file: " + path.string());
  out << content;
  if (!out)
    throw RuntimeFault("short write: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw UsageError("cannot create output directory: " + dir.string());
}

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

Scenario load_scenario(const std::string& path,
                       std::optional<uint64_t> seed,
                       std::optional<int> reps,
                       std::optional<double> mult) {
  Scenario sc = parse_scenario(read_file(path));
  if (seed)
    sc.seed = *seed;
  if (reps)
    sc.replications = *reps;
  if (mult)
    sc.volume_multiplier = *mult;
  sc.validate();
  return sc;
}

RoadNetwork network_for(const Scenario& sc) {
  return build_br_network(sc.variant, sc.legal_speed_mps, sc.zone_tail_m);
}

// -------------------------------------------------------------- run

std::string summary_text(const Scenario& sc,
                         const std::vector<ReplicationResult>& rs) {
  std::string out;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "experiment summary\n"
                "variant              : %s\n"
                "volume multiplier    : %g\n"
                "replications         : %d\n"
                "base seed            : %llu\n"
                "warmup / measurement : %.1f s / %.1f s\n\n",
                to_string(sc.variant), sc.volume_multiplier, sc.replications,
                (unsigned long long)sc.seed, sc.warmup_s,
                sc.duration_s - 0.0);
  out += buf;
  out += "rep  derived_seed          n  censored  mean_tau_s  mean_delta_s"
         "  mean_sigma_mps  mean_sigma_kmh\n";
  double st = 0, sd = 0, ss = 0;
  size_t groups = 0;
  for (const auto& r : rs) {
    if (r.agg.empty) {
      std::snprintf(buf, sizeof buf,
                    "%3d  %s %6zu  %8zu  %10s  %12s  %14s  %14s\n",
                    r.rep_index, hex64(r.derived_seed).c_str(),
                    r.agg.n, r.censored, "-", "-", "-", "-");
    } else {
      std::snprintf(buf, sizeof buf,
                    "%3d  %s %6zu  %8zu  %10.3f  %12.3f  %14.3f  %14.3f\n",
                    r.rep_index, hex64(r.derived_seed).c_str(), r.agg.n,
                    r.censored, r.agg.mean_tau_s, r.agg.mean_delta_s,
                    r.agg.mean_sigma_mps,
                    metrics::mps_to_kmh(r.agg.mean_sigma_mps));
      st += r.agg.mean_tau_s;
      sd += r.agg.mean_delta_s;
      ss += r.agg.mean_sigma_mps;
      ++groups;
    }
    out += buf;
  }
  if (groups == 0) {
    out += "\noverall: no completed vehicles in the measurement window\n";
  } else {
    const double g = double(groups);
    std::snprintf(buf, sizeof buf,
                  "\noverall: mean tau = %.3f s, mean delta = %.3f s, "
                  "mean sigma = %.3f m/s (%.3f km/h)\n",
                  st / g, sd / g, ss / g, metrics::mps_to_kmh(ss / g));
    out += buf;
  }
  return out;
}

std::string summary_csv(const std::vector<ReplicationResult>& rs) {
  std::string out =
      "rep,derived_seed,n,censored,mean_tau_s,mean_delta_s,mean_sigma_mps\n";
  char buf[256];
  for (const auto& r : rs) {
    if (r.agg.empty)
      std::snprintf(buf, sizeof buf, "%d,%s,%zu,%zu,,,\n", r.rep_index,
                    hex64(r.derived_seed).c_str(), r.agg.n, r.censored);
    else
      std::snprintf(buf, sizeof buf, "%d,%s,%zu,%zu,%.6f,%.6f,%.6f\n",
                    r.rep_index, hex64(r.derived_seed).c_str(), r.agg.n,
                    r.censored, r.agg.mean_tau_s, r.agg.mean_delta_s,
                    r.agg.mean_sigma_mps);
    out += buf;
  }
  return out;
}

std::string manifest_text(const Scenario& sc) {
  char ts[64] = "unknown";
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  if (gmtime_r(&now, &tm))
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", &tm);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "tool_version = %s\n"
                "scenario_hash = %s\n"
                "variant = %s\n"
                "volume_multiplier = %.17g\n"
                "base_seed = %llu\n"
                "replications = %d\n"
                "generated_at = %s\n",
                kToolVersion, scenario_hash(sc).c_str(),
                to_string(sc.variant), sc.volume_multiplier,
                (unsigned long long)sc.seed, sc.replications, ts);
  return buf;
}

int cmd_run(const Scenario& sc, const fs::path& out_dir, std::ostream& out) {
  ensure_dir(out_dir);
  const RoadNetwork net = network_for(sc);
  const std::vector<ReplicationResult> rs = run_experiment(sc, net);
  for (const auto& r : rs)
    write_file(out_dir / ("rep_" + std::to_string(r.rep_index) + ".csv"),
               trajectory_csv(r.records));
  const std::string text = summary_text(sc, rs);
  write_file(out_dir / "summary.txt", text);
  write_file(out_dir / "summary.csv", summary_csv(rs));
  write_file(out_dir / "manifest.txt", manifest_text(sc));
  out << text;
  return 0;
}

// ---------------------------------------------------------- compare

// Letter assignment when the error variance is exactly zero: equal means
// share a letter, distinct means are trivially separated.
std::vector<std::string> exact_letters(const std::vector<double>& means) {
  std::vector<size_t> order(means.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return means[a] < means[b]; });
  std::vector<std::string> letters(means.size());
  char letter = 'A';
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && means[order[i]] != means[order[i - 1]] && letter < 'Z')
      ++letter;
    letters[order[i]] = std::string(1, letter);
  }
  return letters;
}

struct MetricBlock {
  std::string title;
  stats::AnovaTable table;
  std::vector<double> means; // per treatment
  std::vector<std::string> letters;
};

MetricBlock metric_block(const std::string& title,
                         const std::vector<std::vector<double>>& data) {
  MetricBlock b;
  b.title = title;
  b.table = stats::anova_rcbd(data);
  const size_t t_count = data.front().size();
  b.means.assign(t_count, 0.0);
  for (const auto& row : data)
    for (size_t t = 0; t < t_count; ++t)
      b.means[t] += row[t];
  for (auto& m : b.means)
    m /= double(data.size());
  const double ms_err = b.table.error.ms.value_or(0.0);
  if (ms_err > 0.0)
    b.letters = stats::dmrt(b.means, ms_err, b.table.error.df,
                            int(data.size()))
                    .letters;
  else
    b.letters = exact_letters(b.means);
  return b;
}

int cmd_compare(const std::vector<std::string>& paths,
                std::optional<uint64_t> seed, std::optional<int> reps,
                const fs::path& out_dir, std::ostream& out) {
  if (paths.size() < 2)
    throw UsageError("compare needs at least two scenario files");
  ensure_dir(out_dir);

  std::vector<Scenario> scs;
  for (const auto& p : paths)
    scs.push_back(load_scenario(p, seed, reps, {}));
  for (const auto& sc : scs)
    if (sc.replications != scs.front().replications)
      throw UsageError("scenarios disagree on replications: " +
                       std::to_string(scs.front().replications) + " vs " +
                       std::to_string(sc.replications));

  const size_t b_count = size_t(scs.front().replications);
  const size_t t_count = scs.size();
  std::vector<std::vector<double>> delta(b_count,
                                         std::vector<double>(t_count));
  std::vector<std::vector<double>> sigma(b_count,
                                         std::vector<double>(t_count));
  for (size_t t = 0; t < t_count; ++t) {
    const RoadNetwork net = network_for(scs[t]);
    const auto rs = run_experiment(scs[t], net);
    for (size_t b = 0; b < b_count; ++b) {
      if (rs[b].agg.empty)
        throw RuntimeFault("scenario " + paths[t] + " replication " +
                           std::to_string(b) + " has no completed vehicles");
      delta[b][t] = rs[b].agg.mean_delta_s;
      sigma[b][t] = rs[b].agg.mean_sigma_mps;
    }
  }

  const MetricBlock bd = metric_block("mean delay time (delta, s)", delta);
  const MetricBlock bs = metric_block("mean speed (sigma, m/s)", sigma);

  std::string text;
  char buf[320];
  for (const MetricBlock* blk : {&bd, &bs}) {
    text += "== " + blk->title + " ==\n";
    text += stats::format_anova(blk->table, "Scenario");
    text += "treatment means and range-test groups:\n";
    for (size_t t = 0; t < t_count; ++t) {
      std::snprintf(buf, sizeof buf, "  %-4s %10.3f   %-4s %s\n",
                    blk->letters[t].c_str(), blk->means[t],
                    to_string(scs[t].variant), paths[t].c_str());
      text += buf;
    }
    text += "\n";
  }
  text += "means sharing a letter are not significantly different "
          "(alpha = 0.05)\n";

  write_file(out_dir / "compare.txt", text);
  write_file(out_dir / "anova_delta.csv",
             stats::anova_csv(bd.table, "Scenario"));
  write_file(out_dir / "anova_sigma.csv",
             stats::anova_csv(bs.table, "Scenario"));
  out << text;
  return 0;
}

// ------------------------------------------------------------ sweep

int cmd_sweep(const Scenario& base, const std::vector<double>& mults,
              const fs::path& out_dir, std::ostream& out) {
  if (mults.size() < 2)
    throw UsageError("sweep needs at least two multipliers");
  ensure_dir(out_dir);

  std::vector<double> xs, yd, ys;
  std::string skipped;
  for (double m : mults) {
    Scenario sc = base;
    sc.volume_multiplier = m;
    sc.validate();
    const RoadNetwork net = network_for(sc);
    const auto rs = run_experiment(sc, net);
    double d = 0, s = 0;
    size_t n = 0;
    for (const auto& r : rs)
      if (!r.agg.empty) {
        d += r.agg.mean_delta_s;
        s += metrics::mps_to_kmh(r.agg.mean_sigma_mps);
        ++n;
      }
    if (n == 0) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "multiplier %g produced no completions; point skipped\n",
                    m);
      skipped += buf;
      continue;
    }
    xs.push_back((m - 1.0) * 100.0);
    yd.push_back(d / double(n));
    ys.push_back(s / double(n));
  }
  if (xs.size() < 2)
    throw RuntimeFault("sweep: fewer than two usable demand points");

  stats::RegressionFit fd, fs_;
  try {
    fd = stats::linear_regression(xs, yd);
    fs_ = stats::linear_regression(xs, ys);
  } catch (const std::invalid_argument& e) {
    throw RuntimeFault(std::string("sweep regression: ") + e.what());
  }

  std::string text = skipped;
  text += "x = demand increase over baseline (percent)\n";
  text += stats::format_fit_line("delta_s", fd) + "\n";
  text += stats::format_fit_line("sigma_kmh", fs_) + "\n";

  char buf[128];
  std::string csv_d = "pct_increase,mean_delta_s\n";
  std::string csv_s = "pct_increase,mean_sigma_kmh\n";
  for (size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", xs[i], yd[i]);
    csv_d += buf;
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", xs[i], ys[i]);
    csv_s += buf;
  }
  write_file(out_dir / "sweep_delta.csv", csv_d);
  write_file(out_dir / "sweep_sigma.csv", csv_s);
  write_file(out_dir / "sweep_fits.txt", text);
  out << text;
  return 0;
}

// --------------------------------------------------------- validate

std::vector<double> parse_observed(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw UsageError("observed csv: empty file");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();

  if (line == "id,class,route,entry_s,exit_s,stopped_s,dist_m,zone_s") {
    std::vector<TrajectoryRecord> recs;
    try {
      recs = parse_trajectory_csv(text);
    } catch (const std::exception& e) {
      throw UsageError(std::string("observed csv: ") + e.what());
    }
    std::vector<double> taus;
    taus.reserve(recs.size());
    for (const auto& r : recs)
      taus.push_back(metrics::vehicle_metrics(r).tau_s);
    return taus;
  }

  if (line != "tau_s")
    throw UsageError(
        "observed csv: header must be 'tau_s' or a trajectory header");
  std::vector<double> taus;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0' || !std::isfinite(v) || v <= 0)
      throw UsageError("observed csv: line " + std::to_string(line_no) +
                       ": expected one positive travel time");
    taus.push_back(v);
  }
  return taus;
}

int cmd_validate(const Scenario& sc, const std::string& observed_path,
                 const std::optional<fs::path>& out_dir, std::ostream& out) {
  const std::vector<double> taus = parse_observed(read_file(observed_path));
  const size_t b_count = size_t(sc.replications);
  if (taus.size() < b_count)
    throw UsageError("observed csv: need at least " +
                     std::to_string(b_count) + " samples, got " +
                     std::to_string(taus.size()));

  // Contiguous blocks, sizes as even as possible, pair with replications.
  std::vector<double> obs_mean(b_count, 0.0);
  const size_t base = taus.size() / b_count;
  const size_t extra = taus.size() % b_count;
  size_t pos = 0;
  for (size_t b = 0; b < b_count; ++b) {
    const size_t len = base + (b < extra ? 1 : 0);
    double s = 0;
    for (size_t i = 0; i < len; ++i)
      s += taus[pos + i];
    obs_mean[b] = s / double(len);
    pos += len;
  }

  const RoadNetwork net = network_for(sc);
  const auto rs = run_experiment(sc, net);
  std::vector<std::vector<double>> data(b_count, std::vector<double>(2));
  for (size_t b = 0; b < b_count; ++b) {
    if (rs[b].agg.empty)
      throw RuntimeFault("replication " + std::to_string(b) +
                         " has no completed vehicles");
    data[b][0] = obs_mean[b];
    data[b][1] = rs[b].agg.mean_tau_s;
  }

  const stats::AnovaTable table = stats::anova_rcbd(data);
  const double p = table.treatment.p.value_or(1.0);
  const bool accept = !(p < 0.05);

  double og = 0, sg = 0;
  for (size_t b = 0; b < b_count; ++b) {
    og += data[b][0];
    sg += data[b][1];
  }
  og /= double(b_count);
  sg /= double(b_count);

  std::string text = "== observed vs simulated mean travel time (tau, s) ==\n";
  text += stats::format_anova(table, "Travel time");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "observed mean tau  : %.3f s\n"
                "simulated mean tau : %.3f s\n"
                "H0 (equal means)   : %s at alpha = 0.05 (alpha_F = %s)\n",
                og, sg, accept ? "ACCEPTED" : "REJECTED",
                stats::format_pvalue(p).c_str());
  text += buf;

  if (out_dir) {
    ensure_dir(*out_dir);
    write_file(*out_dir / "validate.txt", text);
    write_file(*out_dir / "validate_anova.csv",
               stats::anova_csv(table, "Travel time"));
  }
  out << text;
  return 0;
}

// ----------------------------------------------------------- report

int cmd_report(const fs::path& out_dir, std::ostream& out) {
  std::vector<metrics::Aggregate> aggs;
  for (int k = 0;; ++k) {
    const fs::path p = out_dir / ("rep_" + std::to_string(k) + ".csv");
    if (!fs::exists(p))
      break;
    std::vector<TrajectoryRecord> recs;
    try {
      recs = parse_trajectory_csv(read_file(p.string()));
    } catch (const std::exception& e) {
      throw UsageError(p.string() + ": " + e.what());
    }
    aggs.push_back(metrics::aggregate(recs));
  }
  if (aggs.empty())
    throw UsageError("no replication records under " + out_dir.string());

  std::string text = "recomputed summary for " + out_dir.string() + "\n";
  text += "rep       n  mean_tau_s  mean_delta_s  mean_sigma_mps"
          "  mean_sigma_kmh\n";
  char buf[256];
  double st = 0, sd = 0, ss = 0;
  size_t groups = 0;
  for (size_t k = 0; k < aggs.size(); ++k) {
    const auto& a = aggs[k];
    if (a.empty) {
      std::snprintf(buf, sizeof buf, "%3zu %7zu  %10s  %12s  %14s  %14s\n",
                    k, a.n, "-", "-", "-", "-");
    } else {
      std::snprintf(buf, sizeof buf,
                    "%3zu %7zu  %10.3f  %12.3f  %14.3f  %14.3f\n", k, a.n,
                    a.mean_tau_s, a.mean_delta_s, a.mean_sigma_mps,
                    metrics::mps_to_kmh(a.mean_sigma_mps));
      st += a.mean_tau_s;
      sd += a.mean_delta_s;
      ss += a.mean_sigma_mps;
      ++groups;
    }
    text += buf;
  }
  if (groups == 0) {
    text += "\noverall: no completed vehicles\n";
  } else {
    const double g = double(groups);
    std::snprintf(buf, sizeof buf,
                  "\noverall: mean tau = %.3f s, mean delta = %.3f s, "
                  "mean sigma = %.3f m/s (%.3f km/h)\n",
                  st / g, sd / g, ss / g, metrics::mps_to_kmh(ss / g));
    text += buf;
  }
  out << text;
  return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"three-road fork microsimulation toolkit"};
  app.name("forksim");
  app.require_subcommand(1);

  std::string scenario_path, observed_path, out_dir;
  std::vector<std::string> scenario_paths;
  std::vector<double> mults;
  std::optional<uint64_t> seed;
  std::optional<int> reps;
  std::optional<double> mult_override;
  uint64_t seed_raw = 0;
  int reps_raw = 0;
  double mult_raw = 0.0;

  CLI::App* c_run = app.add_subcommand("run", "run one scenario");
  c_run->add_option("--scenario", scenario_path, "scenario file")
      ->required();
  c_run->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* o_seed_run = c_run->add_option("--seed", seed_raw);
  CLI::Option* o_reps_run = c_run->add_option("--reps", reps_raw);
  CLI::Option* o_mult_run = c_run->add_option("--mult", mult_raw);

  CLI::App* c_cmp = app.add_subcommand("compare", "rank scenarios");
  c_cmp->add_option("--scenario", scenario_paths, "scenario files")
      ->required();
  c_cmp->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* o_seed_cmp = c_cmp->add_option("--seed", seed_raw);
  CLI::Option* o_reps_cmp = c_cmp->add_option("--reps", reps_raw);

  CLI::App* c_swp = app.add_subcommand("sweep", "demand sweep");
  c_swp->add_option("--scenario", scenario_path, "scenario file")
      ->required();
  c_swp->add_option("--out", out_dir, "output directory")->required();
  c_swp->add_option("--mult", mults, "volume multipliers")
      ->required()
      ->delimiter(',');
  CLI::Option* o_seed_swp = c_swp->add_option("--seed", seed_raw);
  CLI::Option* o_reps_swp = c_swp->add_option("--reps", reps_raw);

  CLI::App* c_val = app.add_subcommand("validate", "test against field data");
  c_val->add_option("--scenario", scenario_path, "scenario file")
      ->required();
  c_val->add_option("--observed", observed_path, "observed tau csv")
      ->required();
  CLI::Option* o_out_val = c_val->add_option("--out", out_dir);
  CLI::Option* o_seed_val = c_val->add_option("--seed", seed_raw);
  CLI::Option* o_reps_val = c_val->add_option("--reps", reps_raw);

  CLI::App* c_rep = app.add_subcommand("report", "reprint a run summary");
  c_rep->add_option("--out", out_dir, "existing output directory")
      ->required();

  std::vector<const char*> argv;
  argv.push_back("forksim");
  for (const auto& a : args)
    argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (o_seed_run->count() || o_seed_cmp->count() || o_seed_swp->count() ||
      o_seed_val->count())
    seed = seed_raw;
  if (o_reps_run->count() || o_reps_cmp->count() || o_reps_swp->count() ||
      o_reps_val->count())
    reps = reps_raw;
  if (o_mult_run->count())
    mult_override = mult_raw;

  try {
    if (c_run->parsed())
      return cmd_run(load_scenario(scenario_path, seed, reps, mult_override),
                     out_dir, out);
    if (c_cmp->parsed())
      return cmd_compare(scenario_paths, seed, reps, out_dir, out);
    if (c_swp->parsed())
      return cmd_sweep(load_scenario(scenario_path, seed, reps, {}), mults,
                       out_dir, out);
    if (c_val->parsed()) {
      std::optional<fs::path> od;
      if (o_out_val->count())
        od = fs::path(out_dir);
      return cmd_validate(load_scenario(scenario_path, seed, reps, {}),
                          observed_path, od, out);
    }
    if (c_rep->parsed())
      return cmd_report(out_dir, out);
    err << "error: no command given\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const OverlapFault& e) {
    err << "fault: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "fault: " << e.what() << "\n";
    return 3;
  }
}

} // namespace forksim
