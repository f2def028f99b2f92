#ifndef MMTRAIN_TOOLS_CLI_HPP
#define MMTRAIN_TOOLS_CLI_HPP

#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmtrain/mmtrain.hpp"

namespace mmtrain::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_refused = 2;

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::size_t seeds = 100;
  std::string policy;
  std::string param = "si_level_db";
  std::string values;
  std::string format;
  std::string out;
  std::string summary;
  bool no_sort = false;
  unsigned threads = 0;
};

/// "v1,v2,..." or "lo:hi:step".
inline std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw validation_error({"--values range must be lo:hi:step"});
    const double lo = detail::parse_double(parts[0]);
    const double hi = detail::parse_double(parts[1]);
    const double step = detail::parse_double(parts[2]);
    if (!(step > 0.0) || hi < lo) throw validation_error({"--values range needs step > 0 and hi >= lo"});
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
  }
  for (const auto& t : detail::split(text, ',')) {
    try {
      out.push_back(detail::parse_double(t));
    } catch (const std::invalid_argument& e) {
      throw validation_error({std::string("--values: ") + e.what()});
    }
  }
  return out;
}

inline std::vector<Policy> parse_policies(const std::string& text) {
  std::vector<Policy> out;
  std::vector<std::string> bad;
  for (const auto& t : detail::split(text, ',')) {
    if (auto p = parse_policy(t))
      out.push_back(*p);
    else
      bad.push_back("unknown policy '" + t + "'");
  }
  if (!bad.empty()) throw validation_error(std::move(bad));
  return out;
}

inline ExportFormat parse_format(const std::string& text, ExportFormat fallback) {
  if (text.empty()) return fallback;
  if (text == "csv") return ExportFormat::csv;
  if (text == "json") return ExportFormat::json;
  throw validation_error({"--format must be csv or json"});
}

inline ScenarioConfig base_config(const Options& o) {
  ScenarioConfig c = o.config_path.empty() ? ScenarioConfig{} : load_config(o.config_path);
  if (o.seed_given) c.seed = o.seed;
  return c;
}

/// Sends text to --out when given, stdout otherwise.
inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw std::ios_base::failure("cannot open '" + o.out + "' for writing");
  f << text;
  if (!f.flush()) throw std::ios_base::failure("write to '" + o.out + "' failed");
}

inline int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = base_config(o);
  const Policy policy = o.policy.empty() ? Policy::cg_fd : parse_policies(o.policy).at(0);
  if (policy == Policy::oracle && config.flow_count > default_enumeration_cap) {
    throw resource_cap_error("ORACLE policy requested with " + std::to_string(config.flow_count) + " flows",
                             default_enumeration_cap);
  }
  RunOptions opts;
  opts.schedule.sort_by_demand = !o.no_sort;
  const auto d = run_detailed(config, policy, config.seed, opts);
  for (const auto& w : flow_rates(generate_scenario(config)).warnings) err << "warning: " << w << "\n";

  std::ostringstream text;
  if (parse_format(o.format, ExportFormat::json) == ExportFormat::csv) {
    write_csv(text, {d.record});
  } else {
    nlohmann::json doc;
    doc["record"] = to_json(d.record);
    doc["association"] = {{"bs", d.association.partition.bs_coalition()},
                          {"mr", d.association.partition.mr_coalition()},
                          {"pass_count", d.association.pass_count}};
    nlohmann::json demands = nlohmann::json::array();
    for (const auto& dm : d.demands) {
      demands.push_back({{"flow_id", dm.flow_id},
                         {"rate_bps", dm.rate},
                         {"qos_bps", dm.qos},
                         {"required_slots", dm.required_slots ? nlohmann::json(*dm.required_slots) : nlohmann::json()}});
    }
    doc["demands"] = std::move(demands);
    doc["schedule"] = to_json(d.schedule);
    text << doc.dump(2) << "\n";
  }
  emit(o, out, text.str());
  return exit_ok;
}

inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  spec.base = base_config(o);
  auto param = parse_sweep_parameter(o.param);
  if (!param) throw validation_error({"unknown --param '" + o.param + "'"});
  spec.parameter = *param;
  spec.values = o.values.empty() ? default_sweep_values(*param) : parse_values(o.values);
  spec.seeds = seed_range(spec.base.seed, o.seeds);
  spec.policies = parse_policies(o.policy.empty() ? "CG_FD,CG_HD,FBSC,FMRC" : o.policy);
  spec.options.schedule.sort_by_demand = !o.no_sort;
  spec.threads = o.threads;
  const ExportFormat fmt = parse_format(o.format, ExportFormat::csv);

  const auto result = run_sweep(spec);
  std::ostringstream raw;
  write_records(raw, result.raw, fmt);
  emit(o, out, raw.str());
  if (!o.summary.empty()) export_records(result.means, fmt, o.summary);

  // Human-readable digest goes to stderr so stdout stays machine-readable.
  err << "mean sum rate (Gbit/s) by " << to_string(spec.parameter) << " over " << spec.seeds.size() << " seeds\n";
  err << std::setw(12) << "value";
  for (Policy p : spec.policies) err << std::setw(10) << to_string(p);
  err << "\n";
  for (double v : spec.values) {
    err << std::setw(12) << v;
    for (Policy p : spec.policies) err << std::setw(10) << std::fixed << std::setprecision(3) << result.mean(p, v).sum_rate_bps / 1e9;
    err << std::defaultfloat << std::setprecision(6) << "\n";
    if (std::find(spec.policies.begin(), spec.policies.end(), Policy::cg_fd) != spec.policies.end()) {
      const double fd = result.mean(Policy::cg_fd, v).sum_rate_bps;
      err << std::setw(12) << "CG_FD gap";
      for (Policy p : spec.policies) {
        const double other = result.mean(p, v).sum_rate_bps;
        if (p == Policy::cg_fd || other <= 0.0)
          err << std::setw(10) << "-";
        else
          err << std::setw(9) << std::fixed << std::setprecision(1) << percentage_gap(fd, other) << "%";
      }
      err << std::defaultfloat << std::setprecision(6) << "\n";
    }
  }
  return exit_ok;
}

/// Fixed demands of the five-flow superframe example: A..E need 8, 3, 1, 2, 4 slots of 10.
inline std::vector<SlotDemand> golden_demands() {
  const std::vector<SlotCount> need = {8, 3, 1, 2, 4};
  std::vector<SlotDemand> d;
  for (std::size_t i = 0; i < need.size(); ++i) {
    // Rate 10 and QoS equal to the slot count reproduce the demand exactly.
    d.push_back(slot_demand(static_cast<double>(need[i]), 10.0, 10, i));
  }
  return d;
}

inline int cmd_fixture(const Options& o, std::ostream& out, std::ostream&) {
  const auto demands = golden_demands();
  const auto sorted = schedule_greedy(demands, 10);
  const auto unsorted = schedule_greedy(demands, 10, {.sort_by_demand = false});
  nlohmann::json doc;
  doc["flow_names"] = {"A", "B", "C", "D", "E"};
  doc["sorted"] = to_json(sorted);
  doc["unsorted"] = to_json(unsorted);
  doc["oracle_max"] = schedule_oracle(demands, 10);
  const bool ok = sorted.satisfied_count() == 4 && unsorted.satisfied_count() == 1;
  doc["pass"] = ok;
  emit(o, out, doc.dump(2) + "\n");
  return ok ? exit_ok : exit_invalid;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream&) {
  const std::size_t instances = o.seeds;
  std::mt19937_64 rng(o.seed);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all_ok = all_ok && ok;
  };

  {  // greedy vs brute-force subset search
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < instances; ++k) {
      const std::size_t n = 1 + rng() % 16;
      const SlotCount m = 1 + static_cast<SlotCount>(rng() % 64);
      std::vector<SlotDemand> d;
      for (std::size_t i = 0; i < n; ++i) d.push_back(slot_demand(u01() * 2e8, 1e9, m, i));
      if (schedule_greedy(d, m).satisfied_count() != schedule_oracle(d, m)) ++mismatches;
    }
    report("scheduler-exactness", mismatches == 0, std::to_string(mismatches) + " mismatches");
  }

  ScenarioConfig base = base_config(o);
  {  // coalition game vs exhaustive optimum, Nash stability
    std::size_t worse = 0, unstable = 0, above = 0;
    for (std::size_t k = 0; k < instances; ++k) {
      ScenarioConfig c = base;
      c.flow_count = 1 + k % 8;
      const Scenario s = generate_scenario(c, o.seed + k);
      const auto rates = flow_rates(s).table(RelayMode::full_duplex);
      const auto game = form_coalitions(rates, initial_partition(s));
      const auto best = exhaustive_optimum(rates);
      if (game.sum_rate > best.sum_rate) ++above;
      if (game.sum_rate < 0.98 * best.sum_rate) ++worse;
      if (!is_nash_stable(game.final_partition, rates)) ++unstable;
    }
    report("coalition-vs-exhaustive", above == 0 && worse * 20 <= instances,
           std::to_string(worse) + " below 98% of optimum, " + std::to_string(above) + " above optimum");
    report("nash-stability", unstable == 0, std::to_string(unstable) + " unstable outcomes");
  }

  {  // link model identities
    RadioConfig r;
    std::size_t bad = 0;
    for (std::size_t k = 0; k < instances; ++k) {
      const double p = std::pow(10.0, -14 + 6 * u01());
      const double bw = 1e8 + 1e9 * u01();
      RadioConfig z = r;
      z.si_level = 0.0;
      const double a = rate_fd(p, bw, 1.0, z), b = rate_hd(p, bw, z);
      if (std::abs(a - b) > 1e-12 * std::abs(b)) ++bad;
    }
    report("fd-hd-si-free-limit", bad == 0, std::to_string(bad) + " mismatches");
  }
  return all_ok ? exit_ok : exit_invalid;
}

/// Parses argv and dispatches. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"mm-wave train-ground association and scheduling experiments"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "scenario config file (key = value)");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { o.seed = s; o.seed_given = true; }, "scenario seed (first seed for sweeps)");
    sub->add_option("--format", o.format, "csv or json");
    sub->add_option("--out", o.out, "output file (default stdout)");
  };

  auto* run = app.add_subcommand("run", "single end-to-end run");
  common(run);
  run->add_option("--policy", o.policy, "CG_FD, CG_HD, FBSC, FMRC or ORACLE");
  run->add_flag("--no-sort", o.no_sort, "schedule in flow-id order");

  auto* sweep = app.add_subcommand("sweep", "factorial sweep over one parameter");
  common(sweep);
  sweep->add_option("--param", o.param, "si_level_db, bs_share, mr_displacement, tx_power_dbm, flow_count or slots");
  sweep->add_option("--values", o.values, "comma list or lo:hi:step (default: built-in axis)");
  sweep->add_option("--seeds", o.seeds, "number of seeds per point");
  sweep->add_option("--policy", o.policy, "comma-separated policies");
  sweep->add_option("--summary", o.summary, "write per-(policy, value) means to this file");
  sweep->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  sweep->add_flag("--no-sort", o.no_sort, "schedule in flow-id order");

  auto* verify = app.add_subcommand("verify", "oracle and property checks");
  verify->add_option("--config", o.config_path, "scenario config file");
  verify->add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { o.seed = s; o.seed_given = true; }, "base seed");
  verify->add_option("--seeds", o.seeds, "number of random instances per check");

  auto* fixture = app.add_subcommand("fixture", "five-flow superframe golden case");
  fixture->add_option("--out", o.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (*run) return cmd_run(o, out, err);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*verify) return cmd_verify(o, out, err);
    if (*fixture) return cmd_fixture(o, out, err);
  } catch (const resource_cap_error& e) {
    err << "refused: " << e.what() << "\n";
    return exit_refused;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  }
  return exit_invalid;
}

}  // namespace mmtrain::cli

#endif  // MMTRAIN_TOOLS_CLI_HPP
