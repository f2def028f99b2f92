#ifndef MMTRAIN_EXPERIMENT_HPP
#define MMTRAIN_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtrain/coalition.hpp"
#include "mmtrain/errors.hpp"
#include "mmtrain/scenario.hpp"
#include "mmtrain/scheduler.hpp"
#include "mmtrain/units.hpp"

// End-to-end runs: scenario -> association -> slot demands -> greedy
// schedule -> metrics, and factorial sweeps over one parameter.
namespace mmtrain {

enum class SweepParameter : std::uint8_t { si_level_db, bs_share, mr_displacement, tx_power_dbm, flow_count, slots };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::si_level_db: return "si_level_db";
    case SweepParameter::bs_share: return "bs_share";
    case SweepParameter::mr_displacement: return "mr_displacement";
    case SweepParameter::tx_power_dbm: return "tx_power_dbm";
    case SweepParameter::flow_count: return "flow_count";
    case SweepParameter::slots: return "slots";
  }
  return "?";
}

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  static const std::map<std::string, SweepParameter, std::less<>> names = {
      {"si_level_db", SweepParameter::si_level_db},   {"beta", SweepParameter::si_level_db},
      {"bs_share", SweepParameter::bs_share},         {"a", SweepParameter::bs_share},
      {"mr_displacement", SweepParameter::mr_displacement}, {"displacement", SweepParameter::mr_displacement},
      {"tx_power_dbm", SweepParameter::tx_power_dbm}, {"tx_power", SweepParameter::tx_power_dbm},
      {"flow_count", SweepParameter::flow_count},     {"n", SweepParameter::flow_count},
      {"slots", SweepParameter::slots},               {"m", SweepParameter::slots},
  };
  auto it = names.find(name);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

/// Default axis values for each sweep parameter.
inline std::vector<double> default_sweep_values(SweepParameter p) {
  auto range = [](double lo, double hi, double step) {
    std::vector<double> v;
    const auto n = static_cast<int>(std::llround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
    return v;
  };
  switch (p) {
    case SweepParameter::si_level_db: return range(-150, -110, 5);
    case SweepParameter::bs_share: {
      std::vector<double> v;
      for (int i = 1; i <= 9; ++i) v.push_back(i / 10.0);
      return v;
    }
    case SweepParameter::mr_displacement: return range(0, 300, 25);
    case SweepParameter::tx_power_dbm: return range(10, 40, 5);
    case SweepParameter::flow_count: return range(20, 55, 5);
    case SweepParameter::slots: return {256, 512, 1024, 2048, 4096, 8192};
  }
  return {};
}

/// Config with one parameter overridden. The MR stays on the BS track line.
inline ScenarioConfig apply_parameter(ScenarioConfig c, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::si_level_db: c.radio.si_level = units::from_db(value); break;
    case SweepParameter::bs_share:
      c.radio.bs_share = value;
      c.radio.mr_share = 1.0 - value;
      break;
    case SweepParameter::mr_displacement: c.mr_position = {c.bs_position.x + value, c.bs_position.y}; break;
    case SweepParameter::tx_power_dbm: c.radio.tx_power_w = units::dbm_to_watts(value); break;
    case SweepParameter::flow_count:
      if (!(value >= 0.0) || value != std::floor(value)) throw validation_error({"flow_count must be a whole number"});
      c.flow_count = static_cast<std::size_t>(value);
      break;
    case SweepParameter::slots:
      if (!(value >= 1.0) || value != std::floor(value)) throw validation_error({"slots must be a whole number >= 1"});
      c.slots_per_frame = static_cast<std::int64_t>(value);
      break;
  }
  return c;
}

struct RunRecord {
  std::string policy;
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  double sum_rate_bps = 0.0;
  std::size_t satisfied = 0;
  double expected_satisfied = 0.0;
  std::size_t switch_count = 0;
  double wall_time_s = 0.0;

  /// Equality on everything except the wall clock.
  bool same_outcome(const RunRecord& o) const {
    return std::tie(policy, parameter, value, seed, sum_rate_bps, satisfied, expected_satisfied, switch_count) ==
           std::tie(o.policy, o.parameter, o.value, o.seed, o.sum_rate_bps, o.satisfied, o.expected_satisfied,
                    o.switch_count);
  }

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunOptions {
  ScheduleOptions schedule{};
};

/// Everything one run produced, for callers that need more than the record.
struct RunDetail {
  RunRecord record;
  AssociationResult association;
  std::vector<SlotDemand> demands;
  Schedule schedule;
};

inline RunDetail run_detailed(const ScenarioConfig& config, Policy policy, std::uint64_t seed, RunOptions opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = generate_scenario(config, seed);
  RunDetail d;
  d.association = associate(s, flow_rates(s), policy);

  const auto rates = d.association.assigned_rates();
  for (const auto& f : s.flows()) d.demands.push_back(slot_demand(f.qos_bps, rates[f.id], s.slots_per_frame(), f.id));
  d.schedule = schedule_greedy(d.demands, s.slots_per_frame(), opts.schedule);

  RunRecord& r = d.record;
  r.policy = to_string(policy);
  r.seed = seed;
  r.sum_rate_bps = d.association.sum_rate;
  r.satisfied = d.schedule.satisfied_count();
  r.expected_satisfied = objective_value(d.schedule, s.blockage_probability());
  r.switch_count = d.association.switch_count;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return d;
}

inline RunRecord run_single(const ScenarioConfig& config, Policy policy, std::uint64_t seed, RunOptions opts = {}) {
  return run_detailed(config, policy, seed, opts).record;
}

struct SweepSpec {
  ScenarioConfig base{};
  SweepParameter parameter = SweepParameter::si_level_db;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<Policy> policies;
  RunOptions options{};
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
  return s;
}

struct SweepResult {
  std::vector<RunRecord> raw;
  /// Arithmetic mean over seeds per (policy, value); `seed` holds the seed count.
  std::vector<RunRecord> means;

  /// Mean row for a (policy, value) pair.
  const RunRecord& mean(Policy p, double value) const {
    for (const auto& m : means)
      if (m.policy == to_string(p) && m.value == value) return m;
    throw lookup_error(std::string("no aggregate for ") + to_string(p));
  }
};

/// Refuses a sweep before doing any work if it is malformed or would run the
/// exhaustive oracle beyond its cap.
inline void check_sweep(const SweepSpec& spec) {
  std::vector<std::string> v;
  if (spec.values.empty()) v.push_back("sweep needs at least one value");
  if (spec.seeds.empty()) v.push_back("sweep needs at least one seed");
  if (spec.policies.empty()) v.push_back("sweep needs at least one policy");
  if (!v.empty()) throw validation_error(std::move(v));
  for (double value : spec.values) apply_parameter(spec.base, spec.parameter, value).validate();

  if (std::find(spec.policies.begin(), spec.policies.end(), Policy::oracle) != spec.policies.end()) {
    std::size_t max_n = spec.base.flow_count;
    if (spec.parameter == SweepParameter::flow_count)
      for (double value : spec.values) max_n = std::max(max_n, static_cast<std::size_t>(value));
    if (max_n > default_enumeration_cap) {
      throw resource_cap_error("ORACLE policy requested with " + std::to_string(max_n) + " flows",
                               default_enumeration_cap);
    }
  }
}

inline std::vector<RunRecord> aggregate_means(const std::vector<RunRecord>& raw) {
  std::vector<RunRecord> means;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    RunRecord m;
    m.policy = raw[i].policy;
    m.parameter = raw[i].parameter;
    m.value = raw[i].value;
    double sum_rate = 0, sat = 0, exp_sat = 0, sw = 0, wall = 0;
    while (j < raw.size() && raw[j].policy == m.policy && raw[j].value == m.value) {
      sum_rate += raw[j].sum_rate_bps;
      sat += static_cast<double>(raw[j].satisfied);
      exp_sat += raw[j].expected_satisfied;
      sw += static_cast<double>(raw[j].switch_count);
      wall += raw[j].wall_time_s;
      ++j;
    }
    const double n = static_cast<double>(j - i);
    m.seed = j - i;
    m.sum_rate_bps = sum_rate / n;
    // Integer columns keep the rounded mean; the exact means go in the JSON summary.
    m.satisfied = static_cast<std::size_t>(std::llround(sat / n));
    m.expected_satisfied = exp_sat / n;
    m.switch_count = static_cast<std::size_t>(std::llround(sw / n));
    m.wall_time_s = wall / n;
    means.push_back(m);
    i = j;
  }
  return means;
}

/// Full factorial over values x seeds x policies. Runs are spread over
/// threads; output order is (policy, value, seed) whatever the schedule was.
/// All policies see the same scenario for a given seed and value.
inline SweepResult run_sweep(const SweepSpec& spec) {
  check_sweep(spec);
  struct Job {
    std::size_t policy;
    std::size_t value;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < spec.policies.size(); ++p)
    for (std::size_t v = 0; v < spec.values.size(); ++v)
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) jobs.push_back({p, v, s});

  std::vector<ScenarioConfig> configs;
  for (double value : spec.values) configs.push_back(apply_parameter(spec.base, spec.parameter, value));

  std::vector<RunRecord> raw(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size() && !failed; k = next++) {
      try {
        const Job& j = jobs[k];
        RunRecord r = run_single(configs[j.value], spec.policies[j.policy], spec.seeds[j.seed], spec.options);
        r.parameter = to_string(spec.parameter);
        r.value = spec.values[j.value];
        raw[k] = std::move(r);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(raw.begin(), raw.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.policy, a.value, a.seed) < std::tie(b.policy, b.value, b.seed);
  });
  SweepResult out;
  out.means = aggregate_means(raw);
  out.raw = std::move(raw);
  return out;
}

/// (CG_FD - X) / X on per-value means.
inline double percentage_gap(double cg_fd_mean, double other_mean) {
  return 100.0 * (cg_fd_mean - other_mean) / other_mean;
}

// ---- export ---------------------------------------------------------------

enum class ExportFormat : std::uint8_t { csv, json };

inline constexpr const char* csv_header =
    "policy,parameter,value,seed,sum_rate_bps,satisfied,expected_satisfied,switch_count,wall_time_s";

inline std::string format_double(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

inline void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << csv_header << "\n";
  for (const auto& r : records) {
    out << r.policy << ',' << r.parameter << ',' << format_double(r.value) << ',' << r.seed << ','
        << format_double(r.sum_rate_bps) << ',' << r.satisfied << ',' << format_double(r.expected_satisfied) << ','
        << r.switch_count << ',' << format_double(r.wall_time_s) << "\n";
  }
}

inline nlohmann::json to_json(const RunRecord& r) {
  return {{"policy", r.policy},
          {"parameter", r.parameter},
          {"value", r.value},
          {"seed", r.seed},
          {"sum_rate_bps", r.sum_rate_bps},
          {"satisfied", r.satisfied},
          {"expected_satisfied", r.expected_satisfied},
          {"switch_count", r.switch_count},
          {"wall_time_s", r.wall_time_s}};
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.policy = j.at("policy").get<std::string>();
  r.parameter = j.at("parameter").get<std::string>();
  r.value = j.at("value").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.sum_rate_bps = j.at("sum_rate_bps").get<double>();
  r.satisfied = j.at("satisfied").get<std::size_t>();
  r.expected_satisfied = j.at("expected_satisfied").get<double>();
  r.switch_count = j.at("switch_count").get<std::size_t>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

/// nlohmann::json prints doubles in shortest round-trip form, which parses
/// back to the identical value.
inline void write_json(std::ostream& out, const std::vector<RunRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  out << arr.dump(2) << "\n";
}

inline void write_records(std::ostream& out, const std::vector<RunRecord>& records, ExportFormat fmt) {
  if (fmt == ExportFormat::csv)
    write_csv(out, records);
  else
    write_json(out, records);
}

/// Writes records to `path`. Throws std::ios_base::failure when the file
/// cannot be written.
inline void export_records(const std::vector<RunRecord>& records, ExportFormat fmt, const std::string& path) {
  if (records.empty()) throw validation_error({"nothing to export: no records"});
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_records(out, records, fmt);
  out.flush();
  if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

}  // namespace mmtrain

#endif  // MMTRAIN_EXPERIMENT_HPP
