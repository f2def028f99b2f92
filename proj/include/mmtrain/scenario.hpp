#ifndef MMTRAIN_SCENARIO_HPP
#define MMTRAIN_SCENARIO_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mmtrain/coalition.hpp"
#include "mmtrain/errors.hpp"
#include "mmtrain/link_model.hpp"

namespace mmtrain {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct ScenarioConfig {
  double area_width_m = 300.0;
  double area_height_m = 300.0;
  std::size_t flow_count = 10;
  std::int64_t slots_per_frame = 2048;
  double qos_min_bps = 50e6;
  double qos_max_bps = 500e6;
  RadioConfig radio{};
  // BS on the track line at the left edge, MR displaced 150 m along it.
  Vec2 bs_position{0.0, 150.0};
  Vec2 mr_position{150.0, 150.0};
  double blockage_probability = 0.0;
  std::uint64_t seed = 1;
  /// Shorter links are clamped to this length.
  double min_distance_m = 1.0;
  /// Fixed user layout instead of a random draw.
  std::optional<std::vector<Vec2>> user_positions;
  /// Fixed per-flow QoS instead of a random draw.
  std::optional<std::vector<double>> qos_values_bps;

  std::vector<std::string> violations() const {
    std::vector<std::string> v = radio.violations();
    auto inside = [&](Vec2 p) { return p.x >= 0.0 && p.x <= area_width_m && p.y >= 0.0 && p.y <= area_height_m; };
    if (!(area_width_m > 0.0) || !(area_height_m > 0.0)) v.push_back("area dimensions must be positive");
    if (slots_per_frame < 1) v.push_back("slots_per_frame must be at least 1");
    if (!(qos_min_bps >= 0.0)) v.push_back("qos_min_bps must be non-negative");
    if (!(qos_max_bps >= qos_min_bps)) v.push_back("qos_max_bps must be >= qos_min_bps");
    if (!(blockage_probability >= 0.0 && blockage_probability <= 1.0)) {
      v.push_back("blockage_probability must lie in [0, 1]");
    }
    if (!(min_distance_m > 0.0)) v.push_back("min_distance_m must be positive");
    if (!inside(bs_position)) v.push_back("bs position lies outside the area");
    if (!inside(mr_position)) v.push_back("mr position lies outside the area");
    if (user_positions) {
      if (user_positions->size() != flow_count) v.push_back("user_positions count must equal flow_count");
      for (std::size_t i = 0; i < user_positions->size(); ++i) {
        if (!inside((*user_positions)[i])) v.push_back("user " + std::to_string(i) + " lies outside the area");
      }
    }
    if (qos_values_bps) {
      if (qos_values_bps->size() != flow_count) v.push_back("qos_values_bps count must equal flow_count");
      for (double q : *qos_values_bps)
        if (!(q >= 0.0)) {
          v.push_back("qos_values_bps entries must be non-negative");
          break;
        }
    }
    return v;
  }

  void validate() const {
    if (auto v = violations(); !v.empty()) throw validation_error(std::move(v));
  }
};

enum class Association : std::uint8_t { unset, bs, mr };

struct Flow {
  FlowId id = 0;
  double qos_bps = 0.0;
  std::size_t user_index = 0;
  Association association = Association::unset;

  friend bool operator==(const Flow&, const Flow&) = default;
};

/// Immutable snapshot: node layout, flows and radio parameters.
class Scenario {
public:
  Scenario(ScenarioConfig config, std::vector<Vec2> users, std::vector<Flow> flows)
      : config_(std::move(config)), users_(std::move(users)), flows_(std::move(flows)) {}

  const ScenarioConfig& config() const noexcept { return config_; }
  const RadioConfig& radio() const noexcept { return config_.radio; }
  Vec2 bs_position() const noexcept { return config_.bs_position; }
  Vec2 mr_position() const noexcept { return config_.mr_position; }
  const std::vector<Vec2>& user_positions() const noexcept { return users_; }
  const std::vector<Flow>& flows() const noexcept { return flows_; }
  std::size_t flow_count() const noexcept { return flows_.size(); }
  std::int64_t slots_per_frame() const noexcept { return config_.slots_per_frame; }
  double blockage_probability() const noexcept { return config_.blockage_probability; }
  std::uint64_t seed() const noexcept { return config_.seed; }

private:
  ScenarioConfig config_;
  std::vector<Vec2> users_;
  std::vector<Flow> flows_;
};

namespace detail {

/// Engine for one named random stream of a run. mt19937_64 and seed_seq are
/// fully specified, so streams are identical on every platform.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

/// Uniform in [lo, hi) from the top 53 bits of one draw.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline constexpr std::uint32_t layout_stream = 1;
inline constexpr std::uint32_t partition_stream = 2;

}  // namespace detail

/// Users i.i.d. uniform over the area, QoS uniform over [qos_min, qos_max].
/// `seed` overrides config.seed.
inline Scenario generate_scenario(ScenarioConfig config, std::uint64_t seed) {
  config.seed = seed;
  config.validate();
  auto rng = detail::stream_engine(seed, detail::layout_stream);

  std::vector<Vec2> users;
  if (config.user_positions) {
    users = *config.user_positions;
  } else {
    users.reserve(config.flow_count);
    for (std::size_t i = 0; i < config.flow_count; ++i) {
      const double x = detail::uniform(rng, 0.0, config.area_width_m);
      const double y = detail::uniform(rng, 0.0, config.area_height_m);
      users.push_back({x, y});
    }
  }

  std::vector<Flow> flows;
  flows.reserve(config.flow_count);
  for (std::size_t i = 0; i < config.flow_count; ++i) {
    const double q = config.qos_values_bps ? (*config.qos_values_bps)[i]
                                           : detail::uniform(rng, config.qos_min_bps, config.qos_max_bps);
    flows.push_back({i, q, i, Association::unset});
  }
  return Scenario(std::move(config), std::move(users), std::move(flows));
}

inline Scenario generate_scenario(const ScenarioConfig& config) { return generate_scenario(config, config.seed); }

enum class RelayMode : std::uint8_t { full_duplex, half_duplex };

/// Per-flow link rates (bits/s) for both association choices.
struct FlowRates {
  std::vector<double> bs_direct;
  std::vector<double> bs_to_mr;     // FD hop into the relay, with residual SI
  std::vector<double> mr_to_user;   // FD hop out of the relay, with residual SI
  std::vector<double> mr_fd;        // min of the two FD hops
  std::vector<double> mr_hd;        // time-shared SI-free hops
  std::vector<std::string> warnings;

  RateTable table(RelayMode mode) const { return {bs_direct, mode == RelayMode::full_duplex ? mr_fd : mr_hd}; }
};

/// Direct BS links use a*W; relayed links use b*W. Every antenna points at
/// boresight, so both ends see the peak gain.
inline FlowRates flow_rates(const Scenario& s) {
  const RadioConfig& r = s.radio();
  const double g = r.antenna().max_gain_db();
  const double bw_bs = r.bs_bandwidth_hz();
  const double bw_mr = r.mr_bandwidth_hz();
  const double min_d = s.config().min_distance_m;
  FlowRates out;

  auto link_length = [&](Vec2 a, Vec2 b, const std::string& what) {
    const double d = distance(a, b);
    if (d < min_d) {
      out.warnings.push_back(what + " length " + std::to_string(d) + " m clamped to " + std::to_string(min_d) + " m");
      return min_d;
    }
    return d;
  };
  auto power = [&](double d) { return received_power(r.tx_power_w, {d, g, g}, r); };
  // A zero share leaves that side without spectrum: its rate is 0.
  auto hd = [&](double p, double bw) { return bw > 0.0 ? rate_hd(p, bw, r) : 0.0; };
  auto fd = [&](double p, double bw) { return bw > 0.0 ? rate_fd(p, bw, r.tx_power_w, r) : 0.0; };

  const double backhaul = link_length(s.bs_position(), s.mr_position(), "BS-MR link");
  const double p_backhaul = power(backhaul);
  const double hop1_fd = fd(p_backhaul, bw_mr);
  const double hop1_hd = hd(p_backhaul, bw_mr);

  for (const auto& flow : s.flows()) {
    const Vec2 u = s.user_positions()[flow.user_index];
    const std::string tag = "flow " + std::to_string(flow.id);
    const double p_direct = power(link_length(s.bs_position(), u, tag + " BS-user link"));
    const double p_access = power(link_length(s.mr_position(), u, tag + " MR-user link"));

    const double hop2_fd = fd(p_access, bw_mr);
    out.bs_direct.push_back(hd(p_direct, bw_bs));
    out.bs_to_mr.push_back(hop1_fd);
    out.mr_to_user.push_back(hop2_fd);
    out.mr_fd.push_back(two_hop_rate_fd(hop1_fd, hop2_fd));
    out.mr_hd.push_back(two_hop_rate_hd(hop1_hd, hd(p_access, bw_mr)));
  }
  return out;
}

enum class Policy : std::uint8_t { cg_fd, cg_hd, fbsc, fmrc, oracle };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::cg_fd: return "CG_FD";
    case Policy::cg_hd: return "CG_HD";
    case Policy::fbsc: return "FBSC";
    case Policy::fmrc: return "FMRC";
    case Policy::oracle: return "ORACLE";
  }
  return "?";
}

inline std::optional<Policy> parse_policy(std::string_view name) {
  for (Policy p : {Policy::cg_fd, Policy::cg_hd, Policy::fbsc, Policy::fmrc, Policy::oracle}) {
    std::string canon = to_string(p);
    std::string alt = canon;
    for (auto& c : alt) c = c == '_' ? '-' : c;
    std::string given(name);
    for (auto& c : given) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (given == canon || given == alt) return p;
  }
  return std::nullopt;
}

struct AssociationResult {
  Policy policy = Policy::cg_fd;
  Partition partition;
  /// Rates the policy optimised over (HD relay rates for CG_HD).
  RateTable rates;
  double sum_rate = 0.0;
  std::size_t switch_count = 0;
  std::size_t pass_count = 0;
  std::vector<double> rate_trajectory;

  /// Rate of each flow on its assigned side.
  std::vector<double> assigned_rates() const {
    std::vector<double> out(partition.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rates.rate(i, partition.side(i));
    return out;
  }
};

/// Initial partition of the coalition game for this scenario's seed. Both
/// CG variants start from the same draw.
inline Partition initial_partition(const Scenario& s) {
  auto rng = detail::stream_engine(s.seed(), detail::partition_stream);
  return random_partition(s.flow_count(), rng);
}

inline AssociationResult associate(const Scenario& s, const FlowRates& rates, Policy policy) {
  AssociationResult res;
  res.policy = policy;
  const std::size_t n = s.flow_count();
  switch (policy) {
    case Policy::fbsc:
    case Policy::fmrc:
      res.rates = rates.table(RelayMode::full_duplex);
      res.partition = Partition(n, policy == Policy::fbsc ? Side::bs : Side::mr);
      res.sum_rate = total_rate(res.partition, res.rates);
      res.pass_count = 0;
      break;
    case Policy::cg_fd:
    case Policy::cg_hd: {
      res.rates = rates.table(policy == Policy::cg_fd ? RelayMode::full_duplex : RelayMode::half_duplex);
      auto game = form_coalitions(res.rates, initial_partition(s));
      res.partition = std::move(game.final_partition);
      res.sum_rate = game.sum_rate;
      res.switch_count = game.switch_count;
      res.pass_count = game.pass_count;
      res.rate_trajectory = std::move(game.rate_trajectory);
      break;
    }
    case Policy::oracle: {
      res.rates = rates.table(RelayMode::full_duplex);
      auto best = exhaustive_optimum(res.rates);
      res.partition = std::move(best.partition);
      res.sum_rate = best.sum_rate;
      break;
    }
  }
  return res;
}

/// Copy of the scenario's flows with the association of `p` recorded.
inline std::vector<Flow> associated_flows(const Scenario& s, const Partition& p) {
  auto flows = s.flows();
  for (auto& f : flows) f.association = p.side(f.id) == Side::bs ? Association::bs : Association::mr;
  return flows;
}

inline AssociationResult associate_baseline(const Scenario& s, Policy policy) {
  return associate(s, flow_rates(s), policy);
}

}  // namespace mmtrain

#endif  // MMTRAIN_SCENARIO_HPP
