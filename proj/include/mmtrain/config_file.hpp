#ifndef MMTRAIN_CONFIG_FILE_HPP
#define MMTRAIN_CONFIG_FILE_HPP

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mmtrain/errors.hpp"
#include "mmtrain/scenario.hpp"
#include "mmtrain/units.hpp"

// Flat key = value scenario files.
//
//   # comment
//   flow_count = 10
//   tx_power_dbm = 30
//   user_positions = 10,20; 30,40
//
// Keys not listed in config_keys() are rejected, as are duplicates. Radio
// quantities accept either a linear key or its dB/dBm twin; giving both is an
// error. Unset keys keep the defaults of ScenarioConfig.
namespace mmtrain {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + text + "' is not a number");
  }
  if (trim(std::string_view(text).substr(used)).size() != 0) throw std::invalid_argument("'" + text + "' is not a number");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("'" + text + "' is not a non-negative integer");
  }
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline Vec2 parse_point(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2) throw std::invalid_argument("'" + text + "' is not an x,y pair");
  return {parse_double(parts[0]), parse_double(parts[1])};
}

}  // namespace detail

using ConfigSetter = std::function<void(ScenarioConfig&, const std::string&)>;

/// Every accepted key with its setter. Keys sharing a group are alternative
/// spellings of one quantity.
struct ConfigKey {
  std::string name;
  std::string group;
  ConfigSetter apply;
};

inline const std::vector<ConfigKey>& config_keys() {
  using detail::parse_double;
  using detail::parse_unsigned;
  static const std::vector<ConfigKey> keys = {
      {"area_width_m", "area_width", [](auto& c, auto& v) { c.area_width_m = parse_double(v); }},
      {"area_height_m", "area_height", [](auto& c, auto& v) { c.area_height_m = parse_double(v); }},
      {"flow_count", "flow_count", [](auto& c, auto& v) { c.flow_count = parse_unsigned(v); }},
      {"slots_per_frame", "slots", [](auto& c, auto& v) { c.slots_per_frame = static_cast<std::int64_t>(parse_unsigned(v)); }},
      {"qos_min_bps", "qos_min", [](auto& c, auto& v) { c.qos_min_bps = parse_double(v); }},
      {"qos_max_bps", "qos_max", [](auto& c, auto& v) { c.qos_max_bps = parse_double(v); }},
      {"qos_values_bps", "qos_values",
       [](auto& c, auto& v) {
         std::vector<double> q;
         for (const auto& t : detail::split(v, ',')) q.push_back(parse_double(t));
         c.qos_values_bps = std::move(q);
       }},
      {"bandwidth_hz", "bandwidth", [](auto& c, auto& v) { c.radio.bandwidth_hz = parse_double(v); }},
      {"bs_share", "bs_share", [](auto& c, auto& v) { c.radio.bs_share = parse_double(v); }},
      {"mr_share", "mr_share", [](auto& c, auto& v) { c.radio.mr_share = parse_double(v); }},
      {"tx_power_w", "tx_power", [](auto& c, auto& v) { c.radio.tx_power_w = parse_double(v); }},
      {"tx_power_dbm", "tx_power", [](auto& c, auto& v) { c.radio.tx_power_w = units::dbm_to_watts(parse_double(v)); }},
      {"noise_psd_w_per_hz", "noise_psd", [](auto& c, auto& v) { c.radio.noise_psd_w_per_hz = parse_double(v); }},
      {"noise_psd_dbm_per_hz", "noise_psd",
       [](auto& c, auto& v) { c.radio.noise_psd_w_per_hz = units::dbm_per_hz_to_watts_per_hz(parse_double(v)); }},
      {"noise_psd_dbm_per_mhz", "noise_psd",
       [](auto& c, auto& v) { c.radio.noise_psd_w_per_hz = units::dbm_per_mhz_to_watts_per_hz(parse_double(v)); }},
      {"path_loss_exponent", "path_loss_exponent", [](auto& c, auto& v) { c.radio.path_loss_exponent = parse_double(v); }},
      {"efficiency", "efficiency", [](auto& c, auto& v) { c.radio.efficiency = parse_double(v); }},
      {"si_level", "si_level", [](auto& c, auto& v) { c.radio.si_level = parse_double(v); }},
      {"si_level_db", "si_level", [](auto& c, auto& v) { c.radio.si_level = units::from_db(parse_double(v)); }},
      {"wavelength_m", "wavelength", [](auto& c, auto& v) { c.radio.wavelength_m = parse_double(v); }},
      {"carrier_hz", "wavelength", [](auto& c, auto& v) { c.radio.wavelength_m = units::wavelength(parse_double(v)); }},
      {"beamwidth_3db_deg", "beamwidth", [](auto& c, auto& v) { c.radio.beamwidth_3db_deg = parse_double(v); }},
      {"bs_position", "bs_position", [](auto& c, auto& v) { c.bs_position = detail::parse_point(v); }},
      {"mr_position", "mr_position", [](auto& c, auto& v) { c.mr_position = detail::parse_point(v); }},
      {"user_positions", "user_positions",
       [](auto& c, auto& v) {
         std::vector<Vec2> pts;
         for (const auto& t : detail::split(v, ';'))
           if (!t.empty()) pts.push_back(detail::parse_point(t));
         c.user_positions = std::move(pts);
       }},
      {"blockage_probability", "blockage_probability", [](auto& c, auto& v) { c.blockage_probability = parse_double(v); }},
      {"seed", "seed", [](auto& c, auto& v) { c.seed = parse_unsigned(v); }},
      {"min_distance_m", "min_distance", [](auto& c, auto& v) { c.min_distance_m = parse_double(v); }},
  };
  return keys;
}

/// Parses a config document on top of `base`. Syntax problems and semantic
/// violations are collected and reported together, prefixed by `origin`.
inline ScenarioConfig parse_config(std::istream& in, const std::string& origin = "<config>",
                                   ScenarioConfig base = {}) {
  std::map<std::string, const ConfigKey*> by_name;
  for (const auto& k : config_keys()) by_name[k.name] = &k;

  std::vector<std::string> errors;
  std::map<std::string, std::string> group_owner;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    auto it = by_name.find(key);
    if (it == by_name.end()) {
      errors.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    auto [owner, fresh] = group_owner.emplace(it->second->group, key);
    if (!fresh) {
      errors.push_back(where + "'" + key + "' conflicts with earlier '" + owner->second + "'");
      continue;
    }
    try {
      it->second->apply(base, value);
    } catch (const std::invalid_argument& e) {
      errors.push_back(where + key + ": " + e.what());
    }
  }
  if (!errors.empty()) throw validation_error(std::move(errors));
  if (auto v = base.violations(); !v.empty()) {
    for (auto& s : v) s = origin + ": " + s;
    throw validation_error(std::move(v));
  }
  return base;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error({path + ": cannot open config file"});
  return parse_config(in, path);
}

/// Writes every scalar setting in linear units, 17 significant digits.
inline void write_config(std::ostream& out, const ScenarioConfig& c) {
  const auto old_precision = out.precision(17);
  auto point = [](Vec2 p) {
    std::ostringstream s;
    s << std::setprecision(17) << p.x << "," << p.y;
    return s.str();
  };
  out << "area_width_m = " << c.area_width_m << "\n"
      << "area_height_m = " << c.area_height_m << "\n"
      << "flow_count = " << c.flow_count << "\n"
      << "slots_per_frame = " << c.slots_per_frame << "\n"
      << "qos_min_bps = " << c.qos_min_bps << "\n"
      << "qos_max_bps = " << c.qos_max_bps << "\n"
      << "bandwidth_hz = " << c.radio.bandwidth_hz << "\n"
      << "bs_share = " << c.radio.bs_share << "\n"
      << "mr_share = " << c.radio.mr_share << "\n"
      << "tx_power_w = " << c.radio.tx_power_w << "\n"
      << "noise_psd_w_per_hz = " << c.radio.noise_psd_w_per_hz << "\n"
      << "path_loss_exponent = " << c.radio.path_loss_exponent << "\n"
      << "efficiency = " << c.radio.efficiency << "\n"
      << "si_level = " << c.radio.si_level << "\n"
      << "wavelength_m = " << c.radio.wavelength_m << "\n"
      << "beamwidth_3db_deg = " << c.radio.beamwidth_3db_deg << "\n"
      << "bs_position = " << point(c.bs_position) << "\n"
      << "mr_position = " << point(c.mr_position) << "\n"
      << "blockage_probability = " << c.blockage_probability << "\n"
      << "seed = " << c.seed << "\n"
      << "min_distance_m = " << c.min_distance_m << "\n";
  if (c.user_positions) {
    out << "user_positions = ";
    for (std::size_t i = 0; i < c.user_positions->size(); ++i) out << (i ? "; " : "") << point((*c.user_positions)[i]);
    out << "\n";
  }
  if (c.qos_values_bps) {
    out << "qos_values_bps = ";
    for (std::size_t i = 0; i < c.qos_values_bps->size(); ++i) out << (i ? ", " : "") << (*c.qos_values_bps)[i];
    out << "\n";
  }
  out.precision(old_precision);
}

}  // namespace mmtrain

#endif  // MMTRAIN_CONFIG_FILE_HPP
