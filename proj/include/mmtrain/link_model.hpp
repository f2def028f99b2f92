#ifndef MMTRAIN_LINK_MODEL_HPP
#define MMTRAIN_LINK_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mmtrain/errors.hpp"
#include "mmtrain/units.hpp"

// Link budget for the train-ground mm-wave system: directional antenna
// gains, Friis-style received power, SNR and Shannon rates for half- and
// full-duplex links.
//
// Units: watts, hertz, meters, degrees; si_level is a linear fraction.
namespace mmtrain {

/// Piecewise main-lobe / side-lobe pattern parameterised by the half-power
/// beamwidth. Gains are in dB.
class AntennaPattern {
public:
  static constexpr double main_lobe_factor = 2.6;

  explicit AntennaPattern(double theta_3db_deg) : theta_3db_(theta_3db_deg) {
    if (!(theta_3db_deg > 0.0) || main_lobe_factor * theta_3db_deg / 2.0 > 180.0) {
      throw domain_error("half-power beamwidth must satisfy 0 < theta_3db and 1.3*theta_3db <= 180 deg, got " +
                         std::to_string(theta_3db_deg));
    }
  }

  double theta_3db() const noexcept { return theta_3db_; }
  double main_lobe_width() const noexcept { return main_lobe_factor * theta_3db_; }

  double max_gain_db() const;
  double side_lobe_gain_db() const { return -0.4111 * std::log(theta_3db_) - 10.579; }

private:
  double theta_3db_;
};

/// Peak gain in dB for a half-power beamwidth in degrees: 20*log10(1.6162 / sin(theta/2)).
inline double max_gain_db(double theta_3db_deg) {
  if (!(theta_3db_deg > 0.0) || !(theta_3db_deg < 360.0)) {
    throw domain_error("beamwidth must lie in (0, 360) deg, got " + std::to_string(theta_3db_deg));
  }
  const double s = std::sin(units::deg_to_rad(theta_3db_deg) / 2.0);
  return 10.0 * std::log10((1.6162 / s) * (1.6162 / s));
}

inline double AntennaPattern::max_gain_db() const { return mmtrain::max_gain_db(theta_3db_); }

/// Gain in dB at off-boresight angle theta (degrees, [0, 180]).
/// The boundary theta = main_lobe_width/2 belongs to the main lobe.
inline double antenna_gain_db(double theta_deg, const AntennaPattern& pattern) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
    throw domain_error("antenna angle must lie in [0, 180] deg, got " + std::to_string(theta_deg));
  }
  if (theta_deg <= pattern.main_lobe_width() / 2.0) {
    const double x = 2.0 * theta_deg / pattern.theta_3db();
    return pattern.max_gain_db() - 3.01 * x * x;
  }
  return pattern.side_lobe_gain_db();
}

struct RadioConfig {
  double bandwidth_hz = 1e9;                                         // W
  double bs_share = 0.4;                                             // a
  double mr_share = 0.6;                                             // b
  double tx_power_w = 1.0;                                           // P_t (30 dBm)
  double noise_psd_w_per_hz = units::dbm_per_hz_to_watts_per_hz(-174.0);  // N_0
  double path_loss_exponent = 3.0;                                   // n
  double efficiency = 0.5;                                           // eta
  double si_level = 1e-15;                                           // beta, linear
  double wavelength_m = units::wavelength(60e9);
  double beamwidth_3db_deg = 60.0;

  /// Friis constant (lambda / 4 pi)^2.
  double k0() const {
    const double r = wavelength_m / (4.0 * std::numbers::pi);
    return r * r;
  }

  double bs_bandwidth_hz() const { return bs_share * bandwidth_hz; }
  double mr_bandwidth_hz() const { return mr_share * bandwidth_hz; }

  AntennaPattern antenna() const { return AntennaPattern(beamwidth_3db_deg); }

  /// Every violated invariant, empty when valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    auto positive = [&](double x, const char* name) {
      if (!(x > 0.0) || !std::isfinite(x)) v.push_back(std::string(name) + " must be positive and finite");
    };
    positive(bandwidth_hz, "bandwidth_hz");
    positive(tx_power_w, "tx_power");
    positive(noise_psd_w_per_hz, "noise_psd");
    positive(path_loss_exponent, "path_loss_exponent");
    positive(wavelength_m, "wavelength");
    if (!(bs_share >= 0.0 && bs_share <= 1.0)) v.push_back("bs_share must lie in [0, 1]");
    if (!(mr_share >= 0.0 && mr_share <= 1.0)) v.push_back("mr_share must lie in [0, 1]");
    if (std::abs(bs_share + mr_share - 1.0) > 1e-9) v.push_back("bs_share + mr_share must equal 1");
    if (!(efficiency > 0.0 && efficiency < 1.0)) v.push_back("efficiency must lie in (0, 1)");
    if (!(si_level >= 0.0) || !std::isfinite(si_level)) v.push_back("si_level must be non-negative");
    if (!(beamwidth_3db_deg > 0.0) || AntennaPattern::main_lobe_factor * beamwidth_3db_deg / 2.0 > 180.0) {
      v.push_back("beamwidth_3db_deg must satisfy 0 < theta and 1.3*theta <= 180");
    }
    return v;
  }

  void validate() const {
    if (auto v = violations(); !v.empty()) throw validation_error(std::move(v));
  }
};

struct LinkGeometry {
  double distance_m;
  double tx_gain_db;
  double rx_gain_db;
};

/// P_r = k0 * g_t * g_r * l^-n * P_t.
inline double received_power(double tx_power_w, const LinkGeometry& geom, const RadioConfig& cfg) {
  if (!(geom.distance_m > 0.0)) {
    throw domain_error("link distance must be positive, got " + std::to_string(geom.distance_m));
  }
  return cfg.k0() * units::from_db(geom.tx_gain_db) * units::from_db(geom.rx_gain_db) *
         std::pow(geom.distance_m, -cfg.path_loss_exponent) * tx_power_w;
}

/// Linear SNR over the coalition bandwidth of the link.
inline double snr(double received_w, double bandwidth_hz, const RadioConfig& cfg) {
  if (!(bandwidth_hz > 0.0)) throw domain_error("bandwidth must be positive");
  return received_w / (cfg.noise_psd_w_per_hz * bandwidth_hz);
}

inline double rate_hd(double received_w, double bandwidth_hz, const RadioConfig& cfg) {
  return cfg.efficiency * bandwidth_hz * std::log2(1.0 + snr(received_w, bandwidth_hz, cfg));
}

/// Shannon rate with residual self-interference si_level * si_tx_power_w added
/// to the noise floor.
inline double rate_fd(double received_w, double bandwidth_hz, double si_tx_power_w, const RadioConfig& cfg) {
  if (!(bandwidth_hz > 0.0)) throw domain_error("bandwidth must be positive");
  const double interference = cfg.noise_psd_w_per_hz * bandwidth_hz + cfg.si_level * si_tx_power_w;
  return cfg.efficiency * bandwidth_hz * std::log2(1.0 + received_w / interference);
}

/// Full-duplex relay: both hops run concurrently, the slower one bounds the flow.
inline double two_hop_rate_fd(double first_hop, double second_hop) { return std::min(first_hop, second_hop); }

/// Half-duplex relay: the hops time-share the frame, giving r1*r2/(r1+r2).
inline double two_hop_rate_hd(double first_hop, double second_hop) {
  if (first_hop <= 0.0 || second_hop <= 0.0) return 0.0;
  return first_hop * second_hop / (first_hop + second_hop);
}

}  // namespace mmtrain

#endif  // MMTRAIN_LINK_MODEL_HPP
