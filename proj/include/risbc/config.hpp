#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>

#include "risbc/types.hpp"

namespace risbc {

/// Deployment geometry. Defaults follow the reference setup: BS at the
/// origin at 25 m height, surface 1 m away at equal height, users uniform in
/// a 20 m square whose center is 130 m from the BS at 1.5 m height.
struct GeometryConfig {
  double bs_height = 25.0;
  double ris_height = 25.0;
  double bs_ris_ground_distance = 1.0;
  double user_area_center_distance = 130.0;
  double user_area_side = 20.0;
  double user_height = 1.5;
};

enum class GainModel {
  Geometric,   // PL0 * d^(-a) per link
  Normalized,  // unit noise, distance-free gains for unit tests
};

/// Large-scale gain model. Geometric mode: PL(d) = PL0 * d^(-a) with
/// per-link exponents; the blocked direct path carries an extra attenuation
/// used only by the No-RIS baseline. Normalized mode fixes gains so the
/// median No-RIS per-antenna receive SNR at p = 10 dB is 10 dB (sigma^2 = 1).
struct PathLossConfig {
  GainModel model = GainModel::Geometric;
  double ref_gain_db = -30.0;       // PL0 at 1 m
  double exponent_bs_ris = 2.2;
  double exponent_ris_user = 3.75;
  double exponent_direct = 3.75;
  double direct_extra_loss_db = 30.0;

  double bs_ris_gain(double distance) const {
    if (model == GainModel::Normalized) return 1.0;
    return db_to_linear(ref_gain_db) * std::pow(distance, -exponent_bs_ris);
  }
  double ris_user_gain(double distance) const {
    if (model == GainModel::Normalized) return 1.0 / M_LN2;
    return db_to_linear(ref_gain_db) * std::pow(distance, -exponent_ris_user);
  }
  double direct_gain(double distance) const {
    if (model == GainModel::Normalized) return 1.0 / M_LN2;
    return db_to_linear(ref_gain_db - direct_extra_loss_db) * std::pow(distance, -exponent_direct);
  }
};

/// Full scenario parameterization for one simulation instance.
struct SystemConfig {
  int num_tx_antennas = 6;    // N
  int num_ris_elements = 20;  // M
  int num_users = 4;          // K
  double power_budget = 10.0; // watts
  double noise_power = 1e-12; // watts (-90 dBm)
  int block_length = 256;     // symbols
  double error_prob = 1e-5;
  double rician_factor = 10.0;
  GeometryConfig geometry;
  PathLossConfig path_loss;
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (num_tx_antennas < 1 || num_ris_elements < 1 || num_users < 1)
      throw std::invalid_argument("SystemConfig: all dimensions must be >= 1");
    if (!(power_budget > 0.0)) throw std::invalid_argument("SystemConfig: power budget must be > 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("SystemConfig: noise power must be > 0");
    if (block_length < 1) throw std::invalid_argument("SystemConfig: block length must be >= 1");
    if (!(error_prob > 0.0 && error_prob < 0.5))
      throw std::invalid_argument("SystemConfig: error probability must lie in (0, 0.5)");
    if (rician_factor < 0.0)
      throw std::invalid_argument("SystemConfig: Rician factor must be >= 0");
  }

  /// Test-mode configuration: sigma^2 = 1 and distance-free unit-scale gains.
  static SystemConfig normalized(int n_tx, int m_elems, int k_users, double p = 10.0) {
    SystemConfig c;
    c.num_tx_antennas = n_tx;
    c.num_ris_elements = m_elems;
    c.num_users = k_users;
    c.power_budget = p;
    c.noise_power = 1.0;
    c.path_loss.model = GainModel::Normalized;
    return c;
  }
};

}  // namespace risbc
