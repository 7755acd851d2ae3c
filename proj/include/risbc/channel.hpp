#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "risbc/config.hpp"
#include "risbc/rng.hpp"
#include "risbc/types.hpp"

namespace risbc {

/// User placement and derived link distances/angles for one trial.
struct Scenario {
  RMat user_positions;       // K x 2 ground coordinates (BS at origin)
  RVec bs_user_distance;     // 3-D, K
  RVec ris_user_distance;    // 3-D, K
  double bs_ris_distance = 0.0;
  double bs_ris_azimuth = 0.0;   // departure at the BS array
  double ris_bs_azimuth = 0.0;   // arrival at the surface array
  RVec ris_user_azimuth;         // K, unused by the LOS model but kept for fixtures
};

inline double distance_3d(double dx, double dy, double dz) {
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Draws K user positions uniform in the square service area and computes
/// all 3-D link distances from the configured heights.
inline Scenario generate_scenario(const SystemConfig& config, Rng& rng) {
  config.validate();
  const auto& g = config.geometry;
  const int k_users = config.num_users;

  Scenario s;
  s.user_positions.resize(k_users, 2);
  s.bs_user_distance.resize(k_users);
  s.ris_user_distance.resize(k_users);
  s.ris_user_azimuth.resize(k_users);

  const double ris_x = g.bs_ris_ground_distance;
  s.bs_ris_distance = distance_3d(ris_x, 0.0, g.ris_height - g.bs_height);
  s.bs_ris_azimuth = std::atan2(0.0, ris_x);
  s.ris_bs_azimuth = std::atan2(0.0, -ris_x);

  const double half = 0.5 * g.user_area_side;
  for (int k = 0; k < k_users; ++k) {
    const double x = g.user_area_center_distance + rng.uniform(-half, half);
    const double y = rng.uniform(-half, half);
    s.user_positions(k, 0) = x;
    s.user_positions(k, 1) = y;
    s.bs_user_distance(k) = distance_3d(x, y, g.user_height - g.bs_height);
    s.ris_user_distance(k) = distance_3d(x - ris_x, y, g.user_height - g.ris_height);
    s.ris_user_azimuth(k) = std::atan2(y, x - ris_x);
  }
  return s;
}

/// Half-wavelength ULA steering vector at the given azimuth.
inline CVec steering_vector(int len, double azimuth) {
  CVec a(len);
  const double phase_step = M_PI * std::sin(azimuth);
  for (int i = 0; i < len; ++i) a(i) = std::polar(1.0, phase_step * i);
  return a;
}

/// Rician fading matrix with per-entry mean power `large_scale_gain`:
/// sqrt(k/(1+k)) times a rank-one ULA LOS outer product plus
/// sqrt(1/(1+k)) iid CN(0,1). rician_factor may be +inf (pure LOS).
inline CMat rician_matrix(int rows, int cols, double rician_factor, double large_scale_gain,
                          double arrival_azimuth, double departure_azimuth, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("rician_matrix: dimensions must be >= 1");
  if (!(large_scale_gain > 0.0))
    throw std::invalid_argument("rician_matrix: large-scale gain must be > 0");
  if (std::isnan(rician_factor) || rician_factor < 0.0)
    throw std::invalid_argument("rician_matrix: Rician factor must be >= 0");

  const CVec arr = steering_vector(rows, arrival_azimuth);
  const CVec dep = steering_vector(cols, departure_azimuth);
  const CMat los = arr * dep.transpose();

  double w_los = 1.0, w_nlos = 0.0;
  if (std::isinf(rician_factor)) {
    w_los = 1.0;
    w_nlos = 0.0;
  } else {
    w_los = std::sqrt(rician_factor / (1.0 + rician_factor));
    w_nlos = std::sqrt(1.0 / (1.0 + rician_factor));
  }

  CMat out(rows, cols);
  const double amp = std::sqrt(large_scale_gain);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out(i, j) = amp * (w_los * los(i, j) + w_nlos * rng.complex_normal());
  return out;
}

/// iid CN(0, gain) row vector.
inline CRow rayleigh_vector(int len, double large_scale_gain, Rng& rng) {
  if (len < 1) throw std::invalid_argument("rayleigh_vector: length must be >= 1");
  if (!(large_scale_gain > 0.0))
    throw std::invalid_argument("rayleigh_vector: large-scale gain must be > 0");
  CRow v(len);
  const double amp = std::sqrt(large_scale_gain);
  for (int i = 0; i < len; ++i) v(i) = amp * rng.complex_normal();
  return v;
}

/// One full channel realization: Rician BS-RIS link, Rayleigh RIS-user rows
/// and Rayleigh direct rows (the latter only consumed by the No-RIS baseline).
inline ChannelSet generate_channels(const SystemConfig& config, const Scenario& scenario, Rng& rng) {
  ChannelSet ch;
  ch.bs_ris = rician_matrix(config.num_ris_elements, config.num_tx_antennas,
                            config.rician_factor,
                            config.path_loss.bs_ris_gain(scenario.bs_ris_distance),
                            scenario.ris_bs_azimuth, scenario.bs_ris_azimuth, rng);
  ch.ris_user.resize(config.num_users, config.num_ris_elements);
  ch.direct.resize(config.num_users, config.num_tx_antennas);
  for (int k = 0; k < config.num_users; ++k) {
    ch.ris_user.row(k) = rayleigh_vector(
        config.num_ris_elements, config.path_loss.ris_user_gain(scenario.ris_user_distance(k)), rng);
    ch.direct.row(k) = rayleigh_vector(
        config.num_tx_antennas, config.path_loss.direct_gain(scenario.bs_user_distance(k)), rng);
  }
  ch.check_consistent();
  return ch;
}

/// Scenario + channels drawn from a single stream, the per-trial entry point.
inline std::pair<Scenario, ChannelSet> generate_instance(const SystemConfig& config, Rng& rng) {
  Scenario s = generate_scenario(config, rng);
  ChannelSet ch = generate_channels(config, s, rng);
  return {std::move(s), std::move(ch)};
}

}  // namespace risbc
