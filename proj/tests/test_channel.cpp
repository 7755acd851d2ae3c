#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "risbc/channel.hpp"
#include "risbc/fbl.hpp"

using namespace risbc;

TEST_CASE("scenario geometry identities") {
  SystemConfig cfg;
  cfg.num_users = 64;
  Rng rng(9);
  const auto s = generate_scenario(cfg, rng);

  // BS-RIS: 1 m ground distance, equal heights -> 3-D distance 1 m
  CHECK_THAT(s.bs_ris_distance, Catch::Matchers::WithinAbs(1.0, 1e-12));

  // a user exactly at the square center would sit at sqrt(130^2 + 23.5^2)
  const double want = std::sqrt(130.0 * 130.0 + 23.5 * 23.5);
  CHECK_THAT(want, Catch::Matchers::WithinAbs(132.107, 5e-4));

  for (int k = 0; k < cfg.num_users; ++k) {
    CHECK(s.user_positions(k, 0) >= 120.0);
    CHECK(s.user_positions(k, 0) <= 140.0);
    CHECK(std::abs(s.user_positions(k, 1)) <= 10.0);
    const double dx = s.user_positions(k, 0), dy = s.user_positions(k, 1);
    CHECK_THAT(s.bs_user_distance(k),
               Catch::Matchers::WithinAbs(std::sqrt(dx * dx + dy * dy + 23.5 * 23.5), 1e-9));
    CHECK(s.ris_user_distance(k) > 0.0);
  }
}

TEST_CASE("scenario generation is deterministic in the seed") {
  SystemConfig cfg;
  Rng a(123), b(123), c(124);
  const auto s1 = generate_scenario(cfg, a);
  const auto s2 = generate_scenario(cfg, b);
  const auto s3 = generate_scenario(cfg, c);
  CHECK((s1.user_positions - s2.user_positions).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.user_positions - s3.user_positions).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rician matrix limit cases and power split") {
  Rng rng(5);
  const double inf = std::numeric_limits<double>::infinity();

  // kappa -> inf: entrywise |F| equals the deterministic LOS magnitude
  const CMat f_los = rician_matrix(6, 4, inf, 2.0, 0.3, -0.2, rng);
  for (int i = 0; i < f_los.rows(); ++i)
    for (int j = 0; j < f_los.cols(); ++j)
      CHECK_THAT(std::abs(f_los(i, j)), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));

  // kappa = 0: Monte Carlo second moment matches the large-scale gain
  const double gain = 0.37;
  double acc = 0.0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const CMat f = rician_matrix(1, 1, 0.0, gain, 0.0, 0.0, rng);
    acc += std::norm(f(0, 0));
  }
  CHECK_THAT(acc / draws, Catch::Matchers::WithinRel(gain, 0.02));

  // kappa = 10: LOS fraction of mean power is 10/11 by construction
  const double kappa = 10.0;
  const double w_los = kappa / (1.0 + kappa);
  CHECK_THAT(w_los, Catch::Matchers::WithinAbs(0.909, 1e-3));
  CHECK_THROWS_AS(rician_matrix(2, 2, -1.0, 1.0, 0.0, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(rician_matrix(2, 2, 1.0, 0.0, 0.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("rayleigh vector moments, preconditions, determinism") {
  Rng rng(6);
  double acc = 0.0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) acc += std::norm(rayleigh_vector(1, 1.0, rng)(0));
  CHECK(acc / draws >= 0.98);
  CHECK(acc / draws <= 1.02);

  CHECK_THROWS_AS(rayleigh_vector(1, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(rayleigh_vector(0, 1.0, rng), std::invalid_argument);

  Rng r1(77), r2(77);
  CHECK((rayleigh_vector(8, 0.5, r1) - rayleigh_vector(8, 0.5, r2)).norm() == 0.0);
}

TEST_CASE("effective channel algebra") {
  Rng rng(8);
  const int m = 5, n = 3;
  CMat f(m, n);
  CRow fu(m);
  for (int i = 0; i < m; ++i) {
    fu(i) = rng.complex_normal();
    for (int j = 0; j < n; ++j) f(i, j) = rng.complex_normal();
  }

  // identity and annihilation
  CHECK((effective_channel(f, fu, CMat::Identity(m, m)) - fu * f).norm() < 1e-14);
  CHECK(effective_channel(f, fu, CMat::Zero(m, m)).norm() == 0.0);

  // scalar case: f=(2), Phi=(0.5j), F=(3) -> h = 3j
  CMat f1(1, 1), phi1(1, 1);
  CRow fu1(1);
  f1(0, 0) = 3.0;
  fu1(0) = 2.0;
  phi1(0, 0) = cxd(0.0, 0.5);
  CHECK(std::abs(effective_channel(f1, fu1, phi1)(0) - cxd(0.0, 3.0)) < 1e-15);

  // linearity in Phi
  CMat p1(m, m), p2(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      p1(i, j) = rng.complex_normal();
      p2(i, j) = rng.complex_normal();
    }
  const cxd a = rng.complex_normal(), b = rng.complex_normal();
  const CRow lhs = effective_channel(f, fu, a * p1 + b * p2);
  const CRow rhs = a * effective_channel(f, fu, p1) + b * effective_channel(f, fu, p2);
  CHECK((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));

  CHECK_THROWS_AS(effective_channel(f, fu, CMat::Identity(m + 1, m + 1)), std::invalid_argument);
}

TEST_CASE("full instance generation is consistent and seeded") {
  SystemConfig cfg;
  cfg.num_tx_antennas = 4;
  cfg.num_ris_elements = 8;
  cfg.num_users = 3;
  Rng r1(2024), r2(2024);
  const auto [s1, ch1] = generate_instance(cfg, r1);
  const auto [s2, ch2] = generate_instance(cfg, r2);
  CHECK((ch1.bs_ris - ch2.bs_ris).norm() == 0.0);
  CHECK((ch1.ris_user - ch2.ris_user).norm() == 0.0);
  CHECK((ch1.direct - ch2.direct).norm() == 0.0);
  CHECK(ch1.bs_ris.rows() == 8);
  CHECK(ch1.bs_ris.cols() == 4);
  CHECK(ch1.ris_user.rows() == 3);
  CHECK(ch1.direct.cols() == 4);
}

TEST_CASE("normalized mode pins the median no-RIS per-antenna SNR") {
  auto cfg = SystemConfig::normalized(4, 8, 2, 10.0);
  cfg.validate();
  Rng rng(15);
  std::vector<double> snr;
  for (int t = 0; t < 20000; ++t) {
    const auto g = rayleigh_vector(1, cfg.path_loss.direct_gain(1.0), rng);
    snr.push_back(cfg.power_budget * std::norm(g(0)) / cfg.noise_power);
  }
  std::sort(snr.begin(), snr.end());
  const double median = snr[snr.size() / 2];
  CHECK_THAT(linear_to_db(median), Catch::Matchers::WithinAbs(10.0, 0.2));
}

TEST_CASE("config validation rejects out-of-range values") {
  SystemConfig cfg;
  cfg.error_prob = 0.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.error_prob = 1e-5;
  cfg.noise_power = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.noise_power = 1e-12;
  cfg.num_users = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
