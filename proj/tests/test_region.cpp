#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "risbc/channel.hpp"
#include "risbc/region.hpp"

using namespace risbc;

namespace {

Instance normalized_instance(int n, int m, int k, double p, std::uint64_t seed,
                             double gamma_bar = 0.0) {
  auto cfg = SystemConfig::normalized(n, m, k, p);
  Rng rng(seed);
  auto [scenario, channels] = generate_instance(cfg, rng);
  (void)scenario;
  return Instance{std::move(channels), 1.0, p, gamma_bar};
}

}  // namespace

TEST_CASE("equal weights equalize the two users") {
  auto inst = normalized_instance(3, 4, 2, 2.0, 5);
  const auto params = FblParams::make(256, 1e-5);
  inst.gamma_bar = params.threshold;
  RVec lambda = RVec::Constant(2, 0.5);
  const auto pt = sinr_region_point(lambda, inst, RisArchitecture::GpDiagonal, params, {}, 5);
  REQUIRE(pt.feasible);
  CHECK(std::abs(pt.sinrs(0) - pt.sinrs(1)) / std::max(pt.sinrs(0), pt.sinrs(1)) < 0.05);
  for (int k = 0; k < 2; ++k) CHECK(pt.sinrs(k) >= lambda(k) * pt.objective - 1e-6);
  CHECK_THROWS_AS(sinr_region_point(RVec::Zero(2), inst, RisArchitecture::GpDiagonal, params, {}),
                  std::invalid_argument);
}

TEST_CASE("skewed weights approach the single-user optimum") {
  auto inst = normalized_instance(3, 4, 2, 2.0, 7);
  const auto params = FblParams::make(256, 1e-5);
  inst.gamma_bar = 0.0;

  RVec lambda(2);
  lambda << 0.99, 0.01;
  const auto pt = sinr_region_point(lambda, inst, RisArchitecture::LpDiagonal, params, {}, 7);

  Instance solo = inst;
  solo.channels.ris_user = inst.channels.ris_user.topRows(1);
  solo.channels.direct = inst.channels.direct.topRows(1);
  const auto solo_res = solve_max_min(solo, RisArchitecture::LpDiagonal, {}, 7);
  CHECK(pt.sinrs(0) >= 0.85 * solo_res.min_sinr);
  CHECK(pt.sinrs(0) <= solo_res.min_sinr * 1.02);
}

TEST_CASE("boundary points are Pareto-nondominated and Shannon at c = 0") {
  auto inst = normalized_instance(3, 4, 2, 2.0, 9);
  const auto shannon = FblParams::make(64, 0.5);
  const auto pts = rate_region_boundary(inst, RisArchitecture::LpDiagonal, 7, shannon, {}, 9);
  REQUIRE(pts.size() >= 3);
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const bool dominates = pts[j].rates(0) >= pts[i].rates(0) + 1e-12 &&
                             pts[j].rates(1) >= pts[i].rates(1) + 1e-12;
      CHECK_FALSE(dominates);
    }
    for (int k = 0; k < 2; ++k)
      CHECK_THAT(pts[i].rates(k), Catch::Matchers::WithinAbs(std::log1p(pts[i].sinrs(k)), 1e-12));
  }
}

TEST_CASE("orthogonal no-RIS channels expose the single-user corners") {
  const int n = 2;
  Instance inst;
  inst.channels.bs_ris = CMat::Ones(1, n);
  inst.channels.ris_user = CMat::Ones(2, 1);
  inst.channels.direct = CMat::Zero(2, n);
  inst.channels.direct(0, 0) = cxd(1.3, 0.4);
  inst.channels.direct(1, 1) = cxd(-0.2, 1.1);
  inst.noise_power = 1.0;
  inst.power_budget = 2.0;
  inst.gamma_bar = 0.0;
  const auto params = FblParams::make(256, 1e-5);

  const auto pts = rate_region_boundary(inst, RisArchitecture::None, 9, params, {}, 1);
  REQUIRE(!pts.empty());
  for (int user = 0; user < 2; ++user) {
    const double solo_sinr = inst.power_budget * inst.channels.direct.row(user).squaredNorm();
    const double corner = fbl_rate(solo_sinr, params);
    double best = 0.0;
    for (const auto& p : pts) best = std::max(best, p.rates(user));
    CHECK(best >= corner * 0.98);
    CHECK(best <= corner * 1.001);
  }
}

TEST_CASE("rate profile point: equal profile matches the equal-weight solve") {
  auto inst = normalized_instance(3, 4, 2, 2.0, 11);
  const auto params = FblParams::make(256, 1e-5);
  inst.gamma_bar = params.threshold;
  const RVec alpha = RVec::Constant(2, 0.5);

  OptimizerConfig cfg;
  cfg.lambda = alpha;
  const auto direct = solve_max_min(inst, RisArchitecture::GpDiagonal, cfg, 11);
  REQUIRE(direct.feasible);
  const double want = fbl_rate(direct.min_sinr, params) / 0.5;

  const auto pt = rate_profile_point(alpha, inst, RisArchitecture::GpDiagonal, params, {}, 11);
  REQUIRE(pt.feasible);
  CHECK_THAT(pt.objective, Catch::Matchers::WithinRel(want, 5e-3));
  // returned per-user rates respect the profile
  for (int k = 0; k < 2; ++k) CHECK(pt.rates(k) >= alpha(k) * pt.objective * (1.0 - 1e-3));
}

TEST_CASE("rate profile point: single user reduces to the solo optimum") {
  auto inst = normalized_instance(3, 4, 1, 2.0, 13);
  const auto params = FblParams::make(256, 1e-5);
  inst.gamma_bar = params.threshold;
  const auto pt = rate_profile_point(RVec::Ones(1), inst, RisArchitecture::LpDiagonal, params, {}, 13);
  REQUIRE(pt.feasible);
  const auto solo = solve_max_min(inst, RisArchitecture::LpDiagonal, {}, 13);
  CHECK_THAT(pt.objective, Catch::Matchers::WithinRel(fbl_rate(solo.min_sinr, params), 5e-3));
}

TEST_CASE("rate profile point: more power never hurts") {
  auto lo = normalized_instance(3, 4, 2, 1.0, 15);
  auto hi = lo;
  hi.power_budget = 2.0;
  const auto params = FblParams::make(256, 1e-5);
  lo.gamma_bar = hi.gamma_bar = params.threshold;
  const RVec alpha = RVec::Constant(2, 0.5);
  const auto p_lo = rate_profile_point(alpha, lo, RisArchitecture::GpDiagonal, params, {}, 15);
  const auto p_hi = rate_profile_point(alpha, hi, RisArchitecture::GpDiagonal, params, {}, 15);
  REQUIRE(p_lo.feasible);
  REQUIRE(p_hi.feasible);
  CHECK(p_hi.objective >= p_lo.objective * (1.0 - 1e-3));
}

TEST_CASE("lambda-swept and alpha-swept boundaries coincide (Lemma-2 check, small)") {
  auto inst = normalized_instance(3, 4, 2, 2.0, 17);
  const auto params = FblParams::make(256, 1e-5);
  inst.gamma_bar = params.threshold;
  const int grid_points = 7;

  const auto swept = rate_region_boundary(inst, RisArchitecture::LpDiagonal, grid_points, params, {}, 17);
  std::vector<RVec> sinr_mapped;
  double scale = 1e-12;
  for (const auto& p : swept) {
    bool above = true;
    for (int k = 0; k < 2; ++k) above = above && p.sinrs(k) >= params.threshold;
    if (!above) continue;
    sinr_mapped.push_back(p.rates);
    scale = std::max(scale, p.rates.maxCoeff());
  }

  std::vector<RVec> profile_mapped;
  for (const RVec& alpha : simplex_grid(2, grid_points)) {
    const auto pt = rate_profile_point(alpha, inst, RisArchitecture::LpDiagonal, params, {}, 17);
    if (!pt.feasible) continue;
    bool above = true;
    for (int k = 0; k < 2; ++k) above = above && pt.sinrs(k) >= params.threshold;
    if (above) profile_mapped.push_back(pt.rates);
  }
  REQUIRE(sinr_mapped.size() >= 3);
  REQUIRE(profile_mapped.size() >= 3);
  CHECK(hausdorff_distance(sinr_mapped, profile_mapped) <= 0.02 * scale);
}

TEST_CASE("hausdorff distance basics") {
  std::vector<RVec> a, b;
  RVec p(2);
  p << 0, 0;
  a.push_back(p);
  p << 1, 0;
  a.push_back(p);
  b = a;
  CHECK(hausdorff_distance(a, b) == 0.0);
  b[1](0) = 1.5;
  CHECK_THAT(hausdorff_distance(a, b), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("region CSV and SVG exports") {
  auto inst = normalized_instance(2, 3, 2, 1.0, 19);
  const auto params = FblParams::make(128, 1e-3);
  const auto pts = rate_region_boundary(inst, RisArchitecture::None, 4, params, {}, 19);
  const std::string csv = region_to_csv(pts);
  CHECK(csv.rfind("weight_0,weight_1,sinr_0,sinr_1,rate_0,rate_1,objective,min_sinr,feasible\n",
                  0) == 0);
  const std::string svg = region_to_svg(pts, "boundary");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}
