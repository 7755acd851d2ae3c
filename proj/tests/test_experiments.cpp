#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "risbc/experiments.hpp"

using namespace risbc;

namespace {

ExperimentSpec tiny_spec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.base = SystemConfig::normalized(2, 3, 2, 2.0);
  spec.base.block_length = 128;
  spec.base.error_prob = 1e-3;
  spec.trials = 2;
  spec.base_seed = 42;
  spec.label = "tiny";
  spec.workers = 2;
  switch (kind) {
    case ExperimentKind::MaxminVsPower: spec.grid = {0.0, 5.0}; break;
    case ExperimentKind::GainVsEpsilon: spec.grid = {1e-5, 1e-3}; break;
    case ExperimentKind::GainVsBlocklength: spec.grid = {128, 512}; break;
    case ExperimentKind::VsElements: spec.grid = {3, 5}; break;
  }
  return spec;
}

}  // namespace

TEST_CASE("paired gain statistics") {
  RVec v(4);
  v << 1.0, 2.0, 3.0, 4.0;
  const auto self = paired_gain(v, v);
  CHECK_THAT(self.gain_pct, Catch::Matchers::WithinAbs(100.0, 1e-12));
  CHECK_THAT(self.se_pct, Catch::Matchers::WithinAbs(0.0, 1e-9));

  RVec w = 2.0 * v;
  CHECK_THAT(paired_gain(w, v).gain_pct, Catch::Matchers::WithinAbs(200.0, 1e-12));

  RVec z = RVec::Zero(4);
  CHECK(std::isnan(paired_gain(v, z).gain_pct));
}

TEST_CASE("deterministic rows and byte-identical CSV across runs") {
  auto spec = tiny_spec(ExperimentKind::MaxminVsPower);
  spec.architectures = {RisArchitecture::None, RisArchitecture::RandomDiagonal,
                        RisArchitecture::LpDiagonal};
  const auto a = run_experiment(spec);
  const auto b = run_experiment(spec);
  CHECK(result_to_csv(a) == result_to_csv(b));
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.rows.size() == spec.architectures.size() * spec.grid.size());
  for (const auto& row : a.rows) {
    CHECK(row.trials + row.failures == spec.trials);
    if (row.architecture == "none") CHECK_THAT(row.mean_gain_pct, Catch::Matchers::WithinAbs(100.0, 1e-9));
  }
}

TEST_CASE("per-trial warm-start ordering holds in the raw data") {
  auto spec = tiny_spec(ExperimentKind::MaxminVsPower);
  const auto res = run_experiment(spec);
  const auto& rand_raw = res.raw.at(RisArchitecture::RandomDiagonal);
  const auto& lp_raw = res.raw.at(RisArchitecture::LpDiagonal);
  const auto& gpd_raw = res.raw.at(RisArchitecture::GpDiagonal);
  const auto& gpbd_raw = res.raw.at(RisArchitecture::GpBeyondDiagonal);
  for (int gi = 0; gi < 2; ++gi)
    for (int t = 0; t < spec.trials; ++t) {
      if (std::isnan(rand_raw(gi, t))) continue;
      CHECK(lp_raw(gi, t) >= rand_raw(gi, t) - 1e-6);
      CHECK(gpd_raw(gi, t) >= lp_raw(gi, t) - 1e-6);
      CHECK(gpbd_raw(gi, t) >= gpd_raw(gi, t) - 1e-6);
    }
}

TEST_CASE("vs-elements emits the BD-over-D improvement series") {
  auto spec = tiny_spec(ExperimentKind::VsElements);
  spec.architectures = {RisArchitecture::None, RisArchitecture::GpDiagonal,
                        RisArchitecture::GpBeyondDiagonal};
  const auto res = run_experiment(spec);
  int improvement_rows = 0;
  for (const auto& row : res.rows)
    if (row.architecture == "gp-bd-over-gp-d") {
      ++improvement_rows;
      CHECK(row.mean_gain_pct >= 100.0 - 1e-6);
    }
  CHECK(improvement_rows == 2);
}

TEST_CASE("empty result set gives a header-only CSV; round trip reproduces rows") {
  ExperimentResult empty;
  const std::string header = result_to_csv(empty);
  CHECK(header ==
        "experiment,architecture,sweep_var,sweep_value,trials,failures,"
        "mean_maxmin_rate_nats,stderr,mean_gain_pct,config_hash,seed\n");

  auto spec = tiny_spec(ExperimentKind::GainVsEpsilon);
  spec.architectures = {RisArchitecture::None, RisArchitecture::LpDiagonal};
  const auto res = run_experiment(spec);
  const auto parsed = parse_result_csv(result_to_csv(res));
  REQUIRE(parsed.size() == res.rows.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].architecture == res.rows[i].architecture);
    CHECK(parsed[i].sweep_value == res.rows[i].sweep_value);
    CHECK(parsed[i].mean_maxmin_rate == res.rows[i].mean_maxmin_rate);
    const bool both_nan = std::isnan(parsed[i].mean_gain_pct) && std::isnan(res.rows[i].mean_gain_pct);
    CHECK((both_nan || parsed[i].mean_gain_pct == res.rows[i].mean_gain_pct));
  }
}

TEST_CASE("spec validation catches malformed sweeps") {
  auto spec = tiny_spec(ExperimentKind::GainVsEpsilon);
  spec.grid = {};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.grid = {1e-3, 1e-5};  // not increasing
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec(ExperimentKind::GainVsEpsilon);
  spec.architectures = {RisArchitecture::LpDiagonal};  // missing baseline
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec(ExperimentKind::MaxminVsPower);
  spec.trials = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("emitted files land on disk and reproduce byte-for-byte") {
  auto spec = tiny_spec(ExperimentKind::MaxminVsPower);
  spec.architectures = {RisArchitecture::None, RisArchitecture::LpDiagonal};
  const auto res = run_experiment(spec);
  const std::string dir = (std::filesystem::temp_directory_path() / "risbc_test_out").string();
  std::filesystem::remove_all(dir);
  aggregate_and_emit(res, dir, true);
  REQUIRE(std::filesystem::exists(dir + "/tiny.csv"));
  REQUIRE(std::filesystem::exists(dir + "/tiny.svg"));
  std::ifstream csv1(dir + "/tiny.csv");
  std::stringstream buf1;
  buf1 << csv1.rdbuf();
  aggregate_and_emit(res, dir, true);
  std::ifstream csv2(dir + "/tiny.csv");
  std::stringstream buf2;
  buf2 << csv2.rdbuf();
  CHECK(buf1.str() == buf2.str());
  CHECK(buf1.str().find(std::to_string(res.config_hash)) != std::string::npos);
  std::filesystem::remove_all(dir);
}
