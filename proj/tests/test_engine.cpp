#include <doctest.h>

#include <cmath>
#include <vector>

#include "citemix/engine.hpp"
#include "citemix/errors.hpp"
#include "citemix/rank_stats.hpp"
#include "citemix/rng.hpp"

using namespace citemix;

namespace {

SubsetParams subset(double mean, double rho, long long n,
                    DistributionKind dk = DistributionKind::selective,
                    RelationshipKind rk = RelationshipKind::exponential) {
  return SubsetParams{preset_distribution(dk), RelationshipShape::from_kind(rk),
                      mean, rho, n};
}

EngineConfig light_config(int threads = 1) {
  EngineConfig cfg;
  cfg.calibration_n = 30000;
  cfg.threads = threads;
  return cfg;
}

double own_rho(const ArticleSet& set) {
  std::vector<double> x(set.qualities.begin(), set.qualities.end());
  std::vector<double> y(set.citations.begin(), set.citations.end());
  return spearman_rho(x, y);
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("generated sets re-measure close to their parameters") {
  Engine engine(light_config());
  const SubsetParams params = subset(20.0, 0.5, 5000);
  const ArticleSet set = generate_set(params, engine.calibrate(params), 31337);
  REQUIRE(set.qualities.size() == 5000);
  REQUIRE(set.citations.size() == 5000);

  CHECK(own_rho(set) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(own_rho(set) >= 0.45);
  CHECK(own_rho(set) <= 0.55);

  double mean = 0.0;
  for (std::int64_t c : set.citations) mean += static_cast<double>(c);
  mean /= 5000.0;
  CHECK(mean >= 18.0);
  CHECK(mean <= 22.0);
}

TEST_CASE("two-article sets work") {
  Engine engine(light_config());
  const SubsetParams params = subset(20.0, 0.5, 2);
  const ArticleSet set = generate_set(params, engine.calibrate(params), 1);
  CHECK(set.qualities.size() == 2);
  CHECK(set.citations.size() == 2);
}

TEST_CASE("generation is bit-deterministic in the seed") {
  Engine engine(light_config());
  const SubsetParams params = subset(10.0, 0.7, 1000);
  const CalibratedSet& cal = engine.calibrate(params);
  const ArticleSet a = generate_set(params, cal, 555);
  const ArticleSet b = generate_set(params, cal, 555);
  CHECK(a.qualities == b.qualities);
  CHECK(a.citations == b.citations);
  const ArticleSet c = generate_set(params, cal, 556);
  CHECK(a.citations != c.citations);
}

TEST_CASE("mismatched calibration is rejected") {
  Engine engine(light_config());
  const SubsetParams params = subset(20.0, 0.5, 100);
  const CalibratedSet& cal = engine.calibrate(params);
  SubsetParams other = params;
  other.mean = 25.0;
  CHECK_THROWS_AS((void)generate_set(other, cal, 1), InvalidParameter);
  SubsetParams wrong_rho = params;
  wrong_rho.rho = 0.6;
  CHECK_THROWS_AS((void)generate_set(wrong_rho, cal, 1), InvalidParameter);
}

TEST_CASE("merging two identical configurations preserves the correlation") {
  Engine engine(light_config());
  const PointResult result = engine.run_point(
      {subset(20.0, 0.5, 2000), subset(20.0, 0.5, 2000)}, 10, 99);
  REQUIRE(result.status == PointStatus::ok);
  REQUIRE(result.per_iteration_rhos.size() == 10);
  CHECK(result.combined_rho.mean == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("three-subset merges are supported") {
  Engine engine(light_config());
  const PointResult result = engine.run_point(
      {subset(20.0, 0.5, 800), subset(20.0, 0.5, 800), subset(20.0, 0.5, 800)},
      6, 7);
  REQUIRE(result.status == PointStatus::ok);
  CHECK(result.combined_rho.mean == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("unreachable calibration skips the point with a note") {
  Engine engine(light_config());
  const PointResult result = engine.run_point(
      {subset(20.0, 0.1, 500), subset(0.5, 0.9, 500)}, 5, 3);
  CHECK(result.status == PointStatus::skipped_unreachable);
  CHECK(result.per_iteration_rhos.empty());
  CHECK_FALSE(result.note.empty());
}

TEST_CASE("single iteration yields a zero-width interval") {
  Engine engine(light_config());
  const PointResult result =
      engine.run_point({subset(20.0, 0.5, 400), subset(20.0, 0.5, 400)}, 1, 12);
  REQUIRE(result.status == PointStatus::ok);
  CHECK(result.per_iteration_rhos.size() == 1);
  CHECK(result.combined_rho.half_width == 0.0);
}

TEST_CASE("preconditions") {
  Engine engine(light_config());
  CHECK_THROWS_AS((void)engine.run_point({subset(20.0, 0.5, 100)}, 5, 1),
                  InvalidParameter);
  CHECK_THROWS_AS(
      (void)engine.run_point({subset(20.0, 0.5, 100), subset(20.0, 0.5, 100)}, 0, 1),
      InvalidParameter);
  CHECK_THROWS_AS((void)engine.calibrate(subset(20.0, 1.5, 100)), InvalidParameter);
  CHECK_THROWS_AS((void)engine.calibrate(subset(-2.0, 0.5, 100)), InvalidParameter);
}

TEST_CASE("sweep covers the grid in row order") {
  SweepGrid grid;
  grid.set1 = subset(20.0, 0.0, 400);
  grid.set2_n = 400;
  grid.set1_rhos = {0.3, 0.7};
  grid.set2_rhos = {0.4, 0.8};
  grid.set2_means = {10.0, 20.0, 30.0};
  grid.iterations = 3;
  grid.master_seed = 2024;

  Engine engine(light_config());
  const std::vector<PointResult> results = engine.run_sweep(grid);
  REQUIRE(results.size() == 12);
  std::size_t i = 0;
  for (double rho1 : grid.set1_rhos) {
    for (double rho2 : grid.set2_rhos) {
      for (double mean2 : grid.set2_means) {
        REQUIRE(results[i].params.size() == 2);
        CHECK(results[i].params[0].rho == rho1);
        CHECK(results[i].params[1].rho == rho2);
        CHECK(results[i].params[1].mean == mean2);
        CHECK(results[i].params[0].mean == 20.0);
        ++i;
      }
    }
  }
}

TEST_CASE("a 1x1x1 sweep reduces to run_point at the derived cell seed") {
  SweepGrid grid;
  grid.set1 = subset(20.0, 0.0, 300);
  grid.set2_n = 300;
  grid.set1_rhos = {0.5};
  grid.set2_rhos = {0.6};
  grid.set2_means = {15.0};
  grid.iterations = 4;
  grid.master_seed = 91;

  Engine engine(light_config());
  const auto results = engine.run_sweep(grid);
  REQUIRE(results.size() == 1);

  Engine engine2(light_config());
  const PointResult direct =
      engine2.run_point({subset(20.0, 0.5, 300), subset(15.0, 0.6, 300)}, 4,
                        derive_seed(91, {kCellSeedTag, 0}));
  CHECK(results[0].per_iteration_rhos == direct.per_iteration_rhos);
}

TEST_CASE("parallel and serial sweeps agree bit for bit") {
  SweepGrid grid;
  grid.set1 = subset(20.0, 0.0, 500);
  grid.set2_n = 500;
  grid.set1_rhos = {0.2, 0.5, 0.8};
  grid.set2_rhos = {0.3, 0.9};
  grid.set2_means = {5.0, 20.0};
  grid.iterations = 4;
  grid.master_seed = 7;

  Engine serial(light_config(1));
  Engine parallel(light_config(4));
  const auto a = serial.run_sweep(grid);
  const auto b = parallel.run_sweep(grid);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].per_iteration_rhos == b[i].per_iteration_rhos);
    CHECK(a[i].combined_rho.mean == b[i].combined_rho.mean);
    CHECK(a[i].combined_rho.half_width == b[i].combined_rho.half_width);
    CHECK(a[i].status == b[i].status);
  }
}

TEST_CASE("low-correlation line stays flat across set 2 means") {
  // with rho2 = 0.1 the mean gap barely moves the combined correlation
  Engine engine(light_config());
  double lo = 2.0, hi = -2.0;
  for (double mean2 : {5.0, 10.0, 20.0, 40.0}) {
    const PointResult r = engine.run_point(
        {subset(20.0, 0.5, 2000), subset(mean2, 0.1, 2000)}, 8, 12345);
    REQUIRE(r.status == PointStatus::ok);
    lo = std::min(lo, r.combined_rho.mean);
    hi = std::max(hi, r.combined_rho.mean);
  }
  CHECK(hi - lo <= 0.05);
}

}  // TEST_SUITE
