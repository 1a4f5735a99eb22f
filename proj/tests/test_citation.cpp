#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "citemix/citation.hpp"
#include "citemix/errors.hpp"
#include "citemix/quality.hpp"
#include "citemix/rank_stats.hpp"
#include "citemix/rng.hpp"

using namespace citemix;

namespace {

constexpr int kCalibN = 50000;

QualityDistribution selective() {
  return preset_distribution(DistributionKind::selective);
}

LognormalSpec spec_for(double target_mean, double sigma,
                       MeanConvention conv = MeanConvention::arithmetic) {
  return LognormalSpec(
      resolve_level_means(selective(), RelationshipShape::exponential(), target_mean),
      sigma, conv);
}

double measured_rho(const QualityDistribution& dist, const LognormalSpec& spec,
                    int n, std::uint64_t seed) {
  const std::vector<int> q = sample_quality_vector(dist, n, derive_seed(seed, {1}));
  const std::vector<std::int64_t> c =
      sample_citation_counts(q, spec, derive_seed(seed, {2}));
  std::vector<double> x(q.begin(), q.end());
  std::vector<double> y(c.begin(), c.end());
  return spearman_rho(x, y);
}

}  // namespace

TEST_SUITE("citation") {

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(spec_for(20.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(spec_for(20.0, -1.0), InvalidParameter);
}

TEST_CASE("degenerate sigma floors the offset level mean") {
  // level 3 mean is 18.648 for selective/exponential at overall mean 20;
  // floor(18.648 + 0.5) = 19 for every draw once sigma ~ 0
  const LognormalSpec spec = spec_for(20.0, 1e-9);
  CHECK(spec.level_means.means[3] == doctest::Approx(18.648).epsilon(1e-4));
  const std::vector<int> qualities(200, 3);
  for (std::int64_t c : sample_citation_counts(qualities, spec, 7)) {
    CHECK(c == 19);
  }
}

TEST_CASE("empirical mean tracks the target under the arithmetic convention") {
  // E[floor X] ~ E[X] - 0.5 = (20 + 0.5) - 0.5 for a single-level sample
  const LognormalSpec spec(
      LevelMeans{20.0, {20.0, 20.0, 20.0, 20.0, 20.0}}, 1.0,
      MeanConvention::arithmetic);
  const std::vector<int> qualities(1000000, 2);
  const auto counts = sample_citation_counts(qualities, spec, 99);
  double mean = 0.0;
  for (std::int64_t c : counts) mean += static_cast<double>(c);
  mean /= static_cast<double>(counts.size());
  CHECK(mean == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("counts are non-negative integers") {
  const LognormalSpec spec = spec_for(5.0, 2.5);
  const auto q = sample_quality_vector(selective(), 20000, 3);
  const auto counts = sample_citation_counts(q, spec, 4);
  REQUIRE(counts.size() == q.size());
  for (std::int64_t c : counts) CHECK(c >= 0);
}

TEST_CASE("pre-truncation continuous mean equals level mean plus half") {
  // independent oracle: sample the continuous lognormal with the spec's own
  // location and compare against the closed-form arithmetic mean
  for (double sigma : {0.25, 1.0, 2.0, 3.0}) {
    const LognormalSpec spec = spec_for(20.0, sigma);
    for (int level : {0, 4}) {
      Rng rng(derive_seed(1234, {static_cast<std::uint64_t>(level),
                                 static_cast<std::uint64_t>(sigma * 100)}));
      const int n = 2000000;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        sum += std::exp(spec.location(level) + sigma * rng.next_normal());
      }
      const double target = spec.level_means.means[level] + 0.5;
      CHECK(sum / n == doctest::Approx(target).epsilon(sigma >= 3.0 ? 0.05 : 0.01));
    }
  }
}

TEST_CASE("log_median convention centers the median instead") {
  const LognormalSpec spec = spec_for(20.0, 1.5, MeanConvention::log_median);
  CHECK(spec.location(2) == doctest::Approx(std::log(9.324 + 0.5)).epsilon(1e-4));
  const LognormalSpec arith = spec_for(20.0, 1.5, MeanConvention::arithmetic);
  CHECK(arith.location(2) ==
        doctest::Approx(std::log(9.324 + 0.5) - 0.5 * 1.5 * 1.5).epsilon(1e-4));
}

TEST_CASE("correlation is non-increasing in sigma") {
  const auto q = sample_quality_vector(selective(), kCalibN, 11);
  std::vector<double> x(q.begin(), q.end());
  double previous = 2.0;
  for (double sigma : {0.05, 0.3, 0.8, 1.5, 3.0, 5.0}) {
    // same seed at every sigma: common normals make the comparison sharp
    const auto counts = sample_citation_counts(q, spec_for(20.0, sigma), 12);
    std::vector<double> y(counts.begin(), counts.end());
    const double rho = spearman_rho(x, y);
    CHECK(rho <= previous + 0.01);
    previous = rho;
  }
}

TEST_CASE("rank agreement is exact when truncated level means separate") {
  // selective/exponential mean 20 floors to (2, 5, 9, 19, 37) as sigma -> 0
  const auto q = sample_quality_vector(selective(), 5000, 21);
  const auto counts = sample_citation_counts(q, spec_for(20.0, 1e-3), 22);
  std::vector<double> x(q.begin(), q.end());
  std::vector<double> y(counts.begin(), counts.end());
  CHECK(spearman_rho(x, y) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("calibration hits the target and re-simulates close") {
  const CalibratedSet cal =
      calibrate_sigma(selective(), RelationshipShape::exponential(), 20.0, 0.5,
                      kCalibN, 1001);
  CHECK(cal.converged);
  CHECK(cal.achieved_rho == doctest::Approx(0.5).epsilon(0.011));
  CHECK(cal.achieved_rho >= 0.495 - 1e-12);
  CHECK(cal.achieved_rho <= 0.505 + 1e-12);
  CHECK(cal.spec.sigma > kSigmaMin);
  CHECK(cal.spec.sigma < kSigmaMax);
  CHECK(cal.calibration_sample_size == kCalibN);

  // fresh-seed re-simulation: calibration tolerance plus resampling noise
  const double rho = measured_rho(selective(), cal.spec, kCalibN, 20240);
  CHECK(rho == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::abs(rho - 0.5) <= 0.02);
}

TEST_CASE("more spread is needed for weaker correlations") {
  const CalibratedSet loose =
      calibrate_sigma(selective(), RelationshipShape::exponential(), 20.0, 0.3,
                      kCalibN, 1001);
  const CalibratedSet tight =
      calibrate_sigma(selective(), RelationshipShape::exponential(), 20.0, 0.7,
                      kCalibN, 1001);
  CHECK(loose.spec.sigma > tight.spec.sigma);
}

TEST_CASE("calibration is deterministic") {
  const CalibratedSet a =
      calibrate_sigma(selective(), RelationshipShape::linear(), 20.0, 0.6,
                      kCalibN, 77);
  const CalibratedSet b =
      calibrate_sigma(selective(), RelationshipShape::linear(), 20.0, 0.6,
                      kCalibN, 77);
  CHECK(a.spec.sigma == b.spec.sigma);
  CHECK(a.achieved_rho == b.achieved_rho);
  CHECK(a.steps_used == b.steps_used);
}

TEST_CASE("mean 1 either calibrates to 0.9 or reports unreachable") {
  bool ok_outcome = false;
  try {
    const CalibratedSet cal =
        calibrate_sigma(selective(), RelationshipShape::exponential(), 1.0, 0.9,
                        kCalibN, 5);
    ok_outcome = cal.converged && std::abs(cal.achieved_rho - 0.9) <= 0.005;
  } catch (const UnreachableTarget&) {
    ok_outcome = true;
  }
  CHECK(ok_outcome);
}

TEST_CASE("very low means cap the attainable correlation") {
  // at mean 0.5 the truncated level means collapse to (0,0,0,0,1); the
  // attainable correlation tops out well below 0.9
  CHECK_THROWS_AS((void)calibrate_sigma(selective(),
                                        RelationshipShape::exponential(), 0.5,
                                        0.9, kCalibN, 5),
                  UnreachableTarget);
  try {
    (void)calibrate_sigma(selective(), RelationshipShape::exponential(), 0.5, 0.9,
                          kCalibN, 5);
  } catch (const UnreachableTarget& e) {
    CHECK(e.attainable_max < 0.9);
    CHECK(e.attainable_max > 0.5);
  }
}

TEST_CASE("tiny targets are rejected as non-bracketing") {
  CHECK_THROWS_AS((void)calibrate_sigma(selective(),
                                        RelationshipShape::exponential(), 20.0,
                                        1e-6, kCalibN, 5),
                  NonBracketing);
}

TEST_CASE("target validation") {
  CHECK_THROWS_AS((void)calibrate_sigma(selective(), RelationshipShape::linear(),
                                        20.0, 0.0, kCalibN, 5),
                  InvalidParameter);
  CHECK_THROWS_AS((void)calibrate_sigma(selective(), RelationshipShape::linear(),
                                        20.0, 1.0, kCalibN, 5),
                  InvalidParameter);
  CHECK_THROWS_AS((void)calibrate_sigma(selective(), RelationshipShape::linear(),
                                        20.0, 0.5, 10, 5),
                  InvalidParameter);
}

TEST_CASE("cache returns identical results and persists") {
  CalibrationCache cache(4242);
  const auto& first = cache.get_or_compute(selective(),
                                           RelationshipShape::exponential(), 20.0,
                                           0.4, 20000, MeanConvention::arithmetic);
  const auto& again = cache.get_or_compute(selective(),
                                           RelationshipShape::exponential(), 20.0,
                                           0.4, 20000, MeanConvention::arithmetic);
  CHECK(&first == &again);
  CHECK(cache.size() == 1);

  // uncached path agrees bit for bit
  const CalibratedSet direct =
      calibrate_sigma(selective(), RelationshipShape::exponential(), 20.0, 0.4,
                      20000, 4242);
  CHECK(direct.spec.sigma == first.spec.sigma);

  // failures are cached and rethrown
  CHECK_THROWS_AS((void)cache.get_or_compute(selective(),
                                             RelationshipShape::exponential(),
                                             0.5, 0.9, 20000,
                                             MeanConvention::arithmetic),
                  UnreachableTarget);
  CHECK_THROWS_AS((void)cache.get_or_compute(selective(),
                                             RelationshipShape::exponential(),
                                             0.5, 0.9, 20000,
                                             MeanConvention::arithmetic),
                  UnreachableTarget);

  const auto path = std::filesystem::temp_directory_path() / "citemix_cache_test.txt";
  cache.save(path);
  CalibrationCache reloaded(4242);
  reloaded.load(path);
  CHECK(reloaded.size() == 1);
  const auto& entry = reloaded.get_or_compute(selective(),
                                              RelationshipShape::exponential(),
                                              20.0, 0.4, 20000,
                                              MeanConvention::arithmetic);
  CHECK(entry.spec.sigma == first.spec.sigma);
  CHECK(entry.achieved_rho == first.achieved_rho);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
