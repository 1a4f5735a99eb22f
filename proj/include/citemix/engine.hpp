#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "citemix/citation.hpp"
#include "citemix/quality.hpp"
#include "citemix/rank_stats.hpp"

namespace citemix {

// One homogeneous article subset: quality distribution, quality-citation
// relationship shape, target citation mean, target Spearman correlation and
// sample size.
struct SubsetParams {
  QualityDistribution dist = preset_distribution(DistributionKind::selective);
  RelationshipShape shape = RelationshipShape::exponential();
  double mean = 0.0;
  double rho = 0.0;
  long long n = 0;
};

struct ArticleSet {
  std::vector<int> qualities;
  std::vector<std::int64_t> citations;
};

enum class PointStatus { ok, skipped_unreachable };

std::string point_status_name(PointStatus s);

// Aggregated result for one grid cell.
struct PointResult {
  std::vector<SubsetParams> params;
  IntervalEstimate combined_rho;
  std::vector<double> per_iteration_rhos;
  PointStatus status = PointStatus::ok;
  std::string note;  // diagnostic for skipped cells, empty otherwise
};

// Full sweep over (set1_rho, set2_rho, set2_mean). Distribution and shape
// apply to both sets; set 1 keeps its mean and size from the template.
struct SweepGrid {
  SubsetParams set1;  // rho field ignored, replaced per cell
  long long set2_n = 0;
  std::vector<double> set2_means;
  std::vector<double> set1_rhos;
  std::vector<double> set2_rhos;
  int iterations = 0;
  std::uint64_t master_seed = 0;
};

// Simulates one article subset: quality vector plus calibrated citation
// counts, both derived from the given seed. The calibrated spec must belong
// to these params.
ArticleSet generate_set(const SubsetParams& params, const CalibratedSet& calibrated,
                        std::uint64_t seed);

inline constexpr std::uint64_t kDefaultCalibrationSeed = 0x5eedca11b0a7ULL;

// Seed-derivation scheme (stable part of the engine contract):
//   cell_seed    = derive_seed(master_seed, {kCellSeedTag, cell_index})
//   iter_seed    = derive_seed(cell_seed,   {kIterSeedTag, iteration_index})
//   subset_seed  = derive_seed(iter_seed,   {kSubsetSeedTag, subset_index})
//   quality/citation streams = derive_seed(subset_seed, {1}) / {2}
// run_point plays the cell role directly, so a 1x1x1 sweep cell equals
// run_point called with that cell's derived seed.
inline constexpr std::uint64_t kCellSeedTag = 0xce11;
inline constexpr std::uint64_t kIterSeedTag = 0x17e2;
inline constexpr std::uint64_t kSubsetSeedTag = 0x5b5e;

struct EngineConfig {
  int calibration_n = 200000;
  MeanConvention convention = MeanConvention::arithmetic;
  // 0 = one worker per hardware thread. Results are identical for any value.
  int threads = 1;
  // Deliberately independent of any run's master seed so that cached,
  // uncached and persisted calibrations all agree.
  std::uint64_t calibration_seed = kDefaultCalibrationSeed;
  bool progress = false;  // advisory notes on stderr
};

// Runs merge experiments. Every random stream is derived from
// (master_seed, cell index, iteration index, subset index) through
// derive_seed(), so results do not depend on execution order or thread count.
class Engine {
 public:
  explicit Engine(EngineConfig config = {});

  const EngineConfig& config() const { return config_; }
  CalibrationCache& calibration_cache() { return *cache_; }

  // Calibration for one subset's parameters (cached). Throws
  // CalibrationError when the target correlation is unattainable.
  const CalibratedSet& calibrate(const SubsetParams& params);

  // Merges the subsets once per iteration, computes the tie-corrected
  // Spearman correlation of each merged sample and aggregates across
  // iterations. Calibration failure for any subset yields
  // status=skipped_unreachable with no partial numbers.
  PointResult run_point(const std::vector<SubsetParams>& sets, int iterations,
                        std::uint64_t master_seed);

  // One PointResult per (set1_rho, set2_rho, set2_mean) cell, in that row
  // order. Cells run concurrently when config.threads != 1; calibrations are
  // filled in serially first.
  std::vector<PointResult> run_sweep(const SweepGrid& grid);

 private:
  EngineConfig config_;
  std::unique_ptr<CalibrationCache> cache_;  // keeps Engine movable
};

}  // namespace citemix
