#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "citemix/quality.hpp"

namespace citemix {

// How the lognormal log-location is tied to a level's expected citations m:
//   arithmetic: location = ln(m + 0.5) - sigma^2/2, so the continuous
//               pre-truncation arithmetic mean is exactly m + 0.5 for every
//               sigma and the set's expected mean stays put across the
//               correlation grid.
//   log_median: location = ln(m + 0.5), so m + 0.5 is the median instead.
// The +0.5 offsets the downward bias of truncation (E[floor X] ~ E[X] - 0.5).
enum class MeanConvention { arithmetic, log_median };

std::string convention_name(MeanConvention c);
MeanConvention convention_from_name(std::string_view name);

struct LognormalSpec {
  LognormalSpec(LevelMeans level_means, double sigma, MeanConvention convention);

  double location(int level) const;

  LevelMeans level_means;
  double sigma;
  MeanConvention convention;
};

// Discretised lognormal citation counts, one per input article: draw from the
// continuous lognormal for the article's quality level and truncate toward
// zero. Truncation (not rounding) is deliberate: it produces the surplus of
// zeros seen in real citation data.
std::vector<std::int64_t> sample_citation_counts(std::span<const int> qualities,
                                                 const LognormalSpec& spec,
                                                 std::uint64_t seed);

inline constexpr double kSigmaMin = 1e-3;
inline constexpr double kSigmaMax = 6.0;
inline constexpr double kCalibrationTolerance = 0.005;
inline constexpr int kMaxBisectionSteps = 60;

struct CalibratedSet {
  LognormalSpec spec;
  double target_rho = 0.0;
  double achieved_rho = 0.0;
  int calibration_sample_size = 0;
  bool converged = false;
  int steps_used = 0;
};

// Searches sigma in [kSigmaMin, kSigmaMax] by bisection until the Spearman
// correlation between quality and sampled counts on a fixed calibration
// sample is within kCalibrationTolerance of target_rho. The same underlying
// normal draws are reused at every sigma (common random numbers), which makes
// the evaluated correlation a deterministic, effectively monotone function of
// sigma. Throws UnreachableTarget / NonBracketing when the target lies outside
// what the sigma bounds attain.
CalibratedSet calibrate_sigma(const QualityDistribution& dist,
                              const RelationshipShape& shape,
                              double target_mean, double target_rho,
                              int calib_n, std::uint64_t seed,
                              MeanConvention convention = MeanConvention::arithmetic);

struct CalibrationKey {
  std::string distribution;  // canonical name, see distribution_name()
  RelationshipKind relationship;
  double mean;
  double target_rho;
  int calib_n;
  MeanConvention convention;

  auto operator<=>(const CalibrationKey&) const = default;
};

// Thread-safe calibration memo. Failures (unreachable targets) are cached
// too so a sweep does not rediscover them per cell; only successes are
// persisted. Cached and uncached paths return identical values because the
// calibration seed is part of the cache, not of the per-run sampling seed.
class CalibrationCache {
 public:
  explicit CalibrationCache(std::uint64_t calibration_seed)
      : seed_(calibration_seed) {}

  // Returns the cached calibration or runs it. Rethrows the recorded
  // CalibrationError for keys that previously failed.
  const CalibratedSet& get_or_compute(const QualityDistribution& dist,
                                      const RelationshipShape& shape,
                                      double target_mean, double target_rho,
                                      int calib_n, MeanConvention convention);

  std::uint64_t calibration_seed() const { return seed_; }
  std::size_t size() const;
  std::vector<std::pair<CalibrationKey, CalibratedSet>> entries() const;

  // One record per line:
  //   dist,shape,mean,target_rho,calib_n,convention,sigma,achieved_rho
  // '#' lines are comments. Loading merges records into the cache.
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  struct Failure {
    bool unreachable = false;  // else non-bracketing
    std::string message;
    double bound = 0.0;
  };

  std::uint64_t seed_;
  mutable std::mutex mutex_;
  std::map<CalibrationKey, CalibratedSet> ok_;
  std::map<CalibrationKey, Failure> failed_;
};

}  // namespace citemix
