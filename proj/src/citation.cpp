#include "citemix/citation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "citemix/errors.hpp"
#include "citemix/rank_stats.hpp"
#include "citemix/rng.hpp"

namespace citemix {

std::string convention_name(MeanConvention c) {
  return c == MeanConvention::arithmetic ? "arithmetic" : "log_median";
}

MeanConvention convention_from_name(std::string_view name) {
  if (name == "arithmetic") return MeanConvention::arithmetic;
  if (name == "log_median") return MeanConvention::log_median;
  throw InvalidParameter("convention_from_name: unknown mean convention '" +
                         std::string(name) +
                         "' (expected 'arithmetic' or 'log_median')");
}

LognormalSpec::LognormalSpec(LevelMeans lm, double s, MeanConvention c)
    : level_means(lm), sigma(s), convention(c) {
  if (!(sigma > 0.0)) {
    throw InvalidParameter("LognormalSpec: sigma must be positive");
  }
}

double LognormalSpec::location(int level) const {
  const double offset_mean = level_means.means[static_cast<std::size_t>(level)] + 0.5;
  double loc = std::log(offset_mean);
  if (convention == MeanConvention::arithmetic) {
    loc -= 0.5 * sigma * sigma;
  }
  return loc;
}

namespace {

// Counts above 2^53 would lose integer exactness in the double-based rank
// path; clamp the log argument instead (draws out there are ~8 sigma events).
constexpr double kMaxLogCount = 36.5;

std::int64_t truncate_count(double log_value) {
  if (log_value > kMaxLogCount) log_value = kMaxLogCount;
  return static_cast<std::int64_t>(std::floor(std::exp(log_value)));
}

}  // namespace

std::vector<std::int64_t> sample_citation_counts(std::span<const int> qualities,
                                                 const LognormalSpec& spec,
                                                 std::uint64_t seed) {
  if (qualities.empty()) {
    throw InvalidParameter("sample_citation_counts: empty quality vector");
  }
  std::array<double, kQualityLevels> loc{};
  for (int i = 0; i < kQualityLevels; ++i) {
    loc[i] = spec.location(i);
  }
  Rng rng(seed);
  std::vector<std::int64_t> counts(qualities.size());
  for (std::size_t j = 0; j < qualities.size(); ++j) {
    const double z = rng.next_normal();
    counts[j] = truncate_count(loc[static_cast<std::size_t>(qualities[j])] +
                               spec.sigma * z);
  }
  return counts;
}

CalibratedSet calibrate_sigma(const QualityDistribution& dist,
                              const RelationshipShape& shape,
                              double target_mean, double target_rho,
                              int calib_n, std::uint64_t seed,
                              MeanConvention convention) {
  if (!(target_rho > 0.0 && target_rho < 1.0)) {
    throw InvalidParameter("calibrate_sigma: target correlation must be in (0, 1)");
  }
  if (calib_n < 100) {
    throw InvalidParameter("calibrate_sigma: calibration sample too small (>= 10000 recommended)");
  }
  const LevelMeans level_means = resolve_level_means(dist, shape, target_mean);

  // Fixed calibration sample: qualities once, normals once. Reusing the same
  // normals at every sigma turns the achieved correlation into a step
  // function of sigma that bisection can pin down deterministically.
  const std::vector<int> qualities =
      sample_quality_vector(dist, calib_n, derive_seed(seed, {1}));
  std::vector<double> z(static_cast<std::size_t>(calib_n));
  {
    Rng rng(derive_seed(seed, {2}));
    for (double& v : z) v = rng.next_normal();
  }
  std::vector<double> q_as_double(qualities.begin(), qualities.end());
  const std::vector<double> q_ranks = average_ranks(q_as_double);

  std::vector<double> counts(static_cast<std::size_t>(calib_n));
  // NaN marks a degenerate sample (all counts identical, correlation
  // undefined); it can only occur when truncation collapses every level.
  auto rho_at = [&](double sigma) {
    std::array<double, kQualityLevels> loc{};
    const LognormalSpec spec(level_means, sigma, convention);
    for (int i = 0; i < kQualityLevels; ++i) loc[i] = spec.location(i);
    for (std::size_t j = 0; j < counts.size(); ++j) {
      double lv = loc[static_cast<std::size_t>(qualities[j])] + sigma * z[j];
      if (lv > kMaxLogCount) lv = kMaxLogCount;
      counts[j] = std::floor(std::exp(lv));
    }
    try {
      return pearson_correlation(q_ranks, average_ranks(counts));
    } catch (const DegenerateInput&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  auto result_at = [&](double sigma, double achieved, bool converged, int steps) {
    return CalibratedSet{LognormalSpec(level_means, sigma, convention),
                         target_rho, achieved, calib_n, converged, steps};
  };

  const double rho_lo = rho_at(kSigmaMin);  // highest attainable correlation
  if (std::isnan(rho_lo)) {
    char msg[200];
    std::snprintf(msg, sizeof(msg),
                  "target correlation %.4g unreachable: truncation collapses every "
                  "level to the same count at mean %g, correlation undefined",
                  target_rho, target_mean);
    throw UnreachableTarget(msg, 0.0);
  }
  if (std::abs(rho_lo - target_rho) <= kCalibrationTolerance) {
    return result_at(kSigmaMin, rho_lo, true, 0);
  }
  if (rho_lo < target_rho) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "target correlation %.4g unreachable: sigma=%g attains only %.4f "
                  "(truncation ties cap the correlation at mean %g)",
                  target_rho, kSigmaMin, rho_lo, target_mean);
    throw UnreachableTarget(msg, rho_lo);
  }
  // a degenerate sample at large sigma carries no rank signal; score it 0
  double rho_hi = rho_at(kSigmaMax);  // lowest attainable correlation
  if (std::isnan(rho_hi)) rho_hi = 0.0;
  if (std::abs(rho_hi - target_rho) <= kCalibrationTolerance) {
    return result_at(kSigmaMax, rho_hi, true, 0);
  }
  if (rho_hi > target_rho) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "target correlation %.4g below the %.4f attained at sigma=%g",
                  target_rho, rho_hi, kSigmaMax);
    throw NonBracketing(msg, rho_hi);
  }

  double lo = kSigmaMin, hi = kSigmaMax;
  double best_sigma = lo, best_rho = rho_lo;
  for (int step = 1; step <= kMaxBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    double rho = rho_at(mid);
    if (std::isnan(rho)) rho = 0.0;
    if (std::abs(rho - target_rho) < std::abs(best_rho - target_rho)) {
      best_sigma = mid;
      best_rho = rho;
    }
    if (std::abs(rho - target_rho) <= kCalibrationTolerance) {
      return result_at(mid, rho, true, step);
    }
    if (rho > target_rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return result_at(best_sigma, best_rho, false, kMaxBisectionSteps);
}

const CalibratedSet& CalibrationCache::get_or_compute(
    const QualityDistribution& dist, const RelationshipShape& shape,
    double target_mean, double target_rho, int calib_n,
    MeanConvention convention) {
  const CalibrationKey key{distribution_name(dist), shape.kind(), target_mean,
                           target_rho, calib_n, convention};
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = ok_.find(key); it != ok_.end()) {
    return it->second;
  }
  if (auto it = failed_.find(key); it != failed_.end()) {
    if (it->second.unreachable) {
      throw UnreachableTarget(it->second.message, it->second.bound);
    }
    throw NonBracketing(it->second.message, it->second.bound);
  }
  try {
    CalibratedSet cal = calibrate_sigma(dist, shape, target_mean, target_rho,
                                        calib_n, seed_, convention);
    auto [it, inserted] = ok_.emplace(key, std::move(cal));
    return it->second;
  } catch (const UnreachableTarget& e) {
    failed_.emplace(key, Failure{true, e.what(), e.attainable_max});
    throw;
  } catch (const NonBracketing& e) {
    failed_.emplace(key, Failure{false, e.what(), e.attainable_min});
    throw;
  }
}

std::size_t CalibrationCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return ok_.size();
}

std::vector<std::pair<CalibrationKey, CalibratedSet>> CalibrationCache::entries()
    const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::pair<CalibrationKey, CalibratedSet>> out;
  out.reserve(ok_.size());
  for (const auto& [k, v] : ok_) out.emplace_back(k, v);
  return out;
}

void CalibrationCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open calibration cache for writing: " + path.string());
  }
  out << "# citemix calibration cache: dist,shape,mean,target_rho,calib_n,"
         "convention,sigma,achieved_rho\n";
  std::lock_guard<std::mutex> lock(mutex_);
  char line[320];
  for (const auto& [k, v] : ok_) {
    std::snprintf(line, sizeof(line), "%s,%s,%.17g,%.17g,%d,%s,%.17g,%.17g\n",
                  k.distribution.c_str(),
                  relationship_name(k.relationship).c_str(), k.mean,
                  k.target_rho, k.calib_n, convention_name(k.convention).c_str(),
                  v.spec.sigma, v.achieved_rho);
    out << line;
  }
  if (!out.good()) {
    throw IoError("failed writing calibration cache: " + path.string());
  }
}

void CalibrationCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open calibration cache: " + path.string());
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    // the distribution field may itself contain ';' but never ','
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    if (fields.size() != 8) {
      throw ParseError("calibration cache " + path.string() + ":" +
                       std::to_string(lineno) + ": expected 8 fields");
    }
    try {
      const QualityDistribution dist = distribution_from_name(fields[0]);
      const RelationshipKind rel = relationship_from_name(fields[1]);
      const double mean = std::stod(fields[2]);
      const double rho = std::stod(fields[3]);
      const int calib_n = std::stoi(fields[4]);
      const MeanConvention conv = convention_from_name(fields[5]);
      const double sigma = std::stod(fields[6]);
      const double achieved = std::stod(fields[7]);
      const LevelMeans lm =
          resolve_level_means(dist, RelationshipShape::from_kind(rel), mean);
      CalibrationKey key{fields[0], rel, mean, rho, calib_n, conv};
      CalibratedSet cal{LognormalSpec(lm, sigma, conv), rho, achieved,
                        calib_n, true, 0};
      std::lock_guard<std::mutex> lock(mutex_);
      ok_.insert_or_assign(std::move(key), std::move(cal));
    } catch (const std::exception& e) {
      throw ParseError("calibration cache " + path.string() + ":" +
                       std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace citemix
