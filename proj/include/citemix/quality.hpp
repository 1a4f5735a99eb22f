#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace citemix {

// Quality scores use the REF 0..4 scale (0 below national standard, 4
// world-leading).
inline constexpr int kQualityLevels = 5;

enum class DistributionKind { selective, non_selective };

// Proportions of articles at quality levels 0..4. Non-negative, sum to 1
// within 1e-9.
class QualityDistribution {
 public:
  explicit QualityDistribution(const std::array<double, kQualityLevels>& proportions);

  const std::array<double, kQualityLevels>& proportions() const { return p_; }
  double proportion(int level) const { return p_[static_cast<std::size_t>(level)]; }

  bool operator==(const QualityDistribution&) const = default;

 private:
  std::array<double, kQualityLevels> p_;
};

// The two published presets:
//   selective     (REF 2014 output ratings): 0.6%, 3.5%, 24.0%, 49.5%, 22.4%
//   non-selective (even spread):             20% per level
QualityDistribution preset_distribution(DistributionKind kind);

enum class RelationshipKind { exponential, linear };

// Shape of the quality -> expected-citations relationship. The ratios are
// fixed per kind: exponential 1:2:4:8:16, linear 1:2:3:4:5.
class RelationshipShape {
 public:
  static RelationshipShape exponential();
  static RelationshipShape linear();
  static RelationshipShape from_kind(RelationshipKind kind);

  RelationshipKind kind() const { return kind_; }
  const std::array<double, kQualityLevels>& ratios() const { return ratios_; }

  bool operator==(const RelationshipShape&) const = default;

 private:
  RelationshipShape(RelationshipKind kind, std::array<double, kQualityLevels> ratios)
      : kind_(kind), ratios_(ratios) {}
  RelationshipKind kind_;
  std::array<double, kQualityLevels> ratios_;
};

// Per-level expected citation counts means[i] = multiplier * ratios[i], with
// the multiplier solved so the proportion-weighted mean hits the target.
struct LevelMeans {
  double multiplier = 0.0;
  std::array<double, kQualityLevels> means{};
};

LevelMeans resolve_level_means(const QualityDistribution& dist,
                               const RelationshipShape& shape,
                               double target_mean);

// Largest-remainder apportionment of n articles across the five levels.
// Counts always sum to n exactly; remainder ties break toward lower levels.
std::array<long long, kQualityLevels> largest_remainder_counts(
    const QualityDistribution& dist, long long n);

// Exactly n quality scores whose per-level counts are the largest-remainder
// apportionment above, in a seed-determined order. Deterministic counts keep
// iteration-to-iteration variance down to citation sampling alone.
std::vector<int> sample_quality_vector(const QualityDistribution& dist,
                                       long long n, std::uint64_t seed);

// Name round-trip used by run specs, the calibration cache and result rows.
// Presets map to "selective" / "non-selective"; anything else renders as the
// five proportions joined with ';'.
std::string distribution_name(const QualityDistribution& dist);
QualityDistribution distribution_from_name(std::string_view name);

std::string relationship_name(RelationshipKind kind);
RelationshipKind relationship_from_name(std::string_view name);

}  // namespace citemix
