#include "citemix/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "citemix/errors.hpp"
#include "citemix/rng.hpp"

namespace citemix {

QualityDistribution::QualityDistribution(
    const std::array<double, kQualityLevels>& proportions)
    : p_(proportions) {
  double sum = 0.0;
  for (double p : p_) {
    if (!(p >= 0.0)) {
      throw InvalidParameter("QualityDistribution: proportions must be non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidParameter("QualityDistribution: proportions must sum to 1 (got " +
                           std::to_string(sum) + ")");
  }
}

QualityDistribution preset_distribution(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::selective:
      return QualityDistribution({0.006, 0.035, 0.240, 0.495, 0.224});
    case DistributionKind::non_selective:
      return QualityDistribution({0.2, 0.2, 0.2, 0.2, 0.2});
  }
  throw InvalidParameter("preset_distribution: unknown kind");
}

RelationshipShape RelationshipShape::exponential() {
  return RelationshipShape(RelationshipKind::exponential, {1.0, 2.0, 4.0, 8.0, 16.0});
}

RelationshipShape RelationshipShape::linear() {
  return RelationshipShape(RelationshipKind::linear, {1.0, 2.0, 3.0, 4.0, 5.0});
}

RelationshipShape RelationshipShape::from_kind(RelationshipKind kind) {
  return kind == RelationshipKind::exponential ? exponential() : linear();
}

LevelMeans resolve_level_means(const QualityDistribution& dist,
                               const RelationshipShape& shape,
                               double target_mean) {
  if (!(target_mean > 0.0)) {
    throw InvalidParameter("resolve_level_means: target mean must be positive");
  }
  double weighted_ratio = 0.0;
  for (int i = 0; i < kQualityLevels; ++i) {
    weighted_ratio += dist.proportions()[i] * shape.ratios()[i];
  }
  LevelMeans out;
  out.multiplier = target_mean / weighted_ratio;
  for (int i = 0; i < kQualityLevels; ++i) {
    out.means[i] = out.multiplier * shape.ratios()[i];
  }
  return out;
}

std::array<long long, kQualityLevels> largest_remainder_counts(
    const QualityDistribution& dist, long long n) {
  if (n < 1) {
    throw InvalidParameter("largest_remainder_counts: n must be >= 1");
  }
  std::array<long long, kQualityLevels> counts{};
  std::array<double, kQualityLevels> remainders{};
  long long assigned = 0;
  for (int i = 0; i < kQualityLevels; ++i) {
    const double quota = dist.proportions()[i] * static_cast<double>(n);
    counts[i] = static_cast<long long>(std::floor(quota));
    remainders[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  long long leftover = n - assigned;
  std::array<int, kQualityLevels> order{0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (int k = 0; k < kQualityLevels && leftover > 0; ++k, --leftover) {
    ++counts[order[k]];
  }
  return counts;
}

std::vector<int> sample_quality_vector(const QualityDistribution& dist,
                                       long long n, std::uint64_t seed) {
  const auto counts = largest_remainder_counts(dist, n);
  std::vector<int> levels;
  levels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < kQualityLevels; ++i) {
    levels.insert(levels.end(), static_cast<std::size_t>(counts[i]), i);
  }
  Rng rng(seed);
  shuffle(levels, rng);
  return levels;
}

namespace {

bool nearly_equal(const std::array<double, kQualityLevels>& a,
                  const std::array<double, kQualityLevels>& b) {
  for (int i = 0; i < kQualityLevels; ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

}  // namespace

std::string distribution_name(const QualityDistribution& dist) {
  if (nearly_equal(dist.proportions(),
                   preset_distribution(DistributionKind::selective).proportions())) {
    return "selective";
  }
  if (nearly_equal(dist.proportions(),
                   preset_distribution(DistributionKind::non_selective).proportions())) {
    return "non-selective";
  }
  char buf[160];
  const auto& p = dist.proportions();
  std::snprintf(buf, sizeof(buf), "%.9g;%.9g;%.9g;%.9g;%.9g", p[0], p[1], p[2],
                p[3], p[4]);
  return buf;
}

QualityDistribution distribution_from_name(std::string_view name) {
  if (name == "selective") {
    return preset_distribution(DistributionKind::selective);
  }
  if (name == "non-selective" || name == "non_selective") {
    return preset_distribution(DistributionKind::non_selective);
  }
  if (name.find(';') != std::string_view::npos) {
    std::array<double, kQualityLevels> p{};
    std::string s(name);
    std::size_t pos = 0;
    for (int i = 0; i < kQualityLevels; ++i) {
      std::size_t next = s.find(';', pos);
      const std::string tok = s.substr(pos, next == std::string::npos
                                                ? std::string::npos
                                                : next - pos);
      char* end = nullptr;
      p[i] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || (i < kQualityLevels - 1 && next == std::string::npos)) {
        throw InvalidParameter("distribution_from_name: expected five ';'-separated proportions, got '" +
                               std::string(name) + "'");
      }
      pos = next + 1;
    }
    return QualityDistribution(p);
  }
  throw InvalidParameter(
      "distribution_from_name: unknown distribution '" + std::string(name) +
      "' (expected 'selective', 'non-selective', or five ';'-separated proportions)");
}

std::string relationship_name(RelationshipKind kind) {
  return kind == RelationshipKind::exponential ? "exponential" : "linear";
}

RelationshipKind relationship_from_name(std::string_view name) {
  if (name == "exponential") return RelationshipKind::exponential;
  if (name == "linear") return RelationshipKind::linear;
  throw InvalidParameter("relationship_from_name: unknown relationship '" +
                         std::string(name) + "' (expected 'exponential' or 'linear')");
}

}  // namespace citemix
