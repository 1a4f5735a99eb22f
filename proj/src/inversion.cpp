#include "citemix/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "citemix/errors.hpp"
#include "citemix/rng.hpp"

namespace citemix {

namespace {

constexpr std::uint64_t kInversionTag = 0x1472;

void validate_problem(const InversionProblem& problem, double tolerance) {
  if (problem.subsets.size() < 2) {
    throw InvalidParameter("inversion: need at least 2 subsets");
  }
  if (!(problem.observed_combined_rho > -1.0 && problem.observed_combined_rho < 1.0)) {
    throw InvalidParameter("inversion: observed correlation must lie in (-1, 1)");
  }
  if (tolerance < kMinInversionTolerance) {
    throw InvalidParameter(
        "inversion: tolerance below the forward-simulation noise floor (min 0.005)");
  }
  if (problem.assumption.kind == AssumptionKind::fixed_rho1 &&
      !(problem.assumption.rho1 > 0.0 && problem.assumption.rho1 < 1.0)) {
    throw InvalidParameter("inversion: fixed rho1 must be in (0, 1)");
  }
  if (problem.forward_iterations < 1) {
    throw InvalidParameter("inversion: forward_iterations must be >= 1");
  }
}

std::vector<double> rhos_for(const InversionProblem& problem, double free_rho) {
  std::vector<double> rhos(problem.subsets.size(), free_rho);
  if (problem.assumption.kind == AssumptionKind::fixed_rho1) {
    rhos[0] = problem.assumption.rho1;
  }
  return rhos;
}

}  // namespace

InversionEstimate estimate_subset_correlations(Engine& engine,
                                               const InversionProblem& problem,
                                               double tolerance,
                                               std::uint64_t master_seed) {
  validate_problem(problem, tolerance);

  const std::uint64_t forward_seed = derive_seed(master_seed, {kInversionTag});
  int evaluations = 0;

  // Forward model: combined correlation at a given free rho, or nullopt when
  // that rho cannot be calibrated (attainability shrinks toward rho -> 1 at
  // low means).
  std::map<double, std::optional<double>> memo;
  auto forward = [&](double free_rho) -> std::optional<double> {
    if (auto it = memo.find(free_rho); it != memo.end()) return it->second;
    const std::vector<double> rhos = rhos_for(problem, free_rho);
    std::vector<SubsetParams> sets;
    sets.reserve(problem.subsets.size());
    for (std::size_t i = 0; i < problem.subsets.size(); ++i) {
      sets.push_back(SubsetParams{problem.subsets[i].dist, problem.subsets[i].shape,
                                  problem.subsets[i].mean, rhos[i],
                                  problem.subsets[i].n});
    }
    const PointResult point =
        engine.run_point(sets, problem.forward_iterations, forward_seed);
    ++evaluations;
    std::optional<double> value;
    if (point.status == PointStatus::ok) value = point.combined_rho.mean;
    memo.emplace(free_rho, value);
    return value;
  };

  // Usable bracket: relax the nominal (0.01, 0.99) endpoints inward past any
  // uncalibratable rho.
  double lo = 0.0, hi = 0.0;
  std::optional<double> f_lo, f_hi;
  for (double candidate : {0.01, 0.05, 0.1}) {
    if ((f_lo = forward(candidate))) {
      lo = candidate;
      break;
    }
  }
  for (double candidate : {0.99, 0.95, 0.9}) {
    if ((f_hi = forward(candidate))) {
      hi = candidate;
      break;
    }
  }
  if (!f_lo || !f_hi) {
    throw NoConvergence(
        "inversion: forward model is unattainable across the rho search interval");
  }

  // Monotonicity gate at the three pinned probes.
  const std::optional<double> f1 = forward(0.1);
  const std::optional<double> f5 = forward(0.5);
  const std::optional<double> f9 = forward(std::min(0.9, hi));
  if (!f1 || !f5 || !f9 || !(*f1 < *f5 && *f5 < *f9)) {
    throw NoConvergence(
        "inversion: forward combined correlation is not strictly increasing in rho "
        "over {0.1, 0.5, 0.9}; refusing to bisect");
  }

  const double observed = problem.observed_combined_rho;
  if (observed > *f_hi || observed < *f_lo) {
    char msg[200];
    std::snprintf(msg, sizeof(msg),
                  "inversion: observed combined correlation %.4g outside the forward "
                  "model range [%.4f, %.4f] over rho in [%.2f, %.2f]",
                  observed, *f_lo, *f_hi, lo, hi);
    throw OutOfRange(msg);
  }

  auto finish = [&](double free_rho, double fwd_value) {
    return InversionEstimate{rhos_for(problem, free_rho),
                             std::abs(fwd_value - observed), evaluations};
  };
  if (std::abs(*f_lo - observed) <= tolerance) return finish(lo, *f_lo);
  if (std::abs(*f_hi - observed) <= tolerance) return finish(hi, *f_hi);

  for (int step = 0; step < kMaxInversionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const std::optional<double> fm = forward(mid);
    if (!fm) {
      // attainability is monotone in rho: a calibration failure means we
      // are too high
      hi = mid;
      continue;
    }
    if (std::abs(*fm - observed) <= tolerance) {
      return finish(mid, *fm);
    }
    if (*fm < observed) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NoConvergence(
      "inversion: bisection exhausted 40 steps without meeting the tolerance "
      "(forward-simulation noise floor may exceed the requested tolerance)");
}

InversionEstimate estimate_from_table(std::span<const ResultRow> table,
                                      const InversionProblem& problem,
                                      double tolerance) {
  validate_problem(problem, tolerance);
  if (problem.subsets.size() != 2) {
    throw InvalidParameter("table inversion supports exactly 2 subsets");
  }
  const std::string dist = distribution_name(problem.subsets[0].dist);
  const std::string rel = relationship_name(problem.subsets[0].shape.kind());
  const double mean1 = problem.subsets[0].mean;
  const double mean2 = problem.subsets[1].mean;
  const bool equal_mode = problem.assumption.kind == AssumptionKind::equal_rhos;

  // rho -> rows usable for interpolating the combined value at mean2
  std::map<double, std::map<double, double>> by_rho;  // rho -> set2_mean -> combined
  for (const ResultRow& r : table) {
    if (r.status != "ok" || r.distribution != dist || r.relationship != rel) continue;
    if (std::abs(r.set1_mean - mean1) > 1e-9) continue;
    if (equal_mode) {
      if (std::abs(r.set1_rho - r.set2_rho) > 1e-9) continue;
      by_rho[r.set1_rho][r.set2_mean] = r.combined_rho_mean;
    } else {
      if (std::abs(r.set1_rho - problem.assumption.rho1) > 1e-9) continue;
      by_rho[r.set2_rho][r.set2_mean] = r.combined_rho_mean;
    }
  }
  if (by_rho.size() < 2) {
    throw InvalidParameter(
        "table inversion: table does not cover the problem configuration "
        "(need >= 2 usable rho values)");
  }

  // combined(rho) at the problem's set2 mean, linear between grid means
  std::vector<std::pair<double, double>> curve;
  for (const auto& [rho, means] : by_rho) {
    auto above = means.lower_bound(mean2);
    if (above == means.end()) continue;
    if (std::abs(above->first - mean2) <= 1e-9) {
      curve.emplace_back(rho, above->second);
      continue;
    }
    if (above == means.begin()) continue;
    auto below = std::prev(above);
    const double t = (mean2 - below->first) / (above->first - below->first);
    curve.emplace_back(rho, below->second + t * (above->second - below->second));
  }
  if (curve.size() < 2) {
    throw InvalidParameter(
        "table inversion: set2 mean " + format_number(mean2) +
        " is outside the table's mean coverage");
  }

  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].second > curve[i - 1].second)) {
      throw NoConvergence(
          "table inversion: tabulated combined correlation is not strictly "
          "increasing in rho");
    }
  }

  const double observed = problem.observed_combined_rho;
  if (observed < curve.front().second || observed > curve.back().second) {
    char msg[200];
    std::snprintf(msg, sizeof(msg),
                  "table inversion: observed %.4g outside tabulated range [%.4f, %.4f]",
                  observed, curve.front().second, curve.back().second);
    throw OutOfRange(msg);
  }

  double free_rho = curve.back().first;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (observed <= curve[i].second) {
      const double t =
          (observed - curve[i - 1].second) / (curve[i].second - curve[i - 1].second);
      free_rho = curve[i - 1].first + t * (curve[i].first - curve[i - 1].first);
      break;
    }
  }
  return InversionEstimate{rhos_for(problem, free_rho), 0.0, 0};
}

}  // namespace citemix
