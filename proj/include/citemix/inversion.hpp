#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "citemix/engine.hpp"
#include "citemix/results_io.hpp"

namespace citemix {

// A subset whose correlation is the unknown: everything in SubsetParams
// except rho.
struct SubsetSketch {
  QualityDistribution dist;
  RelationshipShape shape;
  double mean = 0.0;
  long long n = 0;
};

enum class AssumptionKind {
  equal_rhos,  // all subsets share one unknown correlation
  fixed_rho1,  // subset 1's correlation is known; the rest share the unknown
};

struct Assumption {
  AssumptionKind kind = AssumptionKind::equal_rhos;
  double rho1 = 0.0;  // used by fixed_rho1
};

struct InversionProblem {
  double observed_combined_rho = 0.0;
  std::vector<SubsetSketch> subsets;
  Assumption assumption;
  // Iterations per forward simulation; reduced relative to a full experiment
  // because bisection re-runs the forward model many times.
  int forward_iterations = 20;
};

struct InversionEstimate {
  std::vector<double> rhos;
  double residual = 0.0;  // |forward(rhos) - observed| at the returned rhos
  int iterations_used = 0;
};

inline constexpr double kMinInversionTolerance = 0.005;
inline constexpr int kMaxInversionSteps = 40;

// Recovers the constituent correlation(s) consistent with an observed
// combined correlation by bisecting the one free rho against a forward
// simulation (Engine::run_point with a fixed derived seed — every evaluation
// reuses the same seed, making the forward model a deterministic function of
// rho). Monotonicity of the forward model is verified at rho 0.1/0.5/0.9
// before bisecting; a non-monotone model raises NoConvergence rather than
// returning an arbitrary root.
InversionEstimate estimate_subset_correlations(Engine& engine,
                                               const InversionProblem& problem,
                                               double tolerance,
                                               std::uint64_t master_seed);

// Table-interpolation variant: reads the forward model off a precomputed
// sweep table instead of simulating. The table must cover the problem's
// configuration (same distribution/relationship/set1 mean; equal_rhos uses
// the table diagonal set1_rho == set2_rho, fixed_rho1 the matching set1_rho
// slice). Two-subset problems only.
InversionEstimate estimate_from_table(std::span<const ResultRow> table,
                                      const InversionProblem& problem,
                                      double tolerance);

}  // namespace citemix
