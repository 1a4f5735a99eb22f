#pragma once

#include <span>
#include <vector>

namespace citemix {

struct IntervalEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  double level = 0.95;
};

// Ranks 1..n with tied values receiving the mean of the ranks they span, so
// the rank sum is always n(n+1)/2.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson product-moment correlation. Throws DegenerateInput if either input
// is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

// Tie-corrected Spearman correlation: Pearson on average ranks. The inputs
// here are heavily tied (five quality levels, truncated counts), so the
// classical 1 - 6*sum(d^2)/(n(n^2-1)) shortcut would be biased; it is only
// used as an oracle on tie-free data in the tests.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// Mean with a normal-approximation confidence interval,
// half_width = z * sd / sqrt(n). Only level 0.95 is supported (z = 1.959964).
IntervalEstimate mean_and_ci(std::span<const double> values, double level = 0.95);

}  // namespace citemix
