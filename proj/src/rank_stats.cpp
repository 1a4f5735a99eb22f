#include "citemix/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "citemix/errors.hpp"

namespace citemix {

std::vector<double> average_ranks(std::span<const double> values) {
  if (values.empty()) {
    throw InvalidParameter("average_ranks: empty input");
  }
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    // tied block spans 1-based ranks i+1 .. j+1
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = mean_rank;
    }
    i = j + 1;
  }
  return ranks;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidParameter("pearson_correlation: length mismatch");
  }
  if (x.size() < 2) {
    throw InvalidParameter("pearson_correlation: need at least 2 observations");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInput("pearson_correlation: constant input, correlation undefined");
  }
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidParameter("spearman_rho: paired sample lengths differ");
  }
  if (x.size() < 2) {
    throw InvalidParameter("spearman_rho: need at least 2 pairs");
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson_correlation(rx, ry);
}

IntervalEstimate mean_and_ci(std::span<const double> values, double level) {
  if (values.size() < 2) {
    throw InvalidParameter("mean_and_ci: need at least 2 values");
  }
  if (std::abs(level - 0.95) > 1e-12) {
    throw InvalidParameter("mean_and_ci: only level 0.95 is supported");
  }
  constexpr double kZ95 = 1.959964;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  return IntervalEstimate{mean, kZ95 * sd / std::sqrt(n), 0.95};
}

}  // namespace citemix
