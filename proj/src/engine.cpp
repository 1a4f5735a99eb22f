#include "citemix/engine.hpp"

#include <atomic>
#include <memory>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "citemix/errors.hpp"
#include "citemix/rng.hpp"

namespace citemix {

namespace {

constexpr std::uint64_t kQualityTag = 1;
constexpr std::uint64_t kCitationTag = 2;

void validate_subset(const SubsetParams& p) {
  if (p.n < 2) {
    throw InvalidParameter("SubsetParams: n must be >= 2");
  }
  if (!(p.mean > 0.0)) {
    throw InvalidParameter("SubsetParams: mean must be positive");
  }
  if (!(p.rho > 0.0 && p.rho < 1.0)) {
    throw InvalidParameter("SubsetParams: rho must be in (0, 1)");
  }
}

}  // namespace

std::string point_status_name(PointStatus s) {
  return s == PointStatus::ok ? "ok" : "skipped_unreachable";
}

ArticleSet generate_set(const SubsetParams& params, const CalibratedSet& calibrated,
                        std::uint64_t seed) {
  validate_subset(params);
  const LevelMeans expected =
      resolve_level_means(params.dist, params.shape, params.mean);
  for (int i = 0; i < kQualityLevels; ++i) {
    if (std::abs(expected.means[i] - calibrated.spec.level_means.means[i]) > 1e-9) {
      throw InvalidParameter("generate_set: calibrated spec does not match subset params");
    }
  }
  if (std::abs(calibrated.target_rho - params.rho) > 1e-12) {
    throw InvalidParameter("generate_set: calibrated target rho does not match subset rho");
  }
  ArticleSet set;
  set.qualities = sample_quality_vector(params.dist, params.n,
                                        derive_seed(seed, {kQualityTag}));
  set.citations = sample_citation_counts(set.qualities, calibrated.spec,
                                         derive_seed(seed, {kCitationTag}));
  return set;
}

Engine::Engine(EngineConfig config)
    : config_(config),
      cache_(std::make_unique<CalibrationCache>(config.calibration_seed)) {
  if (config_.calibration_n < 100) {
    throw InvalidParameter("EngineConfig: calibration_n too small");
  }
}

const CalibratedSet& Engine::calibrate(const SubsetParams& params) {
  validate_subset(params);
  return cache_->get_or_compute(params.dist, params.shape, params.mean,
                               params.rho, config_.calibration_n,
                               config_.convention);
}

PointResult Engine::run_point(const std::vector<SubsetParams>& sets,
                              int iterations, std::uint64_t master_seed) {
  if (sets.size() < 2) {
    throw InvalidParameter("run_point: need at least 2 subsets to merge");
  }
  if (iterations < 1) {
    throw InvalidParameter("run_point: iterations must be >= 1");
  }

  PointResult result;
  result.params = sets;

  std::vector<const CalibratedSet*> calibrated;
  calibrated.reserve(sets.size());
  try {
    for (const auto& s : sets) {
      calibrated.push_back(&calibrate(s));
    }
  } catch (const CalibrationError& e) {
    result.status = PointStatus::skipped_unreachable;
    result.note = e.what();
    return result;
  }

  // Non-converged calibrations would silently miss their target; skip loudly.
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (!calibrated[s]->converged) {
      result.status = PointStatus::skipped_unreachable;
      result.note = "calibration did not converge for subset " + std::to_string(s);
      return result;
    }
  }

  std::size_t total_n = 0;
  for (const auto& s : sets) total_n += static_cast<std::size_t>(s.n);

  result.per_iteration_rhos.resize(static_cast<std::size_t>(iterations));
  std::vector<double> x, y;
  x.reserve(total_n);
  y.reserve(total_n);
  for (int it = 0; it < iterations; ++it) {
    const std::uint64_t iter_seed =
        derive_seed(master_seed, {kIterSeedTag, static_cast<std::uint64_t>(it)});
    x.clear();
    y.clear();
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const std::uint64_t subset_seed =
          derive_seed(iter_seed, {kSubsetSeedTag, static_cast<std::uint64_t>(s)});
      const ArticleSet articles = generate_set(sets[s], *calibrated[s], subset_seed);
      for (int q : articles.qualities) x.push_back(static_cast<double>(q));
      for (std::int64_t c : articles.citations) y.push_back(static_cast<double>(c));
    }
    try {
      result.per_iteration_rhos[static_cast<std::size_t>(it)] = spearman_rho(x, y);
    } catch (const DegenerateInput& e) {
      // all-constant citations at extreme parameters; no partial numbers
      result.per_iteration_rhos.clear();
      result.status = PointStatus::skipped_unreachable;
      result.note = std::string("degenerate merged sample: ") + e.what();
      return result;
    }
  }

  if (iterations >= 2) {
    result.combined_rho = mean_and_ci(result.per_iteration_rhos);
  } else {
    result.combined_rho = IntervalEstimate{result.per_iteration_rhos[0], 0.0, 0.95};
  }
  return result;
}

std::vector<PointResult> Engine::run_sweep(const SweepGrid& grid) {
  if (grid.set1_rhos.empty() || grid.set2_rhos.empty() || grid.set2_means.empty()) {
    throw InvalidParameter("run_sweep: all grid sequences must be non-empty");
  }
  if (grid.iterations < 1) {
    throw InvalidParameter("run_sweep: iterations must be >= 1");
  }
  if (grid.set2_n < 2) {
    throw InvalidParameter("run_sweep: set2_n must be >= 2");
  }

  const std::size_t n1 = grid.set1_rhos.size();
  const std::size_t n2 = grid.set2_rhos.size();
  const std::size_t nm = grid.set2_means.size();
  const std::size_t cells = n1 * n2 * nm;

  auto cell_sets = [&](std::size_t index) {
    const std::size_t im = index % nm;
    const std::size_t i2 = (index / nm) % n2;
    const std::size_t i1 = index / (nm * n2);
    SubsetParams set1 = grid.set1;
    set1.rho = grid.set1_rhos[i1];
    SubsetParams set2 = grid.set1;
    set2.rho = grid.set2_rhos[i2];
    set2.mean = grid.set2_means[im];
    set2.n = grid.set2_n;
    return std::vector<SubsetParams>{set1, set2};
  };

  // Serial calibration pass: fills the cache in a deterministic order and
  // leaves the parallel phase read-mostly. Failures are cached as such.
  for (std::size_t i = 0; i < cells; ++i) {
    for (const auto& s : cell_sets(i)) {
      try {
        calibrate(s);
      } catch (const CalibrationError&) {
      }
    }
  }
  if (config_.progress) {
    std::fprintf(stderr, "sweep: %zu calibrations ready, %zu cells\n",
                 cache_->size(), cells);
  }

  std::vector<PointResult> results(cells);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells) return;
      try {
        const std::uint64_t cell_seed =
            derive_seed(grid.master_seed, {kCellSeedTag, static_cast<std::uint64_t>(i)});
        results[i] = run_point(cell_sets(i), grid.iterations, cell_seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (config_.progress && (d % std::max<std::size_t>(1, cells / 10) == 0)) {
        std::fprintf(stderr, "sweep: %zu/%zu cells\n", d, cells);
      }
    }
  };

  int thread_count = config_.threads;
  if (thread_count == 0) {
    thread_count = static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count < 1) thread_count = 1;
  }
  if (thread_count == 1 || cells == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace citemix
