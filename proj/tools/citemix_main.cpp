#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citemix/engine.hpp"
#include "citemix/errors.hpp"
#include "citemix/figures.hpp"
#include "citemix/inversion.hpp"
#include "citemix/results_io.hpp"
#include "citemix/rng.hpp"
#include "citemix/runspec.hpp"

namespace fs = std::filesystem;
using namespace citemix;

namespace {

constexpr std::uint64_t kScatterJitterTag = 0x5ca7;

struct CommonOptions {
  std::string runspec_path;
  std::string cache_path;
  int threads = 1;
};

Engine make_engine(const RunSpec& spec, const CommonOptions& opts) {
  EngineConfig cfg;
  cfg.calibration_n = spec.calibration_n;
  cfg.convention = spec.convention;
  cfg.threads = opts.threads;
  cfg.progress = true;
  Engine engine(cfg);
  if (!opts.cache_path.empty() && fs::exists(opts.cache_path)) {
    engine.calibration_cache().load(opts.cache_path);
    std::fprintf(stderr, "loaded %zu calibrations from %s\n",
                 engine.calibration_cache().size(), opts.cache_path.c_str());
  }
  return engine;
}

void maybe_save_cache(Engine& engine, const CommonOptions& opts) {
  if (!opts.cache_path.empty()) {
    engine.calibration_cache().save(opts.cache_path);
  }
}

SubsetParams set1_params(const RunSpec& spec) {
  return SubsetParams{spec.dist(), spec.shape(), spec.set1_mean, spec.set1_rho,
                      spec.set1_n};
}

SubsetParams set2_params(const RunSpec& spec) {
  return SubsetParams{spec.dist(), spec.shape(), spec.set2_mean, spec.set2_rho,
                      spec.set2_n};
}

int run_sweep_command(const CommonOptions& opts) {
  const RunSpec spec = load_runspec(opts.runspec_path, ExperimentKind::sweep);
  Engine engine = make_engine(spec, opts);

  SweepGrid grid;
  grid.set1 = SubsetParams{spec.dist(), spec.shape(), spec.set1_mean, 0.0,
                           spec.set1_n};
  grid.set2_n = spec.set2_n;
  grid.set1_rhos = spec.set1_rhos;
  grid.set2_rhos = spec.set2_rhos;
  grid.set2_means = spec.set2_means;
  grid.iterations = spec.iterations;
  grid.master_seed = spec.master_seed;

  const std::vector<PointResult> points = engine.run_sweep(grid);
  const std::vector<ResultRow> rows = to_result_rows(points, spec.iterations);

  fs::create_directories(spec.output_dir);
  const fs::path csv = fs::path(spec.output_dir) / "results.csv";
  const nlohmann::json echo = runspec_to_json(spec);
  write_results(rows, csv, &echo);
  maybe_save_cache(engine, opts);

  std::size_t skipped = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") ++skipped;
  }
  std::cout << "wrote " << rows.size() << " grid cells to " << csv.string();
  if (skipped > 0) std::cout << " (" << skipped << " skipped as unreachable)";
  std::cout << "\n";
  return 0;
}

int run_point_command(const CommonOptions& opts) {
  const RunSpec spec = load_runspec(opts.runspec_path, ExperimentKind::point);
  Engine engine = make_engine(spec, opts);

  const PointResult point = engine.run_point(
      {set1_params(spec), set2_params(spec)}, spec.iterations, spec.master_seed);

  fs::create_directories(spec.output_dir);
  const fs::path csv = fs::path(spec.output_dir) / "results.csv";
  const nlohmann::json echo = runspec_to_json(spec);
  write_results(std::vector<ResultRow>{to_result_row(point, spec.iterations)}, csv,
                &echo);
  maybe_save_cache(engine, opts);

  if (point.status == PointStatus::ok) {
    std::cout << "combined Spearman correlation: "
              << format_number(point.combined_rho.mean) << " +- "
              << format_number(point.combined_rho.half_width) << " (95% CI, "
              << spec.iterations << " iterations)\n";
  } else {
    std::cout << "point skipped: " << point.note << "\n";
  }
  std::cout << "wrote " << csv.string() << "\n";
  return 0;
}

int run_invert_command(const CommonOptions& opts, double observed,
                       const std::string& assumption_text, double tolerance,
                       const std::string& table_path) {
  const RunSpec spec = load_runspec(opts.runspec_path, ExperimentKind::invert);

  InversionProblem problem;
  problem.observed_combined_rho = observed;
  problem.subsets = {
      SubsetSketch{spec.dist(), spec.shape(), spec.set1_mean, spec.set1_n},
      SubsetSketch{spec.dist(), spec.shape(), spec.set2_mean, spec.set2_n}};
  problem.forward_iterations = spec.iterations;
  if (assumption_text == "equal") {
    problem.assumption = {AssumptionKind::equal_rhos, 0.0};
  } else if (assumption_text.rfind("fixed:", 0) == 0) {
    problem.assumption = {AssumptionKind::fixed_rho1,
                          std::stod(assumption_text.substr(6))};
  } else {
    throw InvalidParameter("--assumption must be 'equal' or 'fixed:<rho1>'");
  }

  InversionEstimate estimate;
  if (!table_path.empty()) {
    const auto table = read_results(table_path);
    estimate = estimate_from_table(table, problem, tolerance);
  } else {
    Engine engine = make_engine(spec, opts);
    estimate =
        estimate_subset_correlations(engine, problem, tolerance, spec.master_seed);
    maybe_save_cache(engine, opts);
  }

  nlohmann::json out{{"observed_combined_rho", observed},
                     {"assumption", assumption_text},
                     {"estimated_rhos", estimate.rhos},
                     {"residual", estimate.residual},
                     {"forward_evaluations", estimate.iterations_used},
                     {"mode", table_path.empty() ? "simulation" : "table"},
                     {"runspec", runspec_to_json(spec)}};
  fs::create_directories(spec.output_dir);
  const fs::path json_path = fs::path(spec.output_dir) / "inversion.json";
  std::ofstream f(json_path, std::ios::binary);
  f << out.dump(2) << "\n";
  if (!f.good()) throw IoError("failed writing " + json_path.string());

  std::cout << "estimated subset correlations:";
  for (double r : estimate.rhos) std::cout << " " << format_number(r);
  std::cout << "\nresidual " << format_number(estimate.residual) << " after "
            << estimate.iterations_used << " forward evaluations\n"
            << "wrote " << json_path.string() << "\n";
  return 0;
}

int run_scatter_command(const CommonOptions& opts) {
  const RunSpec spec = load_runspec(opts.runspec_path, ExperimentKind::scatter);
  Engine engine = make_engine(spec, opts);

  const SubsetParams p1 = set1_params(spec);
  const SubsetParams p2 = set2_params(spec);
  const ArticleSet a =
      generate_set(p1, engine.calibrate(p1),
                   derive_seed(spec.master_seed, {kSubsetSeedTag, 0}));
  const ArticleSet b =
      generate_set(p2, engine.calibrate(p2),
                   derive_seed(spec.master_seed, {kSubsetSeedTag, 1}));

  fs::create_directories(spec.output_dir);
  const fs::path svg = fs::path(spec.output_dir) / "scatter.svg";
  emit_scatter_figure(a, b, derive_seed(spec.master_seed, {kScatterJitterTag}), svg,
                      "rho " + format_number(spec.set1_rho) + ", mean " +
                          format_number(spec.set1_mean),
                      "rho " + format_number(spec.set2_rho) + ", mean " +
                          format_number(spec.set2_mean));
  maybe_save_cache(engine, opts);
  std::cout << "wrote " << svg.string() << "\n";
  return 0;
}

int run_figures_command(const std::string& csv_path, const std::string& outdir) {
  const auto rows = read_results(csv_path);
  if (rows.empty()) {
    throw InvalidParameter("no result rows in " + csv_path);
  }
  const auto written = emit_all_line_figures(rows, outdir);
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "citemix: Monte Carlo study of how merging heterogeneous article sets "
      "attenuates the Spearman correlation between quality and citations"};
  app.require_subcommand(1);

  CommonOptions opts;
  double observed = 0.0;
  std::string assumption = "equal";
  double tolerance = 0.02;
  std::string table_path;
  std::string figures_csv;
  std::string figures_outdir;

  auto add_common = [&](CLI::App* cmd, bool with_threads = true) {
    cmd->add_option("runspec", opts.runspec_path, "run-spec file (key = value lines)")
        ->required();
    cmd->add_option("--calibration-cache", opts.cache_path,
                    "persist/reuse sigma calibrations in this file");
    if (with_threads) {
      cmd->add_option("--threads", opts.threads,
                      "worker threads (0 = hardware, results are identical)");
    }
  };

  add_common(app.add_subcommand("sweep", "run a full (rho1, rho2, mean2) grid"));
  add_common(app.add_subcommand("point", "run a single grid cell"));
  CLI::App* invert =
      app.add_subcommand("invert", "estimate constituent correlations from an "
                                   "observed combined correlation");
  add_common(invert);
  invert->add_option("--observed", observed, "observed combined Spearman correlation")
      ->required();
  invert->add_option("--assumption", assumption, "'equal' or 'fixed:<rho1>'");
  invert->add_option("--tolerance", tolerance, "match tolerance (>= 0.005)");
  invert->add_option("--table", table_path,
                     "interpolate a precomputed sweep results.csv instead of "
                     "simulating");
  add_common(app.add_subcommand("scatter", "emit the two-set scatter figure"),
             false);
  CLI::App* figures = app.add_subcommand(
      "figures", "emit line figures from a sweep results.csv");
  figures->add_option("results", figures_csv, "results.csv from a sweep")->required();
  figures->add_option("--outdir", figures_outdir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("sweep")) return run_sweep_command(opts);
    if (app.got_subcommand("point")) return run_point_command(opts);
    if (app.got_subcommand("invert")) {
      return run_invert_command(opts, observed, assumption, tolerance, table_path);
    }
    if (app.got_subcommand("scatter")) return run_scatter_command(opts);
    if (app.got_subcommand("figures")) {
      return run_figures_command(figures_csv, figures_outdir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
