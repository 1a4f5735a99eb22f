#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "citemix/citation.hpp"
#include "citemix/engine.hpp"
#include "citemix/errors.hpp"
#include "citemix/inversion.hpp"
#include "citemix/quality.hpp"
#include "citemix/rank_stats.hpp"
#include "citemix/rng.hpp"

namespace py = pybind11;
using namespace citemix;

namespace {

QualityDistribution dist_from_arg(const py::object& arg) {
  if (py::isinstance<QualityDistribution>(arg)) {
    return arg.cast<QualityDistribution>();
  }
  if (py::isinstance<py::str>(arg)) {
    return distribution_from_name(arg.cast<std::string>());
  }
  const auto p = arg.cast<std::array<double, kQualityLevels>>();
  return QualityDistribution(p);
}

RelationshipShape shape_from_arg(const py::object& arg) {
  if (py::isinstance<RelationshipShape>(arg)) {
    return arg.cast<RelationshipShape>();
  }
  return RelationshipShape::from_kind(
      relationship_from_name(arg.cast<std::string>()));
}

MeanConvention convention_from_arg(const std::string& name) {
  return convention_from_name(name);
}

SubsetParams subset_from_args(const py::object& dist, const py::object& shape,
                              double mean, double rho, long long n) {
  return SubsetParams{dist_from_arg(dist), shape_from_arg(shape), mean, rho, n};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Monte Carlo toolkit for the attenuation of quality-citation Spearman "
      "correlations when heterogeneous article sets are merged";

  py::register_exception<InvalidParameter>(m, "InvalidParameterError",
                                           PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInputError",
                                          PyExc_ValueError);
  py::register_exception<UnreachableTarget>(m, "UnreachableTargetError");
  py::register_exception<NonBracketing>(m, "NonBracketingError");
  py::register_exception<OutOfRange>(m, "OutOfRangeError");
  py::register_exception<NoConvergence>(m, "NoConvergenceError");

  py::class_<QualityDistribution>(m, "QualityDistribution")
      .def(py::init<const std::array<double, kQualityLevels>&>(),
           py::arg("proportions"))
      .def_property_readonly("proportions", &QualityDistribution::proportions)
      .def("__repr__", [](const QualityDistribution& d) {
        return "QualityDistribution('" + distribution_name(d) + "')";
      });

  m.def(
      "preset_distribution",
      [](const std::string& kind) { return distribution_from_name(kind); },
      py::arg("kind"),
      "The published presets: 'selective' (REF-like) or 'non-selective'");

  py::class_<RelationshipShape>(m, "RelationshipShape")
      .def_static("exponential", &RelationshipShape::exponential)
      .def_static("linear", &RelationshipShape::linear)
      .def_property_readonly("ratios", &RelationshipShape::ratios)
      .def_property_readonly("kind", [](const RelationshipShape& s) {
        return relationship_name(s.kind());
      });

  py::class_<LevelMeans>(m, "LevelMeans")
      .def_readonly("multiplier", &LevelMeans::multiplier)
      .def_readonly("means", &LevelMeans::means);

  m.def(
      "resolve_level_means",
      [](const py::object& dist, const py::object& shape, double target_mean) {
        return resolve_level_means(dist_from_arg(dist), shape_from_arg(shape),
                                   target_mean);
      },
      py::arg("dist"), py::arg("shape"), py::arg("target_mean"));

  m.def(
      "sample_quality_vector",
      [](const py::object& dist, long long n, std::uint64_t seed) {
        return sample_quality_vector(dist_from_arg(dist), n, seed);
      },
      py::arg("dist"), py::arg("n"), py::arg("seed"));

  py::class_<LognormalSpec>(m, "LognormalSpec")
      .def_readonly("level_means", &LognormalSpec::level_means)
      .def_readonly("sigma", &LognormalSpec::sigma)
      .def("location", &LognormalSpec::location, py::arg("level"));

  py::class_<CalibratedSet>(m, "CalibratedSet")
      .def_readonly("spec", &CalibratedSet::spec)
      .def_readonly("target_rho", &CalibratedSet::target_rho)
      .def_readonly("achieved_rho", &CalibratedSet::achieved_rho)
      .def_readonly("calibration_sample_size",
                    &CalibratedSet::calibration_sample_size)
      .def_readonly("converged", &CalibratedSet::converged)
      .def_property_readonly("sigma",
                             [](const CalibratedSet& c) { return c.spec.sigma; });

  m.def(
      "sample_citation_counts",
      [](const std::vector<int>& qualities, const LognormalSpec& spec,
         std::uint64_t seed) {
        return sample_citation_counts(qualities, spec, seed);
      },
      py::arg("qualities"), py::arg("spec"), py::arg("seed"));

  m.def(
      "calibrate_sigma",
      [](const py::object& dist, const py::object& shape, double target_mean,
         double target_rho, int calib_n, std::uint64_t seed,
         const std::string& convention) {
        return calibrate_sigma(dist_from_arg(dist), shape_from_arg(shape),
                               target_mean, target_rho, calib_n, seed,
                               convention_from_arg(convention));
      },
      py::arg("dist"), py::arg("shape"), py::arg("target_mean"),
      py::arg("target_rho"), py::arg("calib_n") = 200000, py::arg("seed") = 1,
      py::arg("convention") = "arithmetic");

  m.def("average_ranks",
        [](const std::vector<double>& v) { return average_ranks(v); },
        py::arg("values"));
  m.def(
      "spearman_rho",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return spearman_rho(x, y);
      },
      py::arg("x"), py::arg("y"),
      "Tie-corrected Spearman correlation (Pearson on average ranks)");

  py::class_<IntervalEstimate>(m, "IntervalEstimate")
      .def_readonly("mean", &IntervalEstimate::mean)
      .def_readonly("half_width", &IntervalEstimate::half_width)
      .def_readonly("level", &IntervalEstimate::level)
      .def("__repr__", [](const IntervalEstimate& e) {
        return "IntervalEstimate(mean=" + std::to_string(e.mean) +
               ", half_width=" + std::to_string(e.half_width) + ")";
      });

  m.def(
      "mean_and_ci",
      [](const std::vector<double>& values, double level) {
        return mean_and_ci(values, level);
      },
      py::arg("values"), py::arg("level") = 0.95);

  py::class_<SubsetParams>(m, "SubsetParams")
      .def(py::init(&subset_from_args), py::arg("dist"), py::arg("shape"),
           py::arg("mean"), py::arg("rho"), py::arg("n"))
      .def_readonly("mean", &SubsetParams::mean)
      .def_readonly("rho", &SubsetParams::rho)
      .def_readonly("n", &SubsetParams::n);

  py::class_<ArticleSet>(m, "ArticleSet")
      .def_readonly("qualities", &ArticleSet::qualities)
      .def_readonly("citations", &ArticleSet::citations);

  py::class_<PointResult>(m, "PointResult")
      .def_readonly("combined_rho", &PointResult::combined_rho)
      .def_readonly("per_iteration_rhos", &PointResult::per_iteration_rhos)
      .def_readonly("note", &PointResult::note)
      .def_property_readonly("status", [](const PointResult& r) {
        return point_status_name(r.status);
      });

  py::class_<Engine>(m, "Engine")
      .def(py::init([](int calibration_n, const std::string& convention,
                       int threads, std::uint64_t calibration_seed) {
             EngineConfig cfg;
             cfg.calibration_n = calibration_n;
             cfg.convention = convention_from_arg(convention);
             cfg.threads = threads;
             cfg.calibration_seed = calibration_seed;
             return Engine(cfg);
           }),
           py::arg("calibration_n") = 200000,
           py::arg("convention") = "arithmetic", py::arg("threads") = 1,
           py::arg("calibration_seed") = kDefaultCalibrationSeed)
      .def("calibrate", &Engine::calibrate, py::arg("params"),
           py::return_value_policy::reference_internal)
      .def("run_point", &Engine::run_point, py::arg("sets"), py::arg("iterations"),
           py::arg("master_seed"), py::call_guard<py::gil_scoped_release>())
      .def(
          "run_sweep",
          [](Engine& engine, const SubsetParams& set1, long long set2_n,
             const std::vector<double>& set2_means,
             const std::vector<double>& set1_rhos,
             const std::vector<double>& set2_rhos, int iterations,
             std::uint64_t master_seed) {
            SweepGrid grid{set1,      set2_n,     set2_means, set1_rhos,
                           set2_rhos, iterations, master_seed};
            py::gil_scoped_release release;
            return engine.run_sweep(grid);
          },
          py::arg("set1"), py::arg("set2_n"), py::arg("set2_means"),
          py::arg("set1_rhos"), py::arg("set2_rhos"), py::arg("iterations"),
          py::arg("master_seed"));

  m.def(
      "generate_set",
      [](const SubsetParams& params, const CalibratedSet& cal, std::uint64_t seed) {
        return generate_set(params, cal, seed);
      },
      py::arg("params"), py::arg("calibrated"), py::arg("seed"));

  py::class_<SubsetSketch>(m, "SubsetSketch")
      .def(py::init([](const py::object& dist, const py::object& shape,
                       double mean, long long n) {
             return SubsetSketch{dist_from_arg(dist), shape_from_arg(shape), mean, n};
           }),
           py::arg("dist"), py::arg("shape"), py::arg("mean"), py::arg("n"));

  py::class_<InversionEstimate>(m, "InversionEstimate")
      .def_readonly("rhos", &InversionEstimate::rhos)
      .def_readonly("residual", &InversionEstimate::residual)
      .def_readonly("iterations_used", &InversionEstimate::iterations_used);

  m.def(
      "estimate_subset_correlations",
      [](Engine& engine, double observed, const std::vector<SubsetSketch>& subsets,
         const std::string& assumption, double rho1, double tolerance,
         int forward_iterations, std::uint64_t master_seed) {
        InversionProblem problem;
        problem.observed_combined_rho = observed;
        problem.subsets = subsets;
        if (assumption == "equal") {
          problem.assumption = {AssumptionKind::equal_rhos, 0.0};
        } else if (assumption == "fixed_rho1") {
          problem.assumption = {AssumptionKind::fixed_rho1, rho1};
        } else {
          throw InvalidParameter("assumption must be 'equal' or 'fixed_rho1'");
        }
        problem.forward_iterations = forward_iterations;
        py::gil_scoped_release release;
        return estimate_subset_correlations(engine, problem, tolerance, master_seed);
      },
      py::arg("engine"), py::arg("observed"), py::arg("subsets"),
      py::arg("assumption") = "equal", py::arg("rho1") = 0.0,
      py::arg("tolerance") = 0.02, py::arg("forward_iterations") = 20,
      py::arg("master_seed") = 1);

#ifdef CITEMIX_VERSION
  m.attr("__version__") = CITEMIX_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
