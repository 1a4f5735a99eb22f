#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "citemix/citation.hpp"
#include "citemix/quality.hpp"

namespace citemix {

enum class ExperimentKind { sweep, point, invert, scatter };
enum class Profile { desk, paper };

std::string experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(std::string_view name);

// A complete declarative experiment description, parsed from a `key = value`
// document ('#' starts a comment). Unknown keys are errors; master_seed is
// mandatory. The profile seeds the defaults (desk: n=1000, 20 iterations,
// coarse grids; paper: n=5000, 100 iterations, full grids); explicit keys
// override them. Grid-valued keys accept `lo:hi:step` ranges, comma lists or
// a single number.
struct RunSpec {
  ExperimentKind experiment = ExperimentKind::sweep;
  Profile profile = Profile::desk;
  std::string distribution = "selective";
  RelationshipKind relationship = RelationshipKind::exponential;
  MeanConvention convention = MeanConvention::arithmetic;

  double set1_mean = 20.0;
  double set1_rho = 0.0;              // point / invert / scatter
  std::vector<double> set1_rhos;      // sweep
  double set2_mean = 0.0;             // point / invert / scatter
  std::vector<double> set2_means;     // sweep
  double set2_rho = 0.0;              // point / scatter
  std::vector<double> set2_rhos;      // sweep

  long long set1_n = 0;
  long long set2_n = 0;
  int iterations = 0;
  int calibration_n = 0;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";

  QualityDistribution dist() const { return distribution_from_name(distribution); }
  RelationshipShape shape() const { return RelationshipShape::from_kind(relationship); }
};

RunSpec parse_runspec(const std::string& text, ExperimentKind expected);
RunSpec load_runspec(const std::filesystem::path& path, ExperimentKind expected);

// Full echo for provenance sidecars.
nlohmann::json runspec_to_json(const RunSpec& spec);

}  // namespace citemix
