#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "citemix/engine.hpp"

namespace citemix {

// One grid cell, flattened for persistence. combined_rho_mean and
// ci_half_width are meaningful only when status == "ok"; skipped rows emit
// empty fields.
struct ResultRow {
  std::string distribution;
  std::string relationship;
  double set1_mean = 0.0;
  double set1_rho = 0.0;
  double set2_mean = 0.0;
  double set2_rho = 0.0;
  double combined_rho_mean = 0.0;
  double ci_half_width = 0.0;
  int iterations = 0;
  std::string status = "ok";
};

inline constexpr const char* kResultsCsvHeader =
    "distribution,relationship,set1_mean,set1_rho,set2_mean,set2_rho,"
    "combined_rho_mean,ci_half_width,iterations,status";

// %.6g: enough digits to compare against 0.001 tolerances, short enough for
// stable diffs.
std::string format_number(double v);

ResultRow to_result_row(const PointResult& point, int iterations);
std::vector<ResultRow> to_result_rows(std::span<const PointResult> points,
                                      int iterations);

// Writes the CSV (exact header above, 6 significant digits, rows in the
// caller's order) and an adjacent .json file carrying the same rows plus the
// run spec echoed for provenance when given.
void write_results(std::span<const ResultRow> rows,
                   const std::filesystem::path& csv_path,
                   const nlohmann::json* runspec_echo = nullptr);

std::vector<ResultRow> read_results(const std::filesystem::path& csv_path);

nlohmann::json result_row_to_json(const ResultRow& row);

}  // namespace citemix
