#include "citemix/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "citemix/errors.hpp"

namespace citemix {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

ResultRow to_result_row(const PointResult& point, int iterations) {
  if (point.params.size() != 2) {
    throw InvalidParameter("to_result_row: expects exactly 2 subsets per point");
  }
  ResultRow row;
  row.distribution = distribution_name(point.params[0].dist);
  row.relationship = relationship_name(point.params[0].shape.kind());
  row.set1_mean = point.params[0].mean;
  row.set1_rho = point.params[0].rho;
  row.set2_mean = point.params[1].mean;
  row.set2_rho = point.params[1].rho;
  row.iterations = iterations;
  row.status = point_status_name(point.status);
  if (point.status == PointStatus::ok) {
    row.combined_rho_mean = point.combined_rho.mean;
    row.ci_half_width = point.combined_rho.half_width;
  }
  return row;
}

std::vector<ResultRow> to_result_rows(std::span<const PointResult> points,
                                      int iterations) {
  std::vector<ResultRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back(to_result_row(p, iterations));
  return rows;
}

namespace {

std::string row_to_csv(const ResultRow& r) {
  std::string line = r.distribution + "," + r.relationship + "," +
                     format_number(r.set1_mean) + "," + format_number(r.set1_rho) +
                     "," + format_number(r.set2_mean) + "," +
                     format_number(r.set2_rho) + ",";
  if (r.status == "ok") {
    line += format_number(r.combined_rho_mean) + "," + format_number(r.ci_half_width);
  } else {
    line += ",";
  }
  line += "," + std::to_string(r.iterations) + "," + r.status;
  return line;
}

}  // namespace

nlohmann::json result_row_to_json(const ResultRow& row) {
  nlohmann::json j{{"distribution", row.distribution},
                   {"relationship", row.relationship},
                   {"set1_mean", row.set1_mean},
                   {"set1_rho", row.set1_rho},
                   {"set2_mean", row.set2_mean},
                   {"set2_rho", row.set2_rho},
                   {"iterations", row.iterations},
                   {"status", row.status}};
  if (row.status == "ok") {
    j["combined_rho_mean"] = row.combined_rho_mean;
    j["ci_half_width"] = row.ci_half_width;
  } else {
    j["combined_rho_mean"] = nullptr;
    j["ci_half_width"] = nullptr;
  }
  return j;
}

void write_results(std::span<const ResultRow> rows,
                   const std::filesystem::path& csv_path,
                   const nlohmann::json* runspec_echo) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
      throw IoError("cannot open results file for writing: " + csv_path.string());
    }
    out << kResultsCsvHeader << "\n";
    for (const auto& r : rows) out << row_to_csv(r) << "\n";
    if (!out.good()) {
      throw IoError("failed writing results: " + csv_path.string());
    }
  }

  nlohmann::json doc;
  doc["runspec"] = runspec_echo ? *runspec_echo : nlohmann::json(nullptr);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back(result_row_to_json(r));
  doc["results"] = std::move(arr);

  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open results file for writing: " + json_path.string());
  }
  out << doc.dump(2) << "\n";
  if (!out.good()) {
    throw IoError("failed writing results: " + json_path.string());
  }
}

std::vector<ResultRow> read_results(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) {
    throw IoError("cannot open results file: " + csv_path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("results file is empty: " + csv_path.string());
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsCsvHeader) {
    throw ParseError("unexpected results header in " + csv_path.string());
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    if (fields.size() != 10) {
      throw ParseError(csv_path.string() + ":" + std::to_string(lineno) +
                       ": expected 10 fields, got " + std::to_string(fields.size()));
    }
    try {
      ResultRow r;
      r.distribution = fields[0];
      r.relationship = fields[1];
      r.set1_mean = std::stod(fields[2]);
      r.set1_rho = std::stod(fields[3]);
      r.set2_mean = std::stod(fields[4]);
      r.set2_rho = std::stod(fields[5]);
      r.status = fields[9];
      r.iterations = std::stoi(fields[8]);
      if (r.status == "ok") {
        r.combined_rho_mean = std::stod(fields[6]);
        r.ci_half_width = std::stod(fields[7]);
      } else if (!fields[6].empty() || !fields[7].empty()) {
        throw ParseError("skipped row carries combined values");
      }
      rows.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(csv_path.string() + ":" + std::to_string(lineno) + ": " +
                       e.what());
    }
  }
  return rows;
}

}  // namespace citemix
