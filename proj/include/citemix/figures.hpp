#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "citemix/engine.hpp"
#include "citemix/results_io.hpp"

namespace citemix {

// One line figure for a (distribution, relationship, set1_mean, set1_rho)
// slice: x = set 2 mean, y = combined Spearman rho in [0, 1], one polyline
// per set2_rho. The rows must form a rectangular set2_rho x set2_mean grid
// (skipped cells count as present; they leave gaps in their polyline, never
// interpolated across). Axis ranges are fixed so figures from different
// configurations are visually comparable.
void emit_line_figure(std::span<const ResultRow> slice,
                      const std::filesystem::path& svg_path);

// Groups sweep rows into slices and writes fig_<dist>_<rel>_set1rho<r>.svg
// for each; returns the paths written.
std::vector<std::filesystem::path> emit_all_line_figures(
    std::span<const ResultRow> rows, const std::filesystem::path& outdir);

// Scatter of two merged article sets: x = quality with seeded uniform jitter
// of +-0.3, y = log10(citations + 1) so zeros sit on the axis, decade
// gridlines, one marker style per set.
void emit_scatter_figure(const ArticleSet& set_a, const ArticleSet& set_b,
                         std::uint64_t jitter_seed,
                         const std::filesystem::path& svg_path,
                         const std::string& label_a = "set 1",
                         const std::string& label_b = "set 2");

}  // namespace citemix
