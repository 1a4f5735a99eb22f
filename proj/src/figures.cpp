#include "citemix/figures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "citemix/errors.hpp"
#include "citemix/rng.hpp"

namespace citemix {

namespace {

constexpr const char* kPalette[9] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                     "#d62728", "#9467bd", "#8c564b",
                                     "#e377c2", "#7f7f7f", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Canvas {
  double width = 880, height = 560;
  double left = 70, right = 700, top = 50, bottom = 500;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

  double x(double v) const {
    return left + (v - x_min) / (x_max - x_min) * (right - left);
  }
  double y(double v) const {
    return bottom - (v - y_min) / (y_max - y_min) * (bottom - top);
  }
};

void open_svg(std::string& svg, const Canvas& c, const std::string& title) {
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(c.width) +
         "\" height=\"" + num(c.height) + "\" viewBox=\"0 0 " + num(c.width) +
         " " + num(c.height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"" + num(c.width) + "\" height=\"" + num(c.height) +
         "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num((c.left + c.right) / 2) + "\" y=\"28\" font-size=\"16\" "
         "text-anchor=\"middle\">" + title + "</text>\n";
}

void axis_frame(std::string& svg, const Canvas& c, const std::string& x_label,
                const std::string& y_label) {
  svg += "<line x1=\"" + num(c.left) + "\" y1=\"" + num(c.bottom) + "\" x2=\"" +
         num(c.right) + "\" y2=\"" + num(c.bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + num(c.left) + "\" y1=\"" + num(c.top) + "\" x2=\"" +
         num(c.left) + "\" y2=\"" + num(c.bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + num((c.left + c.right) / 2) + "\" y=\"" +
         num(c.bottom + 42) + "\" font-size=\"13\" text-anchor=\"middle\">" +
         x_label + "</text>\n";
  svg += "<text x=\"22\" y=\"" + num((c.top + c.bottom) / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 22 " +
         num((c.top + c.bottom) / 2) + ")\">" + y_label + "</text>\n";
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char ch : s) {
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-')
               ? ch
               : '-';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open figure for writing: " + path.string());
  }
  out << content;
  if (!out.good()) {
    throw IoError("failed writing figure: " + path.string());
  }
}

}  // namespace

void emit_line_figure(std::span<const ResultRow> slice,
                      const std::filesystem::path& svg_path) {
  if (slice.empty()) {
    throw InvalidParameter("emit_line_figure: empty slice");
  }
  const ResultRow& head = slice.front();
  std::set<double> rho_values, mean_values;
  std::map<std::pair<double, double>, const ResultRow*> cells;
  for (const ResultRow& r : slice) {
    if (r.distribution != head.distribution || r.relationship != head.relationship ||
        r.set1_mean != head.set1_mean || r.set1_rho != head.set1_rho) {
      throw InvalidParameter(
          "emit_line_figure: rows mix distribution/relationship/set1 parameters");
    }
    rho_values.insert(r.set2_rho);
    mean_values.insert(r.set2_mean);
    if (!cells.emplace(std::make_pair(r.set2_rho, r.set2_mean), &r).second) {
      throw InvalidParameter("emit_line_figure: duplicate grid cell");
    }
  }
  if (cells.size() != rho_values.size() * mean_values.size()) {
    throw InvalidParameter(
        "emit_line_figure: slice is not a rectangular set2_rho x set2_mean grid");
  }

  Canvas c;
  c.x_min = 0.0;
  c.x_max = std::max(40.0, *mean_values.rbegin());
  c.y_min = 0.0;
  c.y_max = 1.0;

  std::string svg;
  const std::string title = head.distribution + " / " + head.relationship +
                            ", set 1 mean " + format_number(head.set1_mean) +
                            ", set 1 rho " + format_number(head.set1_rho);
  open_svg(svg, c, title);

  // y gridlines every 0.1
  for (int k = 0; k <= 10; ++k) {
    const double v = k / 10.0;
    svg += "<line x1=\"" + num(c.left) + "\" y1=\"" + num(c.y(v)) + "\" x2=\"" +
           num(c.right) + "\" y2=\"" + num(c.y(v)) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + num(c.left - 8) + "\" y=\"" + num(c.y(v) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + format_number(v) +
           "</text>\n";
  }
  // x ticks every 5 means
  for (double v = 0.0; v <= c.x_max + 1e-9; v += 5.0) {
    svg += "<line x1=\"" + num(c.x(v)) + "\" y1=\"" + num(c.bottom) + "\" x2=\"" +
           num(c.x(v)) + "\" y2=\"" + num(c.bottom + 5) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(c.x(v)) + "\" y=\"" + num(c.bottom + 20) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + format_number(v) +
           "</text>\n";
  }
  axis_frame(svg, c, "set 2 citation mean", "combined Spearman correlation");

  int color_index = 0;
  double legend_y = c.top + 10;
  for (double rho : rho_values) {
    const char* color = kPalette[color_index % 9];
    // consecutive ok cells form one polyline segment; skipped cells break it
    std::vector<std::pair<double, double>> segment;
    auto flush = [&]() {
      if (segment.size() >= 2) {
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < segment.size(); ++i) {
          if (i) svg += " ";
          svg += num(segment[i].first) + "," + num(segment[i].second);
        }
        svg += "\"/>\n";
      } else if (segment.size() == 1) {
        svg += "<circle cx=\"" + num(segment[0].first) + "\" cy=\"" +
               num(segment[0].second) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
      segment.clear();
    };
    for (double mean : mean_values) {
      const ResultRow* r = cells.at({rho, mean});
      if (r->status == "ok") {
        segment.emplace_back(c.x(mean), c.y(std::clamp(r->combined_rho_mean, 0.0, 1.0)));
      } else {
        flush();
      }
    }
    flush();

    svg += "<rect x=\"" + num(c.right + 16) + "\" y=\"" + num(legend_y - 9) +
           "\" width=\"18\" height=\"4\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + num(c.right + 40) + "\" y=\"" + num(legend_y - 3) +
           "\" font-size=\"12\">set 2 rho = " + format_number(rho) + "</text>\n";
    legend_y += 18;
    ++color_index;
  }
  svg += "</svg>\n";
  write_file(svg_path, svg);
}

std::vector<std::filesystem::path> emit_all_line_figures(
    std::span<const ResultRow> rows, const std::filesystem::path& outdir) {
  std::map<std::tuple<std::string, std::string, double, double>,
           std::vector<ResultRow>>
      slices;
  for (const ResultRow& r : rows) {
    slices[{r.distribution, r.relationship, r.set1_mean, r.set1_rho}].push_back(r);
  }
  std::filesystem::create_directories(outdir);
  std::vector<std::filesystem::path> written;
  for (const auto& [key, slice] : slices) {
    const auto& [dist, rel, mean1, rho1] = key;
    const std::filesystem::path path =
        outdir / ("fig_" + sanitize(dist) + "_" + sanitize(rel) + "_set1rho" +
                  sanitize(format_number(rho1)) + ".svg");
    emit_line_figure(slice, path);
    written.push_back(path);
  }
  return written;
}

void emit_scatter_figure(const ArticleSet& set_a, const ArticleSet& set_b,
                         std::uint64_t jitter_seed,
                         const std::filesystem::path& svg_path,
                         const std::string& label_a, const std::string& label_b) {
  if (set_a.qualities.empty() || set_b.qualities.empty()) {
    throw InvalidParameter("emit_scatter_figure: both sets must be non-empty");
  }

  std::int64_t max_count = 0;
  for (std::int64_t v : set_a.citations) max_count = std::max(max_count, v);
  for (std::int64_t v : set_b.citations) max_count = std::max(max_count, v);

  Canvas c;
  c.right = 810;
  c.x_min = -0.5;
  c.x_max = 4.5;
  c.y_min = 0.0;
  c.y_max = std::max(3.0, std::ceil(std::log10(static_cast<double>(max_count) + 1.0)));

  std::string svg;
  open_svg(svg, c, "citations vs quality: " + label_a + " and " + label_b);

  // decade gridlines on the log axis; zeros plot at log10(0 + 1) = 0
  for (int d = 0; d <= static_cast<int>(c.y_max); ++d) {
    svg += "<line x1=\"" + num(c.left) + "\" y1=\"" + num(c.y(d)) + "\" x2=\"" +
           num(c.right) + "\" y2=\"" + num(c.y(d)) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.7\"/>\n";
    svg += "<text x=\"" + num(c.left - 8) + "\" y=\"" + num(c.y(d) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" +
           format_number(std::pow(10.0, d)) + "</text>\n";
  }
  for (int q = 0; q < kQualityLevels; ++q) {
    svg += "<text x=\"" + num(c.x(q)) + "\" y=\"" + num(c.bottom + 20) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(q) +
           "</text>\n";
  }
  axis_frame(svg, c, "quality score (jittered)", "citations + 1 (log scale)");

  Rng rng(jitter_seed);
  auto draw = [&](const ArticleSet& set, bool circles, const char* color) {
    for (std::size_t i = 0; i < set.qualities.size(); ++i) {
      const double jitter = rng.next_unit() * 0.6 - 0.3;
      const double px = c.x(set.qualities[i] + jitter);
      const double py =
          c.y(std::log10(static_cast<double>(set.citations[i]) + 1.0));
      if (circles) {
        svg += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) +
               "\" r=\"2.2\" fill=\"" + color + "\" fill-opacity=\"0.35\"/>\n";
      } else {
        svg += "<rect x=\"" + num(px - 1.6) + "\" y=\"" + num(py - 1.6) +
               "\" width=\"3.2\" height=\"3.2\" fill=\"" + color +
               "\" fill-opacity=\"0.35\"/>\n";
      }
    }
  };
  draw(set_a, true, "#1f77b4");
  draw(set_b, false, "#ff7f0e");

  svg += "<circle cx=\"" + num(c.left + 14) + "\" cy=\"" + num(c.top + 8) +
         "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  svg += "<text x=\"" + num(c.left + 24) + "\" y=\"" + num(c.top + 12) +
         "\" font-size=\"12\">" + label_a + "</text>\n";
  svg += "<rect x=\"" + num(c.left + 11) + "\" y=\"" + num(c.top + 23) +
         "\" width=\"6\" height=\"6\" fill=\"#ff7f0e\"/>\n";
  svg += "<text x=\"" + num(c.left + 24) + "\" y=\"" + num(c.top + 30) +
         "\" font-size=\"12\">" + label_b + "</text>\n";
  svg += "</svg>\n";
  write_file(svg_path, svg);
}

}  // namespace citemix
