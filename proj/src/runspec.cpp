#include "citemix/runspec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "citemix/errors.hpp"

namespace citemix {

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::point: return "point";
    case ExperimentKind::invert: return "invert";
    case ExperimentKind::scatter: return "scatter";
  }
  return "?";
}

ExperimentKind experiment_from_name(std::string_view name) {
  if (name == "sweep") return ExperimentKind::sweep;
  if (name == "point") return ExperimentKind::point;
  if (name == "invert") return ExperimentKind::invert;
  if (name == "scatter") return ExperimentKind::scatter;
  throw InvalidParameter("unknown experiment kind '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& what) {
  std::ostringstream msg;
  msg << "runspec line " << line;
  if (!key.empty()) msg << ", key '" << key << "'";
  msg << ": " << what;
  throw ParseError(msg.str());
}

double parse_double(int line, const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x)) {
    fail(line, key, "expected a number, got '" + v + "'");
  }
  return x;
}

long long parse_int(int line, const std::string& key, const std::string& v) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(line, key, "expected an integer, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_seed(int line, const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(line, key, "expected an unsigned 64-bit seed, got '" + v + "'");
  }
  return x;
}

// `lo:hi:step` (inclusive), `a,b,c`, or a single number.
std::vector<double> parse_grid(int line, const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    std::stringstream ss(v);
    std::string lo_s, hi_s, step_s;
    if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
        !std::getline(ss, step_s)) {
      fail(line, key, "range must be lo:hi:step");
    }
    const double lo = parse_double(line, key, trim(lo_s));
    const double hi = parse_double(line, key, trim(hi_s));
    const double step = parse_double(line, key, trim(step_s));
    if (!(step > 0.0) || hi < lo) {
      fail(line, key, "range must have step > 0 and hi >= lo");
    }
    const long long count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 100000) fail(line, key, "range produces too many values");
    for (long long k = 0; k < count; ++k) {
      out.push_back(lo + static_cast<double>(k) * step);
    }
    return out;
  }
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    out.push_back(parse_double(line, key, trim(tok)));
  }
  if (out.empty()) fail(line, key, "empty value");
  return out;
}

struct ProfileDefaults {
  long long n;
  int iterations;
  int calibration_n;
  std::vector<double> rhos;
  std::vector<double> means;
};

ProfileDefaults defaults_for(Profile p) {
  if (p == Profile::paper) {
    std::vector<double> rhos, means;
    for (int k = 1; k <= 9; ++k) rhos.push_back(0.1 * k);
    for (int m = 1; m <= 40; ++m) means.push_back(m);
    return {5000, 100, 200000, std::move(rhos), std::move(means)};
  }
  return {1000, 20, 50000,
          {0.1, 0.3, 0.5, 0.7, 0.9},
          {1, 5, 10, 15, 20, 25, 30, 35, 40}};
}

void check_rho(int line, const std::string& key, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    fail(line, key, "correlation must be in (0, 1)");
  }
}

}  // namespace

RunSpec parse_runspec(const std::string& text, ExperimentKind expected) {
  RunSpec spec;
  spec.experiment = expected;

  std::optional<Profile> profile;
  std::optional<std::string> distribution;
  std::optional<RelationshipKind> relationship;
  std::optional<MeanConvention> convention;
  std::optional<double> set1_mean, set1_rho, set2_mean, set2_rho;
  std::optional<std::vector<double>> set1_rhos, set2_rhos, set2_means;
  std::optional<long long> set1_n, set2_n;
  std::optional<long long> iterations, calibration_n;
  std::optional<std::uint64_t> master_seed;
  std::optional<std::string> output_dir;
  std::optional<ExperimentKind> experiment;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(lineno, "", "expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(lineno, "", "missing key before '='");
    if (value.empty()) fail(lineno, key, "missing value");

    try {
      if (key == "experiment") {
        experiment = experiment_from_name(value);
      } else if (key == "profile") {
        if (value == "desk") profile = Profile::desk;
        else if (value == "paper") profile = Profile::paper;
        else fail(lineno, key, "expected 'desk' or 'paper'");
      } else if (key == "distribution") {
        distribution_from_name(value);  // validate now, error with line context
        distribution = value;
      } else if (key == "relationship") {
        relationship = relationship_from_name(value);
      } else if (key == "mean_convention") {
        convention = convention_from_name(value);
      } else if (key == "set1_mean") {
        set1_mean = parse_double(lineno, key, value);
      } else if (key == "set1_rho") {
        set1_rho = parse_double(lineno, key, value);
      } else if (key == "set1_rhos") {
        set1_rhos = parse_grid(lineno, key, value);
      } else if (key == "set2_mean") {
        set2_mean = parse_double(lineno, key, value);
      } else if (key == "set2_means") {
        set2_means = parse_grid(lineno, key, value);
      } else if (key == "set2_rho") {
        set2_rho = parse_double(lineno, key, value);
      } else if (key == "set2_rhos") {
        set2_rhos = parse_grid(lineno, key, value);
      } else if (key == "set1_n") {
        set1_n = parse_int(lineno, key, value);
      } else if (key == "set2_n") {
        set2_n = parse_int(lineno, key, value);
      } else if (key == "iterations") {
        iterations = parse_int(lineno, key, value);
      } else if (key == "calibration_n") {
        calibration_n = parse_int(lineno, key, value);
      } else if (key == "master_seed") {
        master_seed = parse_seed(lineno, key, value);
      } else if (key == "output_dir") {
        output_dir = value;
      } else {
        fail(lineno, key, "unknown key");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(lineno, key, e.what());
    }
  }

  if (experiment && *experiment != expected) {
    throw ParseError("runspec declares experiment '" + experiment_name(*experiment) +
                     "' but '" + experiment_name(expected) + "' was requested");
  }
  if (!master_seed) {
    throw ParseError("runspec: master_seed is mandatory (no wall-clock defaults)");
  }

  spec.profile = profile.value_or(Profile::desk);
  const ProfileDefaults d = defaults_for(spec.profile);

  if (distribution) spec.distribution = *distribution;
  if (relationship) spec.relationship = *relationship;
  if (convention) spec.convention = *convention;
  spec.set1_mean = set1_mean.value_or(20.0);
  spec.set1_n = set1_n.value_or(d.n);
  spec.set2_n = set2_n.value_or(d.n);
  spec.iterations = static_cast<int>(iterations.value_or(d.iterations));
  spec.calibration_n = static_cast<int>(calibration_n.value_or(d.calibration_n));
  spec.master_seed = *master_seed;
  spec.output_dir = output_dir.value_or("out");

  if (!(spec.set1_mean > 0.0)) throw ParseError("runspec: set1_mean must be positive");
  if (spec.set1_n < 2 || spec.set2_n < 2) {
    throw ParseError("runspec: sample sizes must be >= 2");
  }
  if (spec.iterations < 1) throw ParseError("runspec: iterations must be >= 1");
  if (spec.calibration_n < 1000) {
    throw ParseError("runspec: calibration_n must be >= 1000");
  }

  const bool needs_point_values = expected == ExperimentKind::point ||
                                  expected == ExperimentKind::scatter;
  if (expected == ExperimentKind::sweep) {
    spec.set1_rhos = set1_rhos.value_or(d.rhos);
    spec.set2_rhos = set2_rhos.value_or(d.rhos);
    spec.set2_means = set2_means.value_or(d.means);
    for (double r : spec.set1_rhos) check_rho(0, "set1_rhos", r);
    for (double r : spec.set2_rhos) check_rho(0, "set2_rhos", r);
    for (double m : spec.set2_means) {
      if (!(m > 0.0)) throw ParseError("runspec: set2_means must be positive");
    }
  } else if (needs_point_values) {
    if (!set1_rho) throw ParseError("runspec: set1_rho is required for this experiment");
    if (!set2_rho) throw ParseError("runspec: set2_rho is required for this experiment");
    if (!set2_mean) throw ParseError("runspec: set2_mean is required for this experiment");
    check_rho(0, "set1_rho", *set1_rho);
    check_rho(0, "set2_rho", *set2_rho);
    if (!(*set2_mean > 0.0)) throw ParseError("runspec: set2_mean must be positive");
    spec.set1_rho = *set1_rho;
    spec.set2_rho = *set2_rho;
    spec.set2_mean = *set2_mean;
  } else {  // invert: means only, rhos come from the assumption/estimation
    if (!set2_mean) throw ParseError("runspec: set2_mean is required for this experiment");
    if (!(*set2_mean > 0.0)) throw ParseError("runspec: set2_mean must be positive");
    spec.set2_mean = *set2_mean;
    if (set1_rho) {
      check_rho(0, "set1_rho", *set1_rho);
      spec.set1_rho = *set1_rho;
    }
  }
  return spec;
}

RunSpec load_runspec(const std::filesystem::path& path, ExperimentKind expected) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open runspec: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_runspec(buf.str(), expected);
}

nlohmann::json runspec_to_json(const RunSpec& spec) {
  nlohmann::json j{
      {"experiment", experiment_name(spec.experiment)},
      {"profile", spec.profile == Profile::paper ? "paper" : "desk"},
      {"distribution", spec.distribution},
      {"relationship", relationship_name(spec.relationship)},
      {"mean_convention", convention_name(spec.convention)},
      {"set1_mean", spec.set1_mean},
      {"set1_n", spec.set1_n},
      {"set2_n", spec.set2_n},
      {"iterations", spec.iterations},
      {"calibration_n", spec.calibration_n},
      {"master_seed", spec.master_seed},
      {"output_dir", spec.output_dir},
  };
  if (spec.experiment == ExperimentKind::sweep) {
    j["set1_rhos"] = spec.set1_rhos;
    j["set2_rhos"] = spec.set2_rhos;
    j["set2_means"] = spec.set2_means;
  } else {
    if (spec.set1_rho > 0.0) j["set1_rho"] = spec.set1_rho;
    if (spec.set2_rho > 0.0) j["set2_rho"] = spec.set2_rho;
    j["set2_mean"] = spec.set2_mean;
  }
  return j;
}

}  // namespace citemix
