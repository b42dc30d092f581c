#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spinsync/liouvillian.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

enum class JobMode { steady, dist, sweep2d, locus, perturb, entangle };
enum class OutputFormat { csv, json };
enum class JointKind { none, s2, s3_ab_bc, s3_ab_ca };
enum class LocusTarget { m1_a, m1_ab };

struct AxisSpec {
  std::string field;
  bool log_scale = false;
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  bool operator==(const AxisSpec&) const = default;

  double value_at(int i) const {
    if (count < 1 || i < 0 || i >= count) throw ConfigError("axis index out of range");
    if (count == 1) return min;
    const double t = static_cast<double>(i) / (count - 1);
    if (log_scale) return min * std::exp(t * std::log(max / min));
    return min + t * (max - min);
  }

  void validate() const {
    if (field.empty()) throw ConfigError("grid axis needs a field name");
    if (count < 1) throw ConfigError("grid axis count must be >= 1");
    if (count > 1 && !(max > min)) throw ConfigError("grid axis needs max > min");
    if (log_scale && !(min > 0.0)) throw ConfigError("log axis needs min > 0");
  }
};

struct LocusSpec {
  LocusTarget target = LocusTarget::m1_ab;
  double g_value = 0.05;
  bool g_fraction_of_rate_sum = true;
  double gamma_d = 1.0;
  double probe_omega = 2e-3;
  double ratio_min = 1e-4;
  double ratio_max = 0.9;

  bool operator==(const LocusSpec&) const = default;
};

struct JobSpec {
  JobMode mode = JobMode::steady;
  SystemConfig system;
  std::vector<std::string> outputs;  // empty -> mode defaults
  std::string out_path;              // empty -> stdout
  OutputFormat format = OutputFormat::csv;
  int workers = 0;  // 0 -> hardware concurrency
  int samples = 360;
  int max_order = 4;
  bool entropy_base_two = false;
  JointKind joint = JointKind::none;
  AxisSpec x, y;
  LocusSpec locus;

  bool operator==(const JobSpec&) const = default;
};

/// Grid/sweep field names: per-spin drives and rates, per-bond couplings,
/// plus `gamma_inverted` which sets the A gain and B damping together (the
/// inverted-rate scans hold gamma^g_A = gamma^d_B).
inline void apply_field(SystemConfig& c, const std::string& field, double value) {
  auto site = [&](char letter) {
    const int j = letter - 'A';
    if (j < 0 || j >= c.n_spins) throw ConfigError("field site out of range: " + field);
    return j;
  };
  if (field.rfind("omega_", 0) == 0 && field.size() == 7) {
    c.omega[site(field[6])] = value;
  } else if (field == "g_AB") {
    if (c.n_spins < 2) throw ConfigError("g_AB needs at least two spins");
    c.g[0] = value;
  } else if (field == "g_BC") {
    if (c.n_spins < 3) throw ConfigError("g_BC needs three spins");
    c.g[1] = value;
  } else if (field.rfind("gamma_g_", 0) == 0 && field.size() == 9) {
    c.gamma_g[site(field[8])] = value;
  } else if (field.rfind("gamma_d_", 0) == 0 && field.size() == 9) {
    c.gamma_d[site(field[8])] = value;
  } else if (field == "gamma_inverted") {
    if (c.n_spins != 2) throw ConfigError("gamma_inverted needs a two-spin system");
    c.gamma_g[0] = value;
    c.gamma_d[1] = value;
  } else {
    throw ConfigError("unknown sweep field: " + field);
  }
}

namespace detail {

inline std::string trim(std::string s) {
  const auto is_space = [](unsigned char ch) { return std::isspace(ch) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

inline double parse_number(const std::string& s, int line_no) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
  if (used != s.size())
    throw ConfigError("line " + std::to_string(line_no) + ": trailing junk in number: '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, int line_no) {
  const double v = parse_number(s, line_no);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 0.0)
    throw ConfigError("line " + std::to_string(line_no) + ": expected an integer: '" + s + "'");
  return i;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (out.empty()) out.push_back("");
  return out;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace detail

inline std::string to_string(JobMode m) {
  switch (m) {
    case JobMode::steady: return "steady";
    case JobMode::dist: return "dist";
    case JobMode::sweep2d: return "sweep2d";
    case JobMode::locus: return "locus";
    case JobMode::perturb: return "perturb";
    case JobMode::entangle: return "entangle";
  }
  throw ConfigError("bad mode");
}

inline JobMode mode_from_string(const std::string& s) {
  for (JobMode m : {JobMode::steady, JobMode::dist, JobMode::sweep2d, JobMode::locus,
                    JobMode::perturb, JobMode::entangle})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mode: " + s);
}

/// Parses the INI-style job description; unknown sections or keys are
/// rejected with the offending line number. `#` starts a comment. A mode
/// override (from a CLI subcommand) replaces the file's mode before the
/// mode-specific checks run.
inline JobSpec parse_config(const std::string& text, const JobMode* mode_override = nullptr) {
  JobSpec spec;
  spec.system.n_spins = 0;  // must be set explicitly
  bool saw_x = false;
  bool saw_y = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  std::vector<std::pair<std::string, std::vector<double>>> rate_fixups;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "job" && section != "grid" && section != "locus")
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    auto numbers = [&] {
      std::vector<double> out;
      for (const auto& item : detail::split_list(value)) out.push_back(detail::parse_number(item, line_no));
      return out;
    };
    auto bad_key = [&]() -> ConfigError {
      return ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key +
                         "' in section [" + section + "]");
    };

    if (section == "system") {
      if (key == "n_spins") {
        spec.system.n_spins = detail::parse_int(value, line_no);
        if (spec.system.n_spins < 1 || spec.system.n_spins > 3)
          throw ConfigError("line " + std::to_string(line_no) + ": n_spins must be 1, 2, or 3");
      } else if (key == "gamma_g" || key == "gamma_d" || key == "omega" || key == "g") {
        rate_fixups.emplace_back(key, numbers());
      } else {
        throw bad_key();
      }
    } else if (section == "job") {
      if (key == "mode") {
        spec.mode = mode_from_string(value);
      } else if (key == "outputs") {
        spec.outputs = detail::split_list(value);
        if (spec.outputs.size() == 1 && spec.outputs[0].empty()) spec.outputs.clear();
      } else if (key == "out") {
        spec.out_path = value;
      } else if (key == "format") {
        if (value == "csv") spec.format = OutputFormat::csv;
        else if (value == "json") spec.format = OutputFormat::json;
        else throw ConfigError("line " + std::to_string(line_no) + ": format must be csv or json");
      } else if (key == "workers") {
        spec.workers = detail::parse_int(value, line_no);
        if (spec.workers < 0) throw ConfigError("workers must be >= 0");
      } else if (key == "samples") {
        spec.samples = detail::parse_int(value, line_no);
      } else if (key == "max_order") {
        spec.max_order = detail::parse_int(value, line_no);
      } else if (key == "entropy_base") {
        if (value == "e") spec.entropy_base_two = false;
        else if (value == "2") spec.entropy_base_two = true;
        else throw ConfigError("line " + std::to_string(line_no) + ": entropy_base must be e or 2");
      } else if (key == "joint") {
        if (value == "none") spec.joint = JointKind::none;
        else if (value == "s2") spec.joint = JointKind::s2;
        else if (value == "s3_ab_bc") spec.joint = JointKind::s3_ab_bc;
        else if (value == "s3_ab_ca") spec.joint = JointKind::s3_ab_ca;
        else throw ConfigError("line " + std::to_string(line_no) + ": unknown joint kind");
      } else {
        throw bad_key();
      }
    } else if (section == "grid") {
      const bool is_x = key == "x" || key.rfind("x_", 0) == 0;
      const bool is_y = key == "y" || key.rfind("y_", 0) == 0;
      if (!is_x && !is_y) throw bad_key();
      AxisSpec& axis = is_x ? spec.x : spec.y;
      if (is_x) saw_x = true;
      if (is_y) saw_y = true;
      const std::string sub = key == "x" || key == "y" ? "field" : key.substr(2);
      if (sub == "field") {
        axis.field = value;
      } else if (sub == "scale") {
        if (value == "linear") axis.log_scale = false;
        else if (value == "log") axis.log_scale = true;
        else throw ConfigError("line " + std::to_string(line_no) + ": scale must be linear or log");
      } else if (sub == "min") {
        axis.min = detail::parse_number(value, line_no);
      } else if (sub == "max") {
        axis.max = detail::parse_number(value, line_no);
      } else if (sub == "count") {
        axis.count = detail::parse_int(value, line_no);
      } else {
        throw bad_key();
      }
    } else if (section == "locus") {
      if (key == "target") {
        if (value == "m1_A") spec.locus.target = LocusTarget::m1_a;
        else if (value == "m1_AB") spec.locus.target = LocusTarget::m1_ab;
        else throw ConfigError("line " + std::to_string(line_no) + ": target must be m1_A or m1_AB");
      } else if (key == "g") {
        spec.locus.g_value = detail::parse_number(value, line_no);
      } else if (key == "g_mode") {
        if (value == "absolute") spec.locus.g_fraction_of_rate_sum = false;
        else if (value == "rate_sum_fraction") spec.locus.g_fraction_of_rate_sum = true;
        else throw ConfigError("line " + std::to_string(line_no) +
                               ": g_mode must be absolute or rate_sum_fraction");
      } else if (key == "gamma_d") {
        spec.locus.gamma_d = detail::parse_number(value, line_no);
      } else if (key == "probe_omega") {
        spec.locus.probe_omega = detail::parse_number(value, line_no);
      } else if (key == "ratio_min") {
        spec.locus.ratio_min = detail::parse_number(value, line_no);
      } else if (key == "ratio_max") {
        spec.locus.ratio_max = detail::parse_number(value, line_no);
      } else {
        throw bad_key();
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    }
  }

  if (mode_override) spec.mode = *mode_override;

  if (spec.mode != JobMode::locus) {
    if (spec.system.n_spins == 0)
      throw ConfigError("[system] n_spins is required");
    const int n = spec.system.n_spins;
    spec.system.gamma_g.assign(n, 1.0);
    spec.system.gamma_d.assign(n, 1.0);
    spec.system.omega.assign(n, 0.0);
    spec.system.g.assign(n - 1, 0.0);
    for (const auto& [key, values] : rate_fixups) {
      const size_t want = key == "g" ? n - 1 : n;
      std::vector<double>* dst = key == "gamma_g"  ? &spec.system.gamma_g
                                 : key == "gamma_d" ? &spec.system.gamma_d
                                 : key == "omega"   ? &spec.system.omega
                                                    : &spec.system.g;
      if (values.size() == 1) {
        dst->assign(want, values[0]);
      } else if (values.size() == want) {
        *dst = values;
      } else {
        throw ConfigError("[system] " + key + " needs 1 or " + std::to_string(want) + " values");
      }
    }
    spec.system.validate();
  } else if (spec.system.n_spins != 0) {
    throw ConfigError("locus mode defines its own system; drop the [system] section");
  }

  if (spec.mode == JobMode::sweep2d) {
    if (!saw_x && !saw_y) {
      // no [grid] keys at all: 50x50 log grid over the synchronization regime
      const int n = spec.system.n_spins;
      spec.x = AxisSpec{n == 3 ? "g_AB" : "omega_A", true, 1e-2, 10.0, 50};
      if (n > 1) spec.y = AxisSpec{n == 3 ? "g_BC" : "g_AB", true, 1e-2, 10.0, 50};
      saw_y = n > 1;
    }
    spec.x.validate();
    if (saw_y) spec.y.validate();
    else spec.y = AxisSpec{};  // single row
    // probe the fields once so typos fail at parse time
    SystemConfig probe = spec.system;
    apply_field(probe, spec.x.field, spec.x.value_at(0));
    if (!spec.y.field.empty()) apply_field(probe, spec.y.field, spec.y.value_at(0));
  }
  if (spec.mode == JobMode::dist) {
    if (spec.samples < 8 || spec.samples > 100000)
      throw ConfigError("dist mode needs 8 <= samples <= 100000");
    if (spec.joint == JointKind::s2 && spec.system.n_spins != 2)
      throw ConfigError("joint = s2 needs a two-spin system");
    if ((spec.joint == JointKind::s3_ab_bc || spec.joint == JointKind::s3_ab_ca) &&
        spec.system.n_spins != 3)
      throw ConfigError("three-spin joint kinds need a three-spin system");
  }
  if (spec.mode == JobMode::perturb) {
    if (spec.max_order < 0 || spec.max_order > 8)
      throw ConfigError("perturb mode needs 0 <= max_order <= 8");
  }
  if (spec.mode == JobMode::locus) {
    if (!(spec.locus.gamma_d > 0.0) || !(spec.locus.probe_omega > 0.0))
      throw ConfigError("locus mode needs positive gamma_d and probe_omega");
    if (!(spec.locus.ratio_min > 0.0) || !(spec.locus.ratio_max > spec.locus.ratio_min))
      throw ConfigError("locus mode needs 0 < ratio_min < ratio_max");
    if (!(spec.locus.g_value > 0.0)) throw ConfigError("locus mode needs g > 0");
    spec.system = SystemConfig{};  // unused; keep the canonical default
  }
  return spec;
}

/// Canonical text form; parse_config(serialize_config(s)) reproduces s.
inline std::string serialize_config(const JobSpec& spec) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  if (spec.mode != JobMode::locus) {
    out += "[system]\n";
    kv("n_spins", std::to_string(spec.system.n_spins));
    kv("gamma_g", detail::join(spec.system.gamma_g));
    kv("gamma_d", detail::join(spec.system.gamma_d));
    kv("omega", detail::join(spec.system.omega));
    if (!spec.system.g.empty()) kv("g", detail::join(spec.system.g));
    out += "\n";
  }
  out += "[job]\n";
  kv("mode", to_string(spec.mode));
  if (!spec.outputs.empty()) {
    std::string joined;
    for (size_t i = 0; i < spec.outputs.size(); ++i)
      joined += (i ? ", " : "") + spec.outputs[i];
    kv("outputs", joined);
  }
  if (!spec.out_path.empty()) kv("out", spec.out_path);
  kv("format", spec.format == OutputFormat::csv ? "csv" : "json");
  kv("workers", std::to_string(spec.workers));
  kv("samples", std::to_string(spec.samples));
  kv("max_order", std::to_string(spec.max_order));
  kv("entropy_base", spec.entropy_base_two ? "2" : "e");
  switch (spec.joint) {
    case JointKind::none: kv("joint", "none"); break;
    case JointKind::s2: kv("joint", "s2"); break;
    case JointKind::s3_ab_bc: kv("joint", "s3_ab_bc"); break;
    case JointKind::s3_ab_ca: kv("joint", "s3_ab_ca"); break;
  }
  if (spec.mode == JobMode::sweep2d) {
    out += "\n[grid]\n";
    kv("x", spec.x.field);
    kv("x_scale", spec.x.log_scale ? "log" : "linear");
    kv("x_min", detail::fmt(spec.x.min));
    kv("x_max", detail::fmt(spec.x.max));
    kv("x_count", std::to_string(spec.x.count));
    if (!spec.y.field.empty()) {
      kv("y", spec.y.field);
      kv("y_scale", spec.y.log_scale ? "log" : "linear");
      kv("y_min", detail::fmt(spec.y.min));
      kv("y_max", detail::fmt(spec.y.max));
      kv("y_count", std::to_string(spec.y.count));
    }
  }
  if (spec.mode == JobMode::locus) {
    out += "\n[locus]\n";
    kv("target", spec.locus.target == LocusTarget::m1_a ? "m1_A" : "m1_AB");
    kv("g", detail::fmt(spec.locus.g_value));
    kv("g_mode", spec.locus.g_fraction_of_rate_sum ? "rate_sum_fraction" : "absolute");
    kv("gamma_d", detail::fmt(spec.locus.gamma_d));
    kv("probe_omega", detail::fmt(spec.locus.probe_omega));
    kv("ratio_min", detail::fmt(spec.locus.ratio_min));
    kv("ratio_max", detail::fmt(spec.locus.ratio_max));
  }
  return out;
}

}  // namespace spinsync
