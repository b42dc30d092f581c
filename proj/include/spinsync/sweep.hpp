#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "spinsync/analytics.hpp"
#include "spinsync/config.hpp"
#include "spinsync/correlations.hpp"
#include "spinsync/liouvillian.hpp"
#include "spinsync/perturbation.hpp"
#include "spinsync/sync_measures.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

struct Cell {
  bool is_text = false;
  double num = 0.0;
  std::string text;

  static Cell number(double v) { return Cell{false, v, {}}; }
  static Cell string(std::string s) { return Cell{true, 0.0, std::move(s)}; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline int site_index(char letter, int n_spins, const std::string& name) {
  const int j = letter - 'A';
  if (j < 0 || j >= n_spins) throw ConfigError("output '" + name + "' references a missing spin");
  return j;
}

inline std::pair<int, int> pair_index(const std::string& suffix, int n_spins,
                                      const std::string& name) {
  if (suffix.size() != 2) throw ConfigError("output '" + name + "' has a malformed pair");
  return {site_index(suffix[0], n_spins, name), site_index(suffix[1], n_spins, name)};
}

}  // namespace detail

struct SolveContext {
  const SystemConfig& config;
  const DensityMatrix& rho;
  double residual;
};

/// Compiled list of per-point output quantities; building it validates the
/// requested names against the system size.
struct Evaluator {
  std::vector<std::string> columns;
  std::vector<std::function<void(const SolveContext&, std::vector<Cell>&)>> fns;

  void evaluate(const SolveContext& ctx, std::vector<Cell>& row) const {
    for (const auto& fn : fns) fn(ctx, row);
  }

  size_t width() const { return columns.size(); }
};

inline DensityMatrix dark_state(int n_spins) {
  const int d = pow3(n_spins);
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m((d - 1) / 2, (d - 1) / 2) = 1.0;
  return DensityMatrix{std::move(m), n_spins};
}

inline std::vector<std::string> default_outputs(JobMode mode, int n_spins) {
  if (mode == JobMode::entangle) {
    switch (n_spins) {
      case 1: return {"entropy", "p_max"};
      case 2: return {"entropy_A", "entropy_B", "mutual_AB", "neg_A", "corr1_AB", "corr2_AB", "p_max"};
      default:
        return {"entropy_A", "entropy_B", "entropy_C", "mutual_AB", "mutual_BC", "mutual_CA",
                "neg_A",     "neg_B",     "neg_C",     "corr2_AB",  "corr2_BC",  "corr2_CA",
                "p_max"};
    }
  }
  if (mode == JobMode::perturb) {
    switch (n_spins) {
      case 1: return {"m1_A", "m2_A"};
      case 2: return {"m1_A", "m1_B", "m1_AB", "m2_AB"};
      default: return {"m1_CA", "m2_CA"};
    }
  }
  switch (n_spins) {
    case 1: return {"m1_A", "m2_A", "p_max"};
    case 2: return {"m1_A", "m2_A", "m1_B", "m2_B", "m1_AB", "m2_AB", "p_max"};
    default: return {"m1_AB", "m2_AB", "m1_BC", "m2_BC", "m1_CA", "m2_CA", "p_max"};
  }
}

inline Evaluator make_evaluator(const std::vector<std::string>& names, int n_spins,
                                bool entropy_base_two) {
  Evaluator ev;
  const double unit = entropy_base_two ? 1.0 / std::log(2.0) : 1.0;
  auto real_out = [&](const std::string& name, std::function<double(const SolveContext&)> f) {
    ev.columns.push_back(name);
    ev.fns.push_back([f](const SolveContext& ctx, std::vector<Cell>& row) {
      row.push_back(Cell::number(f(ctx)));
    });
  };
  auto complex_out = [&](const std::string& name, std::function<Complex(const SolveContext&)> f) {
    for (const char* suffix : {"_re", "_im", "_abs", "_phase"})
      ev.columns.push_back(name + suffix);
    ev.fns.push_back([f](const SolveContext& ctx, std::vector<Cell>& row) {
      const Complex v = f(ctx);
      row.push_back(Cell::number(v.real()));
      row.push_back(Cell::number(v.imag()));
      row.push_back(Cell::number(std::abs(v)));
      row.push_back(Cell::number(std::arg(v)));
    });
  };

  for (const std::string& name : names) {
    if (name.size() >= 4 && (name[0] == 'm') && (name[1] == '1' || name[1] == '2') &&
        name[2] == '_') {
      const int order = name[1] - '0';
      const std::string suffix = name.substr(3);
      if (suffix.size() == 1) {
        const int site = detail::site_index(suffix[0], n_spins, name);
        complex_out(name, [site, order](const SolveContext& ctx) {
          return moment_of(ctx.rho, MomentSpec::site(site, order)).value;
        });
      } else {
        const auto [i, j] = detail::pair_index(suffix, n_spins, name);
        complex_out(name, [i = i, j = j, order](const SolveContext& ctx) {
          return moment_of(ctx.rho, MomentSpec::pair_of(i, j, order)).value;
        });
      }
    } else if (name == "p_max") {
      real_out(name, [n_spins](const SolveContext& ctx) {
        return population_deviation(ctx.rho, dark_state(n_spins));
      });
    } else if (name == "p_max_inf") {
      if (n_spins != 2) throw ConfigError("p_max_inf needs a two-spin system");
      real_out(name, [](const SolveContext& ctx) {
        return population_deviation(ctx.rho, rho_infinity());
      });
    } else if (name == "purity") {
      real_out(name, [](const SolveContext& ctx) {
        return (ctx.rho.matrix * ctx.rho.matrix).trace().real();
      });
    } else if (name == "entropy") {
      real_out(name, [unit](const SolveContext& ctx) {
        return unit * von_neumann_entropy(ctx.rho);
      });
    } else if (name.rfind("entropy_", 0) == 0 && name.size() == 9) {
      const int site = detail::site_index(name[8], n_spins, name);
      real_out(name, [site, unit](const SolveContext& ctx) {
        return unit * von_neumann_entropy(partial_trace(ctx.rho, {{site}}));
      });
    } else if (name.rfind("mutual_", 0) == 0) {
      const auto [i, j] = detail::pair_index(name.substr(7), n_spins, name);
      real_out(name, [i = i, j = j, unit](const SolveContext& ctx) {
        return unit * mutual_information(ctx.rho, i, j);
      });
    } else if (name.rfind("neg_", 0) == 0 && name.size() == 5) {
      const int site = detail::site_index(name[4], n_spins, name);
      real_out(name, [site](const SolveContext& ctx) { return negativity(ctx.rho, site); });
    } else if (name.rfind("neg_", 0) == 0 && name.size() == 6) {
      const auto [i, j] = detail::pair_index(name.substr(4), n_spins, name);
      real_out(name, [i = i, j = j](const SolveContext& ctx) {
        if (ctx.rho.n_spins == 2) return negativity(ctx.rho, 0);
        return negativity(partial_trace(ctx.rho, {{i, j}}), 0);
      });
    } else if (name.rfind("corr", 0) == 0 && name.size() == 8 && name[5] == '_') {
      const int order = name[4] - '0';
      if (order != 1 && order != 2) throw ConfigError("unknown output: " + name);
      const auto [i, j] = detail::pair_index(name.substr(6), n_spins, name);
      complex_out(name, [i = i, j = j, order](const SolveContext& ctx) {
        return correlation(ctx.rho, i, j, order);
      });
    } else if (name == "residual") {
      real_out(name, [](const SolveContext& ctx) { return ctx.residual; });
    } else {
      throw ConfigError("unknown output: " + name);
    }
  }
  return ev;
}

namespace detail {

inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int k = std::min(workers, n);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline std::string sanitize(std::string msg) {
  for (char& ch : msg)
    if (ch == ',' || ch == '\n') ch = ';';
  return msg;
}

}  // namespace detail

inline Table run_sweep2d(const JobSpec& spec) {
  const Evaluator ev = make_evaluator(
      spec.outputs.empty() ? default_outputs(spec.mode, spec.system.n_spins) : spec.outputs,
      spec.system.n_spins, spec.entropy_base_two);
  const bool has_y = !spec.y.field.empty();
  Table table;
  table.columns.push_back(spec.x.field);
  if (has_y) table.columns.push_back(spec.y.field);
  table.columns.insert(table.columns.end(), ev.columns.begin(), ev.columns.end());
  table.columns.push_back("error");

  const int ny = has_y ? spec.y.count : 1;
  const int n_points = spec.x.count * ny;
  table.rows.assign(n_points, {});

  int workers = spec.workers > 0 ? spec.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, 64);

  detail::parallel_for(n_points, workers, [&](int idx) {
    const int ix = idx / ny;
    const int iy = idx % ny;
    std::vector<Cell>& row = table.rows[idx];
    row.reserve(table.columns.size());
    const double xv = spec.x.value_at(ix);
    row.push_back(Cell::number(xv));
    double yv = 0.0;
    if (has_y) {
      yv = spec.y.value_at(iy);
      row.push_back(Cell::number(yv));
    }
    try {
      SystemConfig c = spec.system;
      apply_field(c, spec.x.field, xv);
      if (has_y) apply_field(c, spec.y.field, yv);
      c.validate();
      Liouvillian li = build_liouvillian(c);
      DensityMatrix rho = steady_state(li);
      SolveContext ctx{c, rho, steady_state_residual(li, rho)};
      ev.evaluate(ctx, row);
      row.push_back(Cell::string(""));
    } catch (const std::exception& e) {
      row.resize(has_y ? 2 : 1);
      for (size_t k = 0; k < ev.width(); ++k)
        row.push_back(Cell::number(std::numeric_limits<double>::quiet_NaN()));
      row.push_back(Cell::string(detail::sanitize(e.what())));
    }
  });
  return table;
}

inline Table run_point(const JobSpec& spec) {
  const Evaluator ev = make_evaluator(
      spec.outputs.empty() ? default_outputs(spec.mode, spec.system.n_spins) : spec.outputs,
      spec.system.n_spins, spec.entropy_base_two);
  Liouvillian li = build_liouvillian(spec.system);
  DensityMatrix rho = steady_state(li);
  SolveContext ctx{spec.system, rho, steady_state_residual(li, rho)};
  Table table;
  table.columns = ev.columns;
  std::vector<Cell> row;
  row.reserve(ev.width());
  ev.evaluate(ctx, row);
  table.rows.push_back(std::move(row));
  return table;
}

inline Table run_dist(const JobSpec& spec) {
  Liouvillian li = build_liouvillian(spec.system);
  DensityMatrix rho = steady_state(li);
  const int n = spec.system.n_spins;
  const int samples = spec.samples;
  Table table;

  if (spec.joint != JointKind::none) {
    PhaseSeries series;
    if (spec.joint == JointKind::s2) {
      series = s2_joint_series(rho);
      table.columns = {"phi_A", "phi_B", "s2_joint"};
    } else if (spec.joint == JointKind::s3_ab_bc) {
      series = s3_series(rho, S3Kind::ab_bc);
      table.columns = {"phi_AB", "phi_BC", "s3"};
    } else {
      series = s3_series(rho, S3Kind::ab_ca);
      table.columns = {"phi_AB", "phi_CA", "s3"};
    }
    table.rows.reserve(static_cast<size_t>(samples) * samples);
    for (int t = 0; t < samples; ++t) {
      const double a1 = 2.0 * pi * t / samples;
      for (int u = 0; u < samples; ++u) {
        const double a2 = 2.0 * pi * u / samples;
        table.rows.push_back(
            {Cell::number(a1), Cell::number(a2), Cell::number(series.eval(a1, a2))});
      }
    }
    return table;
  }

  std::vector<std::pair<std::string, PhaseSeries>> tracks;
  for (int j = 0; j < n; ++j)
    tracks.emplace_back(std::string("s1_") + static_cast<char>('A' + j), s1_series(rho, j));
  if (n >= 2) tracks.emplace_back("s2_AB", pair_series(rho, 0, 1));
  if (n == 3) {
    tracks.emplace_back("s2_BC", pair_series(rho, 1, 2));
    tracks.emplace_back("s2_CA", pair_series(rho, 2, 0));
  }
  table.columns.push_back("phi");
  for (const auto& [name, series] : tracks) table.columns.push_back(name);
  table.rows.reserve(samples);
  for (int t = 0; t < samples; ++t) {
    const double phi = 2.0 * pi * t / samples;
    std::vector<Cell> row;
    row.push_back(Cell::number(phi));
    for (const auto& [name, series] : tracks) row.push_back(Cell::number(series.eval(phi)));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline Table run_locus(const JobSpec& spec) {
  const LocusSpec& lp = spec.locus;
  const CouplingSpec g_spec{lp.g_value, lp.g_fraction_of_rate_sum};
  const BlockadeTarget target =
      lp.target == LocusTarget::m1_a ? BlockadeTarget::m1_a : BlockadeTarget::m1_ab;
  const double root = locate_blockade_locus(target, g_spec, lp.gamma_d, lp.probe_omega,
                                            lp.ratio_min, lp.ratio_max);
  double predicted;
  if (lp.target == LocusTarget::m1_ab) {
    predicted = lp.g_fraction_of_rate_sum
                    ? 0.5 * (1.0 + std::sqrt(17.0)) * lp.g_value * lp.g_value
                    : m1_ab_root_ratio(lp.g_value, lp.gamma_d);
  } else {
    // estimate is g-linear, so the rate-sum-fraction mode has no closed
    // prediction; report against the absolute-g formula at the found root
    predicted = lp.g_fraction_of_rate_sum
                    ? m1_a_root_ratio(lp.g_value * (root + 1.0) * lp.gamma_d, lp.gamma_d)
                    : m1_a_root_ratio(lp.g_value, lp.gamma_d);
  }
  Table table;
  table.columns = {"target", "g_mode",     "g",         "gamma_d",      "probe_omega",
                   "ratio_root", "predicted_ratio", "rel_deviation"};
  table.rows.push_back(
      {Cell::string(lp.target == LocusTarget::m1_a ? "m1_A" : "m1_AB"),
       Cell::string(lp.g_fraction_of_rate_sum ? "rate_sum_fraction" : "absolute"),
       Cell::number(lp.g_value), Cell::number(lp.gamma_d), Cell::number(lp.probe_omega),
       Cell::number(root), Cell::number(predicted),
       Cell::number(std::abs(root - predicted) / std::abs(predicted))});
  return table;
}

inline Table run_perturb(const JobSpec& spec) {
  const std::vector<std::string> names =
      spec.outputs.empty() ? default_outputs(spec.mode, spec.system.n_spins) : spec.outputs;
  std::vector<MomentSpec> moments;
  for (const std::string& name : names) {
    if (name.size() < 4 || name[0] != 'm' || (name[1] != '1' && name[1] != '2') || name[2] != '_')
      throw ConfigError("perturb outputs must be moments, got: " + name);
    const int order = name[1] - '0';
    const std::string suffix = name.substr(3);
    if (suffix.size() == 1) {
      moments.push_back(
          MomentSpec::site(detail::site_index(suffix[0], spec.system.n_spins, name), order));
    } else {
      auto [i, j] = detail::pair_index(suffix, spec.system.n_spins, name);
      moments.push_back(MomentSpec::pair_of(i, j, order));
    }
  }
  PerturbationSeries series = perturb_expand(spec.system, spec.max_order);
  Table table;
  table.columns = {"order", "residual", "trace_dev", "herm_dev", "parity_dev"};
  for (const std::string& name : names)
    for (const char* suffix : {"_re", "_im", "_abs", "_phase"})
      table.columns.push_back(name + suffix);
  for (int n = 0; n <= spec.max_order; ++n) {
    const OrderDiagnostics diag = order_diagnostics(series, n);
    std::vector<Cell> row{Cell::number(n), Cell::number(diag.residual),
                          Cell::number(diag.trace_dev), Cell::number(diag.herm_dev),
                          Cell::number(diag.parity_dev)};
    for (const MomentSpec& m : moments) {
      const Complex v = moment_of(series.orders[n], spec.system.n_spins, m).value;
      row.push_back(Cell::number(v.real()));
      row.push_back(Cell::number(v.imag()));
      row.push_back(Cell::number(std::abs(v)));
      row.push_back(Cell::number(std::arg(v)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline Table run_table(const JobSpec& spec) {
  switch (spec.mode) {
    case JobMode::steady:
    case JobMode::entangle:
      return run_point(spec);
    case JobMode::dist:
      return run_dist(spec);
    case JobMode::sweep2d:
      return run_sweep2d(spec);
    case JobMode::locus:
      return run_locus(spec);
    case JobMode::perturb:
      return run_perturb(spec);
  }
  throw ConfigError("bad mode");
}

inline std::string render_csv(const Table& table) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c].is_text ? row[c].text : detail::format_number(row[c].num);
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const Table& table) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Cell& cell : row) {
      if (cell.is_text) r.push_back(cell.text);
      else if (std::isfinite(cell.num)) r.push_back(cell.num);
      else r.push_back(nullptr);  // JSON has no NaN literal
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

inline std::string render(const Table& table, OutputFormat format) {
  return format == OutputFormat::csv ? render_csv(table) : render_json(table);
}

/// Runs the job and writes the rendered table to out_path (or stdout).
inline void run_job(const JobSpec& spec) {
  const Table table = run_table(spec);
  const std::string body = render(table, spec.format);
  if (spec.out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(spec.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + spec.out_path);
    out << body;
  }
}

}  // namespace spinsync
