#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "spinsync/liouvillian.hpp"
#include "spinsync/spin_algebra.hpp"
#include "spinsync/sync_measures.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

// Closed-form moments and steady states of the two-spin chain, used as
// independent references for the exact solver. Conventions: the drive acts
// on spin A only; "inverted rates" means gamma^g_A = gamma^d_B = gamma_g and
// gamma^d_A = gamma^g_B = gamma_d; "equal rates" means all four equal gamma.

inline SystemConfig inverted_rate_config(double gamma_g, double gamma_d, double omega_a,
                                         double g) {
  SystemConfig c;
  c.n_spins = 2;
  c.gamma_g = {gamma_g, gamma_d};
  c.gamma_d = {gamma_d, gamma_g};
  c.omega = {omega_a, 0.0};
  c.g = {g};
  c.validate();
  return c;
}

/// Leading order in Omega_A, small g: m^(1)_A for inverted rates.
inline Complex m1_a_inverted(double omega_a, double g, double gamma_g, double gamma_d) {
  const double gg = gamma_g, gd = gamma_d;
  return im * (3.0 * omega_a / 16.0) * ((gg - gd) / (gg * gd)) *
         (1.0 - 4.0 * g * g * (gg * gg + 4.0 * gg * gd + gd * gd) / (gg * gg * gd * gd));
}

/// Leading order in Omega_A, small g: m^(1)_B for inverted rates (real).
inline double m1_b_inverted(double omega_a, double g, double gamma_g, double gamma_d) {
  const double gg = gamma_g, gd = gamma_d;
  const double head = 3.0 * omega_a * g / (8.0 * gg * gd);
  const double lead = (gd - gg) * (gd - gg) / (gg * gd);
  const double num = 320.0 * std::pow(gg, 3) * std::pow(gd, 3) +
                     23.0 * (std::pow(gg, 4) * gd * gd + gg * gg * std::pow(gd, 4)) -
                     32.0 * (std::pow(gg, 6) + std::pow(gd, 6)) -
                     106.0 * (std::pow(gg, 5) * gd + gg * std::pow(gd, 5));
  const double den =
      3.0 * std::pow(gg, 3) * std::pow(gd, 3) * (2.0 * gg + gd) * (gg + 2.0 * gd);
  return head * (lead + g * g * num / den);
}

/// Leading order in Omega_A, all orders in g: m^(1)_AB for inverted rates.
inline Complex m1_ab_inverted(double omega_a, double g, double gamma_g, double gamma_d) {
  (void)omega_a;  // the leading contribution is drive-independent
  const double gg = gamma_g, gd = gamma_d;
  const double g2 = g * g;
  const double num = (gd - gg) * (4.0 * g2 * g2 + g2 * gg * gd - gg * gg * gd * gd);
  const double den = 32.0 * std::pow(g2, 3) + std::pow(gg * gd, 3) +
                     4.0 * g2 * g2 * (2.0 * gg * gg + 7.0 * gg * gd + 2.0 * gd * gd) +
                     g2 * gg * gd * (4.0 * gg * gg + 5.0 * gg * gd + 4.0 * gd * gd);
  return im * (9.0 * pi * g / 256.0) * num / den;
}

// Equal-rate moments, exact in g (Omega small; only the displayed orders).

inline double m1_b_equal(double omega_a, double g, double gamma) {
  const double g2 = g * g, y2 = gamma * gamma;
  const double num = std::pow(g, 3) * omega_a *
                     (64.0 * g2 * g2 + 348.0 * g2 * y2 + 135.0 * y2 * y2);
  const double den = (8.0 * g2 + y2) * (4.0 * g2 + 9.0 * y2) *
                     (16.0 * g2 * g2 + 72.0 * g2 * y2 + 9.0 * y2 * y2);
  return 0.75 * num / den;
}

inline double m1_b_equal_small_g(double omega_a, double g, double gamma) {
  return 5.0 * std::pow(g, 3) * omega_a / (4.0 * std::pow(gamma, 4));
}

inline double m1_b_equal_large_g(double omega_a, double g, double gamma) {
  (void)gamma;
  return 3.0 * omega_a / (32.0 * g);
}

inline double m2_b_equal(double omega_a, double g, double gamma) {
  const double g2 = g * g, y2 = gamma * gamma;
  const double head = (3.0 / (2.0 * pi)) * g2 * omega_a * omega_a /
                      ((g2 + y2) * (4.0 * g2 + y2));
  const double num = 96.0 * std::pow(g2, 4) + 656.0 * std::pow(g2, 3) * y2 +
                     518.0 * g2 * g2 * y2 * y2 + 108.0 * g2 * std::pow(y2, 3) +
                     81.0 * std::pow(y2, 4);
  const double den = (8.0 * g2 + y2) * (4.0 * g2 + 9.0 * y2) *
                     (16.0 * g2 * g2 + 72.0 * g2 * y2 + 9.0 * y2 * y2);
  return head * num / den;
}

inline double m2_b_equal_small_g(double omega_a, double g, double gamma) {
  return 3.0 * g * g * omega_a * omega_a / (2.0 * pi * std::pow(gamma, 4));
}

inline double m2_b_equal_large_g(double omega_a, double g, double gamma) {
  (void)gamma;
  return 9.0 * omega_a * omega_a / (128.0 * pi * g * g);
}

inline double m2_ab_equal(double omega_a, double g, double gamma) {
  const double g2 = g * g, y2 = gamma * gamma;
  const double num = 848.0 * std::pow(g2, 3) + 4600.0 * g2 * g2 * y2 +
                     1905.0 * g2 * y2 * y2 + 702.0 * std::pow(y2, 3);
  const double den = (8.0 * g2 + y2) * (4.0 * g2 + 9.0 * y2) *
                     (16.0 * g2 * g2 + 72.0 * g2 * y2 + 9.0 * y2 * y2);
  return (1.0 / (8.0 * pi)) * (g2 / (8.0 * g2 + y2)) *
         (1.0 - omega_a * omega_a * num / den);
}

inline double m2_ab_equal_small_g(double omega_a, double g, double gamma) {
  const double y2 = gamma * gamma;
  return (g * g / (8.0 * pi * y2)) *
         (1.0 - (26.0 * omega_a * omega_a + 24.0 * g * g) / (3.0 * y2));
}

inline double m2_ab_equal_large_g(double omega_a, double g, double gamma) {
  return 1.0 / (64.0 * pi) -
         (53.0 * omega_a * omega_a + 4.0 * gamma * gamma) / (2048.0 * pi * g * g);
}

inline double m2_a_equal(double omega_a, double g, double gamma) {
  const double o2 = omega_a * omega_a, y2 = gamma * gamma;
  const double num = 448.0 * o2 * o2 + 456.0 * o2 * y2 + 189.0 * y2 * y2;
  const double den = (8.0 * o2 + y2) * (16.0 * o2 * o2 + 30.0 * o2 * y2 + 9.0 * y2 * y2);
  return (1.0 / (2.0 * pi)) * (o2 / (8.0 * o2 + y2)) * (1.0 - g * g * num / den);
}

inline double m2_a_equal_small_omega(double omega_a, double g, double gamma) {
  const double y2 = gamma * gamma;
  return (omega_a * omega_a / (2.0 * pi * y2)) *
         (1.0 - (21.0 * g * g + 8.0 * omega_a * omega_a) / y2);
}

inline double m2_a_equal_large_omega(double omega_a, double g, double gamma) {
  return 1.0 / (16.0 * pi) -
         (28.0 * g * g + gamma * gamma) / (128.0 * pi * omega_a * omega_a);
}

/// Rate ratios gamma_g/gamma_d bounding the |m1_A| < |m1_B| region around
/// the equal-rate blockade: 1 -+ 20 g^3 / (3 gamma_d^3).
inline std::pair<double, double> blockade_width(double g, double gamma_d) {
  const double delta = 20.0 * std::pow(g / gamma_d, 3) / 3.0;
  return {1.0 - delta, 1.0 + delta};
}

/// Predicted coupling-induced root of m^(1)_AB: gamma_g/gamma_d as a
/// function of g/gamma_d.
inline double m1_ab_root_ratio(double g, double gamma_d) {
  return 0.5 * (1.0 + std::sqrt(17.0)) * (g / gamma_d) * (g / gamma_d);
}

/// Strong-coupling estimate of the m^(1)_A root ratio, valid for
/// g, gamma_g >> gamma_d; the root only exists above g/gamma_d ~ 1.3.
inline double m1_a_root_ratio(double g, double gamma_d) {
  return 0.7561 * g / gamma_d;
}

/// Two-spin steady state for Omega_A = 0, equal rates gamma, any g.
inline DensityMatrix closed_form_steady_state_omega0(double g, double gamma) {
  const SpinOps& s = spin1_ops();
  const double den = 8.0 * g * g + gamma * gamma;
  const double w = 8.0 * g * g / den;
  ComplexMatrix rho0 = ComplexMatrix::Zero(9, 9);
  rho0(4, 4) = 1.0;  // |0,0><0,0|
  ComplexMatrix x = kron(s.s_plus, s.s_minus) + kron(s.s_minus, s.s_plus);
  ComplexMatrix rho = (1.0 - w) * rho0 + w * rho_infinity().matrix -
                      im * (g * gamma / (2.0 * den)) * (x * rho0 - rho0 * x);
  return DensityMatrix{std::move(rho), 2};
}

/// Single-spin steady state for g = 0, equal rates gamma, any Omega_A.
inline DensityMatrix closed_form_steady_state_g0(double omega_a, double gamma) {
  const SpinOps& s = spin1_ops();
  const double den = 8.0 * omega_a * omega_a + gamma * gamma;
  ComplexMatrix rho0 = ComplexMatrix::Zero(3, 3);
  rho0(1, 1) = 1.0;  // |0><0|
  ComplexMatrix x = s.s_plus + s.s_minus;
  ComplexMatrix c = x * rho0 - rho0 * x;
  ComplexMatrix rho = (1.0 - 8.0 * omega_a * omega_a / den) * rho0 -
                      (omega_a * omega_a / den) * (c * c) -
                      im * (omega_a * gamma / den) * c;
  return DensityMatrix{std::move(rho), 1};
}

/// Bisection to |hi - lo| < tol; requires a sign change over [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-10, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NoSignChange("bisect: no sign change over the bracketing interval");
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

enum class BlockadeTarget { m1_a, m1_ab };

/// How the coupling follows the rate-ratio scan: either fixed, or a fixed
/// fraction of gamma_g + gamma_d as in the coupling-induced blockade sweeps.
struct CouplingSpec {
  double value = 0.1;
  bool fraction_of_rate_sum = false;

  double resolve(double gamma_g, double gamma_d) const {
    return fraction_of_rate_sum ? value * (gamma_g + gamma_d) : value;
  }
};

/// Root of the selected first moment in the ratio gamma_g/gamma_d, from the
/// full steady-state solver at a small probe drive. Scans for a sign change
/// on a log grid over [ratio_lo, ratio_hi], then bisects to 1e-10.
inline double locate_blockade_locus(BlockadeTarget target, const CouplingSpec& g_spec,
                                    double gamma_d, double probe_omega, double ratio_lo,
                                    double ratio_hi) {
  if (!(ratio_lo > 0.0) || !(ratio_hi > ratio_lo))
    throw ConfigError("locate_blockade_locus: need 0 < ratio_lo < ratio_hi");
  auto objective = [&](double ratio) {
    const double gamma_g = ratio * gamma_d;
    const double g = g_spec.resolve(gamma_g, gamma_d);
    SystemConfig c = inverted_rate_config(gamma_g, gamma_d, probe_omega, g);
    DensityMatrix rho = steady_state(build_liouvillian(c));
    const MomentSpec spec = target == BlockadeTarget::m1_a ? MomentSpec::site(0, 1)
                                                           : MomentSpec::pair_of(0, 1, 1);
    return moment_of(rho, spec).value.imag();
  };
  const int n_scan = 64;
  const double step = std::log(ratio_hi / ratio_lo) / n_scan;
  double prev_r = ratio_lo;
  double prev_f = objective(prev_r);
  for (int i = 1; i <= n_scan; ++i) {
    const double r = ratio_lo * std::exp(step * i);
    const double f = objective(r);
    if (prev_f == 0.0) return prev_r;
    if ((prev_f > 0.0) != (f > 0.0))
      return bisect(objective, prev_r, r);
    prev_r = r;
    prev_f = f;
  }
  throw NoSignChange("locate_blockade_locus: no root in the scanned ratio range");
}

/// Numerical edges of the |m1_A| < |m1_B| region around ratio 1, for
/// comparison against blockade_width.
inline std::pair<double, double> blockade_width_numeric(double g, double gamma_d,
                                                        double probe_omega,
                                                        double scan_halfwidth) {
  auto objective = [&](double ratio) {
    SystemConfig c = inverted_rate_config(ratio * gamma_d, gamma_d, probe_omega, g);
    DensityMatrix rho = steady_state(build_liouvillian(c));
    return std::abs(moment_of(rho, MomentSpec::site(0, 1)).value) -
           std::abs(moment_of(rho, MomentSpec::site(1, 1)).value);
  };
  const double lower = bisect(objective, 1.0 - scan_halfwidth, 1.0);
  const double upper = bisect(objective, 1.0, 1.0 + scan_halfwidth);
  return {lower, upper};
}

}  // namespace spinsync
