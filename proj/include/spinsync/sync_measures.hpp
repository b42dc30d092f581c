#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "spinsync/spin_algebra.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

/// Wigner matrix element d^S_{n,S}(theta) =
/// sqrt((2S)! / ((S+n)!(S-n)!)) cos(theta/2)^(S+n) sin(theta/2)^(S-n).
inline double wigner_d_little(double spin, double n, double theta) {
  const double lognorm =
      0.5 * (std::lgamma(2.0 * spin + 1.0) - std::lgamma(spin + n + 1.0) -
             std::lgamma(spin - n + 1.0));
  return std::exp(lognorm) * std::pow(std::cos(0.5 * theta), spin + n) *
         std::pow(std::sin(0.5 * theta), spin - n);
}

/// Spin-coherent phase operator c^S(phi): element (n, m) carries
/// e^{i(n-m)phi}/(2pi) * Gamma(1+S+(n+m)/2) Gamma(1+S-(n+m)/2) /
/// sqrt((S+n)!(S-n)!(S+m)!(S-m)!), with row a <-> n = S - a.
inline ComplexMatrix c_operator(double spin, double phi) {
  const int twice = static_cast<int>(std::lround(2.0 * spin));
  if (twice < 1 || twice > 3 || std::abs(2.0 * spin - twice) > 1e-12)
    throw ConfigError("c_operator: spin must be 1/2, 1, or 3/2");
  const int dim = twice + 1;
  ComplexMatrix c(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const double n = spin - a;
      const double m = spin - b;
      const double lognum = std::lgamma(1.0 + spin + 0.5 * (n + m)) +
                            std::lgamma(1.0 + spin - 0.5 * (n + m));
      const double logden =
          0.5 * (std::lgamma(spin + n + 1.0) + std::lgamma(spin - n + 1.0) +
                 std::lgamma(spin + m + 1.0) + std::lgamma(spin - m + 1.0));
      c(a, b) = std::exp(lognum - logden) / (2.0 * pi) * std::exp(im * (n - m) * phi);
    }
  }
  return c;
}

namespace detail {

// Spin-1 Fourier component of c^1(phi) at winding k, constants included:
// c^1(phi) = 1/(2pi) + sum_{k != 0} e^{i k phi} F_k.
inline ComplexMatrix fourier_factor(int k) {
  const SpinOps& s = spin1_ops();
  switch (k) {
    case 0:
      return ComplexMatrix::Identity(3, 3) / (2.0 * pi);
    case 1:
      return (3.0 / 32.0) * s.s_plus;
    case -1:
      return (3.0 / 32.0) * s.s_minus;
    case 2:
      return (1.0 / (8.0 * pi)) * (s.s_plus * s.s_plus);
    case -2:
      return (1.0 / (8.0 * pi)) * (s.s_minus * s.s_minus);
    default:
      throw ConfigError("fourier_factor: winding must be in [-2, 2]");
  }
}

}  // namespace detail

/// Which moment of which site(s): single-site m^(n)_j tracks <(S+_j)^n>,
/// pair m^(n)_{ij} tracks <(S+_i S-_j)^n>, each with the weight the
/// phase-distribution Fourier coefficient carries.
struct MomentSpec {
  int i = 0;
  int j = 0;
  bool pair = false;
  int order = 1;

  static MomentSpec site(int site, int order) { return {site, site, false, order}; }
  static MomentSpec pair_of(int i, int j, int order) { return {i, j, true, order}; }
};

struct MomentRecord {
  MomentSpec spec;
  Complex value;

  double magnitude() const { return std::abs(value); }
  double locking_phase() const { return -std::arg(value); }
};

/// Moment of an arbitrary operator-valued matrix (not necessarily a state);
/// used on perturbative corrections as well as on steady states.
inline MomentRecord moment_of(const ComplexMatrix& rho, int n_spins, const MomentSpec& spec) {
  if (spec.order != 1 && spec.order != 2)
    throw ConfigError("moment order must be 1 or 2");
  if (spec.pair && spec.i == spec.j) throw ConfigError("pair moment needs distinct sites");
  const SpinOps& s = spin1_ops();
  ComplexMatrix op;
  double weight;
  if (spec.pair) {
    op = embed(s.s_plus, spec.i, n_spins) * embed(s.s_minus, spec.j, n_spins);
    weight = spec.order == 1 ? 9.0 * pi / 512.0 : 1.0 / (32.0 * pi);
  } else {
    op = embed(s.s_plus, spec.i, n_spins);
    weight = spec.order == 1 ? 3.0 / 32.0 : 1.0 / (8.0 * pi);
  }
  if (spec.order == 2) op = op * op;
  return MomentRecord{spec, weight * (rho * op).trace()};
}

inline MomentRecord moment_of(const DensityMatrix& rho, const MomentSpec& spec) {
  return moment_of(rho.matrix, rho.n_spins, spec);
}

/// Truncated Fourier series of a phase distribution over one or two retained
/// angles. Windings come in conjugate pairs, so eval() is real up to noise.
struct PhaseSeries {
  int n_kept = 1;
  std::map<std::pair<int, int>, Complex> terms;

  double eval(double a1, double a2 = 0.0) const {
    Complex acc = 0.0;
    for (const auto& [w, c] : terms)
      acc += c * std::exp(im * (w.first * a1 + w.second * a2));
    return acc.real();
  }
};

/// Core of every measure here: the full N-angle distribution is
/// S_N(phi_vec) = <prod_j c^1(phi_j)> - (2pi)^-N, a Fourier series with
/// per-site windings k_j in [-2, 2]. Re-parameterize phi_vec = kept * psi +
/// integrated * chi; integrating the chi angles keeps exactly the winding
/// tuples with integrated^T k = 0 and multiplies (2pi) per integrated angle.
inline PhaseSeries winding_series(const ComplexMatrix& rho, int n_spins,
                                  const Eigen::MatrixXi& kept,
                                  const Eigen::MatrixXi& integrated) {
  if (kept.rows() != n_spins || integrated.rows() != n_spins)
    throw ConfigError("winding_series: angle maps must have one row per spin");
  if (kept.cols() < 1 || kept.cols() > 2)
    throw ConfigError("winding_series: 1 or 2 retained angles supported");
  PhaseSeries series;
  series.n_kept = static_cast<int>(kept.cols());
  const double volume = std::pow(2.0 * pi, static_cast<double>(integrated.cols()));

  std::vector<int> k(n_spins, -2);
  while (true) {
    bool all_zero = true;
    for (int kj : k) all_zero = all_zero && kj == 0;
    if (!all_zero) {
      bool survives = true;
      for (int c = 0; c < integrated.cols() && survives; ++c) {
        int acc = 0;
        for (int j = 0; j < n_spins; ++j) acc += integrated(j, c) * k[j];
        survives = acc == 0;
      }
      if (survives) {
        ComplexMatrix op = detail::fourier_factor(k[0]);
        for (int j = 1; j < n_spins; ++j) op = kron(op, detail::fourier_factor(k[j]));
        std::pair<int, int> w{0, 0};
        for (int j = 0; j < n_spins; ++j) {
          w.first += kept(j, 0) * k[j];
          if (kept.cols() > 1) w.second += kept(j, 1) * k[j];
        }
        series.terms[w] += volume * (rho * op).trace();
      }
    }
    int j = 0;
    for (; j < n_spins; ++j) {
      if (++k[j] <= 2) break;
      k[j] = -2;
    }
    if (j == n_spins) break;
  }
  return series;
}

/// Single-site marginal S_1(phi_site); coefficients equal the site moments.
inline PhaseSeries s1_series(const DensityMatrix& rho, int site) {
  Eigen::MatrixXi kept = Eigen::MatrixXi::Zero(rho.n_spins, 1);
  kept(site, 0) = 1;
  Eigen::MatrixXi integrated = Eigen::MatrixXi::Zero(rho.n_spins, rho.n_spins - 1);
  int col = 0;
  for (int j = 0; j < rho.n_spins; ++j)
    if (j != site) integrated(j, col++) = 1;
  return winding_series(rho.matrix, rho.n_spins, kept, integrated);
}

/// Relative-phase marginal over psi = phi_i - phi_j, all other angles and
/// the common phase integrated out.
inline PhaseSeries pair_series(const DensityMatrix& rho, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= rho.n_spins || j >= rho.n_spins)
    throw ConfigError("pair_series: sites must be distinct and in range");
  Eigen::MatrixXi kept = Eigen::MatrixXi::Zero(rho.n_spins, 1);
  kept(i, 0) = 1;  // phi_i = psi + chi_1, phi_j = chi_1, others chi_2
  Eigen::MatrixXi integrated = Eigen::MatrixXi::Zero(rho.n_spins, rho.n_spins - 1);
  integrated(i, 0) = 1;
  integrated(j, 0) = 1;
  int col = 1;
  for (int s = 0; s < rho.n_spins; ++s)
    if (s != i && s != j) integrated(s, col++) = 1;
  return winding_series(rho.matrix, rho.n_spins, kept, integrated);
}

/// Two-spin joint distribution S_2(phi_A, phi_B); nothing integrated.
inline PhaseSeries s2_joint_series(const DensityMatrix& rho) {
  if (rho.n_spins != 2) throw ConfigError("s2_joint_series expects a two-spin state");
  Eigen::MatrixXi kept = Eigen::MatrixXi::Identity(2, 2);
  Eigen::MatrixXi integrated(2, 0);
  return winding_series(rho.matrix, rho.n_spins, kept, integrated);
}

enum class S3Kind { ab_bc, ab_ca };

/// Three-spin marginals over two relative angles with the common phase
/// integrated out: (phi_AB, phi_BC) or (phi_AB, phi_CA).
inline PhaseSeries s3_series(const DensityMatrix& rho, S3Kind kind) {
  if (rho.n_spins != 3) throw ConfigError("s3_series expects a three-spin state");
  Eigen::MatrixXi kept = Eigen::MatrixXi::Zero(3, 2);
  if (kind == S3Kind::ab_bc) {
    kept(0, 0) = 1;   // phi_A = psi_1 + chi
    kept(2, 1) = -1;  // phi_C = chi - psi_2
  } else {
    kept(1, 0) = -1;  // phi_B = chi - psi_1
    kept(2, 1) = 1;   // phi_C = chi + psi_2
  }
  Eigen::MatrixXi integrated = Eigen::MatrixXi::Ones(3, 1);
  return winding_series(rho.matrix, rho.n_spins, kept, integrated);
}

inline double s1_value(const DensityMatrix& rho, int site, double phi) {
  return s1_series(rho, site).eval(phi);
}

inline double s2_joint_value(const DensityMatrix& rho, double phi_a, double phi_b) {
  return s2_joint_series(rho).eval(phi_a, phi_b);
}

enum class DistributionKind { s1, s2_joint, s2_relative, s3_ab_bc, s3_ab_ca };

/// Uniformly sampled phase distribution on [0, 2pi)^n; two-angle grids are
/// stored row-major with the first angle as the row index.
struct PhaseDistribution {
  DistributionKind kind = DistributionKind::s1;
  int n_angles = 1;
  std::vector<double> angles;
  std::vector<double> values;

  double value_at(int i, int j = 0) const {
    return n_angles == 1 ? values[i] : values[i * angles.size() + j];
  }
};

inline PhaseDistribution sample_distribution(const PhaseSeries& series, DistributionKind kind,
                                             int samples) {
  if (samples < 4) throw ConfigError("sample_distribution: need at least 4 samples");
  PhaseDistribution dist;
  dist.kind = kind;
  dist.n_angles = series.n_kept;
  dist.angles.resize(samples);
  for (int t = 0; t < samples; ++t) dist.angles[t] = 2.0 * pi * t / samples;
  if (series.n_kept == 1) {
    dist.values.resize(samples);
    for (int t = 0; t < samples; ++t) dist.values[t] = series.eval(dist.angles[t]);
  } else {
    dist.values.resize(static_cast<size_t>(samples) * samples);
    for (int t = 0; t < samples; ++t)
      for (int u = 0; u < samples; ++u)
        dist.values[static_cast<size_t>(t) * samples + u] =
            series.eval(dist.angles[t], dist.angles[u]);
  }
  return dist;
}

/// Strict local maxima of a periodically continued sample sequence.
inline int count_local_maxima(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double prev = v[(i + n - 1) % n];
    const double next = v[(i + 1) % n];
    if (v[i] > prev && v[i] > next) ++count;
  }
  return count;
}

/// Synchronization peaks: strict local maxima that rise above the uniform
/// background (the sampled series stores the deviation from 1/(2 pi)^n, so
/// "above" means positive). Higher harmonics can put tiny ripples on the
/// floor of a distribution valley; those are not preferred phases.
inline int count_sync_peaks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double prev = v[(i + n - 1) % n];
    const double next = v[(i + 1) % n];
    if (v[i] > 0.0 && v[i] > prev && v[i] > next) ++count;
  }
  return count;
}

inline double argmax_angle(const PhaseDistribution& dist) {
  size_t best = 0;
  for (size_t i = 1; i < dist.values.size(); ++i)
    if (dist.values[i] > dist.values[best]) best = i;
  return dist.n_angles == 1 ? dist.angles[best] : dist.angles[best / dist.angles.size()];
}

}  // namespace spinsync
