#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "spinsync/spin_algebra.hpp"
#include "spinsync/sync_measures.hpp"
#include "spinsync/types.hpp"

namespace spinsync::oracle {

// Quadrature-based evaluation of the synchronization measures, sharing no
// code with the closed-form winding path: coherent states come from numeric
// rotations, polar integrals from Gauss-Legendre nodes, azimuthal integrals
// from equally spaced grids (exact here, the integrands are trigonometric
// polynomials of winding at most 6, far below the grid size).

inline constexpr int azimuthal_grid = 256;

struct PolarNode {
  double theta;
  double weight;
};

inline const std::array<PolarNode, 64>& polar_nodes() {
  static const std::array<PolarNode, 64> nodes = [] {
    using rule = boost::math::quadrature::gauss<double, 64>;
    std::array<PolarNode, 64> out{};
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    for (size_t i = 0; i < xs.size(); ++i) {
      out[2 * i] = {0.5 * pi * (1.0 + xs[i]), 0.5 * pi * ws[i]};
      out[2 * i + 1] = {0.5 * pi * (1.0 - xs[i]), 0.5 * pi * ws[i]};
    }
    return out;
  }();
  return nodes;
}

/// Spin-1 coherent state exp(i phi S^z) exp(-i theta S^y) |1,1>, with the
/// y-rotation taken from the eigendecomposition of S^y. The azimuthal
/// rotation sign follows the phase-operator convention, under which the
/// e^{i k phi} Fourier coefficient of the measure carries (S^+)^k.
inline ComplexVector coherent_state(double theta, double phi) {
  static const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(spin1_ops().s_y);
  ComplexVector phases(3);
  for (int k = 0; k < 3; ++k) phases(k) = std::exp(-im * theta * es.eigenvalues()(k));
  ComplexVector v = es.eigenvectors() * phases.asDiagonal() *
                    ComplexVector(es.eigenvectors().adjoint().col(0));
  v(0) *= std::exp(im * phi);
  v(2) *= std::exp(-im * phi);
  return v;
}

/// Husimi function Q(theta_vec, phi_vec) = (3/4pi)^N <v|rho|v> over the
/// product coherent state.
inline double husimi_q(const DensityMatrix& rho, const std::vector<double>& thetas,
                       const std::vector<double>& phis) {
  if (static_cast<int>(thetas.size()) != rho.n_spins || thetas.size() != phis.size())
    throw ConfigError("husimi_q: need one (theta, phi) pair per spin");
  ComplexVector v = coherent_state(thetas[0], phis[0]);
  for (int j = 1; j < rho.n_spins; ++j) {
    ComplexVector w = coherent_state(thetas[j], phis[j]);
    v = Eigen::kroneckerProduct(v, w).eval();
  }
  const double norm = std::pow(3.0 / (4.0 * pi), rho.n_spins);
  return norm * (v.adjoint() * rho.matrix * v)(0).real();
}

/// Polar average (3/4pi) int_0^pi sin(theta) |theta,phi><theta,phi| dtheta.
inline ComplexMatrix theta_projector(double phi) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  for (const auto& node : polar_nodes()) {
    ComplexVector v = coherent_state(node.theta, phi);
    m += node.weight * std::sin(node.theta) * (v * v.adjoint());
  }
  return (3.0 / (4.0 * pi)) * m;
}

/// Joint measure S_N(phi_vec): polar integrals factorize per site, so the
/// integral is the expectation of a product of single-site averages.
inline double sync_joint(const DensityMatrix& rho, const std::vector<double>& phis) {
  if (static_cast<int>(phis.size()) != rho.n_spins)
    throw ConfigError("sync_joint: need one angle per spin");
  ComplexMatrix op = theta_projector(phis[0]);
  for (int j = 1; j < rho.n_spins; ++j) op = kron(op, theta_projector(phis[j]));
  return (rho.matrix * op).trace().real() - std::pow(2.0 * pi, -rho.n_spins);
}

/// Same quantity without the per-site factorization: nested polar loops over
/// full product coherent states. Slow; kept as a cross-check of sync_joint.
inline double sync_joint_nested(const DensityMatrix& rho, const std::vector<double>& phis) {
  if (static_cast<int>(phis.size()) != rho.n_spins)
    throw ConfigError("sync_joint_nested: need one angle per spin");
  const auto& nodes = polar_nodes();
  const int n = rho.n_spins;
  std::vector<int> idx(n, 0);
  double acc = 0.0;
  while (true) {
    std::vector<double> thetas(n);
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      thetas[j] = nodes[idx[j]].theta;
      w *= nodes[idx[j]].weight * std::sin(thetas[j]);
    }
    acc += w * husimi_q(rho, thetas, phis);
    int j = 0;
    for (; j < n; ++j) {
      if (++idx[j] < static_cast<int>(nodes.size())) break;
      idx[j] = 0;
    }
    if (j == n) break;
  }
  return acc - std::pow(2.0 * pi, -n);
}

namespace detail {

inline ComplexMatrix arrange(const std::vector<ComplexMatrix>& site_ops) {
  ComplexMatrix op = site_ops[0];
  for (size_t j = 1; j < site_ops.size(); ++j) op = kron(op, site_ops[j]);
  return op;
}

inline std::vector<ComplexMatrix> projector_grid(double offset) {
  std::vector<ComplexMatrix> grid(azimuthal_grid);
  for (int t = 0; t < azimuthal_grid; ++t)
    grid[t] = theta_projector(offset + 2.0 * pi * t / azimuthal_grid);
  return grid;
}

inline ComplexMatrix grid_average(const std::vector<ComplexMatrix>& grid) {
  ComplexMatrix avg = ComplexMatrix::Zero(3, 3);
  const double h = 2.0 * pi / azimuthal_grid;
  for (const ComplexMatrix& p : grid) avg += h * p;
  return avg;
}

}  // namespace detail

/// Marginal S_1(phi_site) of an N-spin state: all other azimuthal angles
/// integrated on an equally spaced grid. Each integrated angle lives in
/// exactly one tensor factor, so its grid sum factors out of the trace and
/// the nested trapezoid sums collapse without approximation.
inline double s1_marginal(const DensityMatrix& rho, int site, double phi) {
  const int n = rho.n_spins;
  if (site < 0 || site >= n) throw ConfigError("s1_marginal: site out of range");
  if (n == 1) return sync_joint(rho, {phi});
  const ComplexMatrix averaged = detail::grid_average(detail::projector_grid(0.0));
  std::vector<ComplexMatrix> ops(n, averaged);
  ops[site] = theta_projector(phi);
  return (rho.matrix * detail::arrange(ops)).trace().real() - 1.0 / (2.0 * pi);
}

/// Relative-phase marginal over psi = phi_i - phi_j (third angle, if any,
/// and the common phase both integrated out). The spectator angle factors
/// out of the trace; the correlated (phi_i, phi_j) pair shares one loop.
inline double pair_marginal(const DensityMatrix& rho, int i, int j, double psi) {
  const int n = rho.n_spins;
  if (i == j || i < 0 || j < 0 || i >= n || j >= n)
    throw ConfigError("pair_marginal: sites must be distinct and in range");
  const double h = 2.0 * pi / azimuthal_grid;
  auto grid_i = detail::projector_grid(psi);  // phi_i = psi + chi_1
  auto grid_j = detail::projector_grid(0.0);  // phi_j = chi_1
  const ComplexMatrix spectator = detail::grid_average(grid_j);  // phi_k = chi_2
  double acc = 0.0;
  for (int t = 0; t < azimuthal_grid; ++t) {
    std::vector<ComplexMatrix> ops(n);
    ops[i] = grid_i[t];
    ops[j] = grid_j[t];
    if (n == 3) ops[3 - i - j] = spectator;
    acc += h * (rho.matrix * detail::arrange(ops)).trace().real();
  }
  return acc - 1.0 / (2.0 * pi);
}

/// Two-angle three-spin marginals, common phase integrated out. Angle
/// conventions match s3_series: ab_bc keeps (phi_A - phi_B, phi_B - phi_C),
/// ab_ca keeps (phi_A - phi_B, phi_C - phi_A).
inline double s3_marginal(const DensityMatrix& rho, S3Kind kind, double psi_1, double psi_2) {
  if (rho.n_spins != 3) throw ConfigError("s3_marginal expects a three-spin state");
  const double h = 2.0 * pi / azimuthal_grid;
  double acc = 0.0;
  for (int t = 0; t < azimuthal_grid; ++t) {
    const double chi = 2.0 * pi * t / azimuthal_grid;
    std::vector<ComplexMatrix> ops(3);
    if (kind == S3Kind::ab_bc) {
      ops[0] = theta_projector(psi_1 + chi);
      ops[1] = theta_projector(chi);
      ops[2] = theta_projector(chi - psi_2);
    } else {
      ops[0] = theta_projector(chi);
      ops[1] = theta_projector(chi - psi_1);
      ops[2] = theta_projector(chi + psi_2);
    }
    acc += h * (rho.matrix * detail::arrange(ops)).trace().real();
  }
  return acc - std::pow(2.0 * pi, -2);
}

}  // namespace spinsync::oracle
