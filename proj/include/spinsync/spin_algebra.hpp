#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "spinsync/types.hpp"

namespace spinsync {

/// Spin-1 operators in the basis |1>, |0>, |-1> (indices 0, 1, 2).
struct SpinOps {
  ComplexMatrix s_z, s_plus, s_minus, s_x, s_y;
};

inline const SpinOps& spin1_ops() {
  static const SpinOps ops = [] {
    const double r2 = std::sqrt(2.0);
    SpinOps o;
    o.s_z = ComplexMatrix::Zero(3, 3);
    o.s_z(0, 0) = 1.0;
    o.s_z(2, 2) = -1.0;
    o.s_plus = ComplexMatrix::Zero(3, 3);
    o.s_plus(0, 1) = r2;
    o.s_plus(1, 2) = r2;
    o.s_minus = o.s_plus.adjoint();
    o.s_x = 0.5 * (o.s_plus + o.s_minus);
    o.s_y = -0.5 * im * (o.s_plus - o.s_minus);
    return o;
  }();
  return ops;
}

/// Lifts a single-spin operator to the n_spins chain, acting on `site`
/// (0-based, site 0 is the leftmost tensor factor).
inline ComplexMatrix embed(const ComplexMatrix& op, int site, int n_spins) {
  if (site < 0 || site >= n_spins) throw ConfigError("embed: site out of range");
  if (op.rows() != 3 || op.cols() != 3) throw ConfigError("embed: operator must be 3x3");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int j = 0; j < n_spins; ++j)
    out = kron(out, j == site ? op : ComplexMatrix::Identity(3, 3));
  return out;
}

/// Total-spin basis |J,M> of two spin-1 particles (Condon-Shortley phases).
/// Columns of `states` follow `labels`; product index is 3*(1-m1) + (1-m2).
struct CombinedBasis {
  ComplexMatrix states;
  std::array<std::pair<int, int>, 9> labels;

  const ComplexVector state(int J, int M) const {
    for (int k = 0; k < 9; ++k)
      if (labels[k].first == J && labels[k].second == M) return states.col(k);
    throw ConfigError("combined basis: no such (J, M)");
  }
};

inline const CombinedBasis& combined_spin_basis() {
  static const CombinedBasis basis = [] {
    CombinedBasis b;
    b.labels = {{{2, 2}, {2, 1}, {2, 0}, {2, -1}, {2, -2}, {1, 1}, {1, 0}, {1, -1}, {0, 0}}};
    b.states = ComplexMatrix::Zero(9, 9);
    auto idx = [](int m1, int m2) { return 3 * (1 - m1) + (1 - m2); };
    auto set = [&](int col, std::initializer_list<std::pair<std::pair<int, int>, double>> terms) {
      for (const auto& [ms, c] : terms) b.states(idx(ms.first, ms.second), col) = c;
    };
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = 1.0 / std::sqrt(3.0);
    const double r6 = 1.0 / std::sqrt(6.0);
    set(0, {{{1, 1}, 1.0}});
    set(1, {{{1, 0}, r2}, {{0, 1}, r2}});
    set(2, {{{1, -1}, r6}, {{0, 0}, 2.0 * r6}, {{-1, 1}, r6}});
    set(3, {{{0, -1}, r2}, {{-1, 0}, r2}});
    set(4, {{{-1, -1}, 1.0}});
    set(5, {{{1, 0}, r2}, {{0, 1}, -r2}});
    set(6, {{{1, -1}, r2}, {{-1, 1}, -r2}});
    set(7, {{{0, -1}, r2}, {{-1, 0}, -r2}});
    set(8, {{{1, -1}, r3}, {{0, 0}, -r3}, {{-1, 1}, r3}});
    return b;
  }();
  return basis;
}

/// Two-spin strong-coupling limit state: (1/32) (S+_A S-_B + S-_A S+_B)^2.
/// Built from both that polynomial form and its spectral form over |J,M>
/// projectors; the two must agree, otherwise the basis table is corrupt.
inline const DensityMatrix& rho_infinity() {
  static const DensityMatrix rho = [] {
    const SpinOps& s = spin1_ops();
    ComplexMatrix x = kron(s.s_plus, s.s_minus) + kron(s.s_minus, s.s_plus);
    // The ladder entries are sqrt(2), so every entry of x is an integer up to
    // one rounding error; snapping keeps the dyadic entries of the limit
    // state (0, 1/8, 1/4, ...) exact.
    x = x.unaryExpr([](Complex v) { return Complex(std::round(v.real()), 0.0); });
    ComplexMatrix poly = (x * x) / 32.0;

    const CombinedBasis& b = combined_spin_basis();
    ComplexMatrix spectral = ComplexMatrix::Zero(9, 9);
    for (auto [J, M] : {std::pair{2, 1}, {2, -1}, {1, 1}, {1, -1}}) {
      ComplexVector v = b.state(J, M);
      spectral += 0.125 * (v * v.adjoint());
    }
    for (int J : {2, 0}) {
      ComplexVector v = b.state(J, 0);
      spectral += 0.25 * (v * v.adjoint());
    }
    if (max_abs(poly - spectral) > 1e-12)
      throw std::logic_error("rho_infinity: polynomial and spectral forms disagree");
    return DensityMatrix{poly, 2};
  }();
  return rho;
}

}  // namespace spinsync
