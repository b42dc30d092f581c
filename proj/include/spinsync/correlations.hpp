#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "spinsync/spin_algebra.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

namespace detail {

// Digits of a flat chain index, site 0 as the most significant trit.
inline void to_digits(int flat, int n_spins, int* digits) {
  for (int j = n_spins - 1; j >= 0; --j) {
    digits[j] = flat % 3;
    flat /= 3;
  }
}

inline int from_digits(const int* digits, int n) {
  int flat = 0;
  for (int j = 0; j < n; ++j) flat = 3 * flat + digits[j];
  return flat;
}

}  // namespace detail

/// Ordered list of kept sites; the reduced state's factors follow this order.
struct SubsystemSelector {
  std::vector<int> keep;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSelector& sel) {
  const int n = rho.n_spins;
  if (sel.keep.empty()) throw ConfigError("partial_trace: keep list is empty");
  std::vector<bool> seen(n, false);
  for (int s : sel.keep) {
    if (s < 0 || s >= n) throw ConfigError("partial_trace: site out of range");
    if (seen[s]) throw ConfigError("partial_trace: duplicate site");
    seen[s] = true;
  }
  std::vector<int> traced;
  for (int s = 0; s < n; ++s)
    if (!seen[s]) traced.push_back(s);

  const int nk = static_cast<int>(sel.keep.size());
  const int nt = static_cast<int>(traced.size());
  const int dk = pow3(nk);
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  std::vector<int> row(n), col(n), kr(nk), kc(nk), td(std::max(nt, 1));
  for (int r = 0; r < dk; ++r) {
    detail::to_digits(r, nk, kr.data());
    for (int c = 0; c < dk; ++c) {
      detail::to_digits(c, nk, kc.data());
      Complex acc = 0.0;
      for (int t = 0; t < pow3(nt); ++t) {
        detail::to_digits(t, nt, td.data());
        for (int a = 0; a < nk; ++a) {
          row[sel.keep[a]] = kr[a];
          col[sel.keep[a]] = kc[a];
        }
        for (int a = 0; a < nt; ++a) {
          row[traced[a]] = td[a];
          col[traced[a]] = td[a];
        }
        acc += rho.matrix(detail::from_digits(row.data(), n), detail::from_digits(col.data(), n));
      }
      out(r, c) = acc;
    }
  }
  return DensityMatrix{std::move(out), nk};
}

/// Von Neumann entropy in nats; eigenvalues below 1e-14 contribute nothing.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho.matrix), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double lam = es.eigenvalues()(k);
    if (lam > 1e-14) s -= lam * std::log(lam);
  }
  return s;
}

inline double mutual_information(const DensityMatrix& rho, int i, int j) {
  if (i == j) throw ConfigError("mutual_information: sites must differ");
  DensityMatrix rho_i = partial_trace(rho, {{i}});
  DensityMatrix rho_j = partial_trace(rho, {{j}});
  DensityMatrix rho_ij = rho.n_spins == 2 ? rho : partial_trace(rho, {{i, j}});
  return von_neumann_entropy(rho_i) + von_neumann_entropy(rho_j) - von_neumann_entropy(rho_ij);
}

/// Transposes the indices of one tensor factor in place of the full matrix.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, int site, int n_spins) {
  if (site < 0 || site >= n_spins) throw ConfigError("partial_transpose: site out of range");
  const int d = pow3(n_spins);
  if (m.rows() != d || m.cols() != d) throw ConfigError("partial_transpose: shape mismatch");
  ComplexMatrix out(d, d);
  std::vector<int> row(n_spins), col(n_spins);
  for (int r = 0; r < d; ++r) {
    detail::to_digits(r, n_spins, row.data());
    for (int c = 0; c < d; ++c) {
      detail::to_digits(c, n_spins, col.data());
      std::swap(row[site], col[site]);
      out(detail::from_digits(row.data(), n_spins), detail::from_digits(col.data(), n_spins)) =
          m(r, c);
      std::swap(row[site], col[site]);
    }
  }
  return out;
}

/// Entanglement negativity across the cut separating `site` from the rest:
/// sum of magnitudes of the negative partial-transpose eigenvalues.
inline double negativity(const DensityMatrix& rho, int site) {
  ComplexMatrix pt = partial_transpose(rho.matrix, site, rho.n_spins);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(pt), Eigen::EigenvaluesOnly);
  double neg = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k)
    neg += 0.5 * (std::abs(es.eigenvalues()(k)) - es.eigenvalues()(k));
  return neg;
}

/// Ladder-operator correlation coefficient
/// C^(n)_ij = COV_ij / sqrt(COV_ii COV_jj) with
/// COV_ij = <(S-_i S+_j)^n> - <(S-_i)^n><(S+_j)^n>.
inline Complex correlation(const DensityMatrix& rho, int i, int j, int order) {
  if (order != 1 && order != 2) throw ConfigError("correlation order must be 1 or 2");
  const SpinOps& s = spin1_ops();
  const int n = rho.n_spins;
  auto cov = [&](int a, int b) {
    ComplexMatrix mixed = embed(s.s_minus, a, n) * embed(s.s_plus, b, n);
    ComplexMatrix lower = embed(s.s_minus, a, n);
    ComplexMatrix raise = embed(s.s_plus, b, n);
    if (order == 2) {
      mixed = mixed * mixed;
      lower = lower * lower;
      raise = raise * raise;
    }
    return (rho.matrix * mixed).trace() -
           (rho.matrix * lower).trace() * (rho.matrix * raise).trace();
  };
  const Complex den_i = cov(i, i);
  const Complex den_j = cov(j, j);
  if (std::abs(den_i) < 1e-14 || std::abs(den_j) < 1e-14)
    throw UndefinedCorrelation("correlation denominator vanishes at tolerance 1e-14");
  return cov(i, j) / std::sqrt(den_i * den_j);
}

/// Largest population deviation between two states, max_n |rho_nn - ref_nn|.
inline double population_deviation(const DensityMatrix& rho, const DensityMatrix& ref) {
  if (rho.dim() != ref.dim()) throw ConfigError("population_deviation: dimension mismatch");
  return (rho.matrix.diagonal() - ref.matrix.diagonal()).cwiseAbs().maxCoeff();
}

}  // namespace spinsync
