#pragma once

#include <random>

#include "spinsync/types.hpp"

namespace testutil {

inline spinsync::ComplexMatrix random_matrix(int rows, int cols, std::mt19937& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  spinsync::ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = spinsync::Complex(dist(gen), dist(gen));
  return m;
}

inline spinsync::ComplexMatrix random_hermitian(int d, std::mt19937& gen) {
  spinsync::ComplexMatrix m = random_matrix(d, d, gen);
  return spinsync::ComplexMatrix(0.5 * (m + m.adjoint()));
}

/// Full-rank random state via G G^dagger / tr.
inline spinsync::DensityMatrix random_state(int n_spins, std::mt19937& gen) {
  const int d = spinsync::pow3(n_spins);
  spinsync::ComplexMatrix g = random_matrix(d, d, gen);
  spinsync::ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return {std::move(rho), n_spins};
}

inline spinsync::ComplexMatrix random_unitary(int d, std::mt19937& gen) {
  Eigen::HouseholderQR<spinsync::ComplexMatrix> qr(random_matrix(d, d, gen));
  spinsync::ComplexMatrix q = qr.householderQ();
  spinsync::ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
  return q;
}

}  // namespace testutil
