#pragma once

#include <string>
#include <vector>

#include <Eigen/SVD>

#include "spinsync/spin_algebra.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

/// Chain of 1-3 spin-1 limit-cycle oscillators with nearest-neighbour
/// coherent coupling, per-spin drives, and per-spin gain/damping rates.
struct SystemConfig {
  int n_spins = 1;
  std::vector<double> gamma_g;  // gain rate per spin
  std::vector<double> gamma_d;  // damping rate per spin
  std::vector<double> omega;    // drive amplitude per spin
  std::vector<double> g;        // coupling per nearest-neighbour bond

  int dim() const { return pow3(n_spins); }

  bool operator==(const SystemConfig&) const = default;

  void validate() const {
    if (n_spins < 1 || n_spins > 3) throw ConfigError("n_spins must be 1, 2, or 3");
    auto need = [&](const std::vector<double>& v, size_t n, const char* name) {
      if (v.size() != n)
        throw ConfigError(std::string(name) + " must have " + std::to_string(n) + " entries");
      for (double x : v)
        if (!(x >= 0.0)) throw ConfigError(std::string(name) + " entries must be >= 0");
    };
    need(gamma_g, n_spins, "gamma_g");
    need(gamma_d, n_spins, "gamma_d");
    need(omega, n_spins, "omega");
    need(g, n_spins - 1, "g");
    for (int j = 0; j < n_spins; ++j)
      if (gamma_g[j] + gamma_d[j] <= 0.0)
        throw ConfigError("spin " + std::to_string(j) + " needs a positive gain or damping rate");
  }

  static SystemConfig equal_rates(int n, double gamma, std::vector<double> omega,
                                  std::vector<double> g) {
    SystemConfig c;
    c.n_spins = n;
    c.gamma_g.assign(n, gamma);
    c.gamma_d.assign(n, gamma);
    c.omega = std::move(omega);
    c.g = std::move(g);
    c.validate();
    return c;
  }
};

/// Rotating-frame Hamiltonian: sum_j (Omega_j/2) S+_j + sum_j (g_j/2) S+_j S-_{j+1} + H.c.
inline ComplexMatrix build_hamiltonian(const SystemConfig& c) {
  c.validate();
  const SpinOps& s = spin1_ops();
  const int d = c.dim();
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < c.n_spins; ++j)
    h += 0.5 * c.omega[j] * embed(s.s_plus, j, c.n_spins);
  for (int j = 0; j + 1 < c.n_spins; ++j)
    h += 0.5 * c.g[j] * embed(s.s_plus, j, c.n_spins) * embed(s.s_minus, j + 1, c.n_spins);
  ComplexMatrix hh = h + ComplexMatrix(h.adjoint());
  return hh;
}

namespace detail {

// vec(A rho) = (1 (x) A) vec(rho); vec(rho B) = (B^T (x) 1) vec(rho).
inline ComplexMatrix left_mult(const ComplexMatrix& a) {
  return kron(ComplexMatrix::Identity(a.rows(), a.cols()), a);
}

inline ComplexMatrix right_mult(const ComplexMatrix& b) {
  return kron(b.transpose(), ComplexMatrix::Identity(b.rows(), b.cols()));
}

// Superoperator of the Lindblad dissipator D[L].
inline ComplexMatrix dissipator(const ComplexMatrix& l) {
  ComplexMatrix ldl = l.adjoint() * l;
  return kron(l.conjugate(), l) - 0.5 * (left_mult(ldl) + right_mult(ldl));
}

}  // namespace detail

/// Dissipative part of the generator: per spin, gain through S+_j S^z_j at
/// rate gamma_g_j / 2 and damping through S-_j S^z_j at rate gamma_d_j / 2.
inline ComplexMatrix dissipator_superop(const SystemConfig& c) {
  c.validate();
  const SpinOps& s = spin1_ops();
  const int d2 = c.dim() * c.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (int j = 0; j < c.n_spins; ++j) {
    if (c.gamma_g[j] > 0.0)
      out += 0.5 * c.gamma_g[j] * detail::dissipator(embed(s.s_plus * s.s_z, j, c.n_spins));
    if (c.gamma_d[j] > 0.0)
      out += 0.5 * c.gamma_d[j] * detail::dissipator(embed(s.s_minus * s.s_z, j, c.n_spins));
  }
  return out;
}

struct Liouvillian {
  ComplexMatrix matrix;  // acts on column-stacked density matrices
  SystemConfig config;
};

inline Liouvillian build_liouvillian(const SystemConfig& c) {
  ComplexMatrix h = build_hamiltonian(c);
  ComplexMatrix gen = dissipator_superop(c);
  gen -= im * (detail::left_mult(h) - detail::right_mult(h));
  return Liouvillian{std::move(gen), c};
}

/// Unique steady state from the SVD null space of the generator. Throws
/// DegenerateSteadyState when a second singular value sits below
/// 1e-9 * sigma_max, i.e. the kernel is not one-dimensional at resolution.
inline DensityMatrix steady_state(const Liouvillian& li) {
  const int d2 = static_cast<int>(li.matrix.rows());
  const int d = li.config.dim();
  Eigen::BDCSVD<ComplexMatrix> svd(li.matrix, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (d2 >= 2 && sv(d2 - 2) < 1e-9 * smax)
    throw DegenerateSteadyState("steady state is not unique: second singular value " +
                                std::to_string(sv(d2 - 2) / smax) + " of sigma_max");
  ComplexVector v = svd.matrixV().col(d2 - 1);
  if ((li.matrix * v).norm() > 1e-8 * smax) {
    // The divide-and-conquer kernel mispairs singular vectors on some
    // complex inputs (Eigen 3.4.0); its singular values are still reliable,
    // so only the kernel vector needs the exact one-sided Jacobi fallback.
    Eigen::JacobiSVD<ComplexMatrix> exact(li.matrix, Eigen::ComputeThinV);
    v = exact.matrixV().col(d2 - 1);
  }
  ComplexMatrix rho = unvec(v, d);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-9)
    throw DegenerateSteadyState("null vector has vanishing trace; no normalizable steady state");
  rho /= tr;
  rho = hermitize(rho);
  return DensityMatrix{std::move(rho), li.config.n_spins};
}

/// Fallback solver: replaces the first generator row with the trace
/// constraint tr(rho) = 1 and solves the resulting square system.
inline DensityMatrix steady_state_trace_row(const Liouvillian& li) {
  const int d = li.config.dim();
  const int d2 = d * d;
  ComplexMatrix a = li.matrix;
  a.row(0) = vec(ComplexMatrix::Identity(d, d)).adjoint();
  ComplexVector b = ComplexVector::Zero(d2);
  b(0) = 1.0;
  ComplexVector x = a.colPivHouseholderQr().solve(b);
  if ((a * x - b).norm() > 1e-8 * std::max(1.0, b.norm()))
    throw DegenerateSteadyState("trace-row system is singular beyond tolerance");
  ComplexMatrix rho = unvec(x, d);
  rho /= rho.trace();
  rho = hermitize(rho);
  return DensityMatrix{std::move(rho), li.config.n_spins};
}

inline double steady_state_residual(const Liouvillian& li, const DensityMatrix& rho) {
  return (li.matrix * vec(rho.matrix)).norm();
}

/// Unitary Z = exp(i pi sum_j S^x_j); flips S+ <-> S- on every spin, so it
/// commutes with the generator whenever all drives and inter-spin phases
/// are real, and with the dissipator always.
inline ComplexMatrix symmetry_transform_z(int n_spins) {
  const SpinOps& s = spin1_ops();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s.s_x);
  ComplexMatrix z1 = ComplexMatrix::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    ComplexVector v = es.eigenvectors().col(k);
    z1 += std::exp(im * pi * es.eigenvalues()(k)) * (v * v.adjoint());
  }
  ComplexMatrix z = ComplexMatrix::Identity(1, 1);
  for (int j = 0; j < n_spins; ++j) z = kron(z, z1);
  return z;
}

}  // namespace spinsync
