#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace spinsync {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr Complex im{0.0, 1.0};

/// Input values that cannot describe a valid system or job.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The Liouvillian kernel is more than one-dimensional at working precision.
class DegenerateSteadyState : public std::runtime_error {
 public:
  explicit DegenerateSteadyState(const std::string& msg) : std::runtime_error(msg) {}
};

/// A linear solve was requested for a right-hand side outside the operator range.
class RhsNotInRange : public std::runtime_error {
 public:
  explicit RhsNotInRange(const std::string& msg) : std::runtime_error(msg) {}
};

/// A fit or solve whose conditioning destroys all significant digits.
class IllConditioned : public std::runtime_error {
 public:
  explicit IllConditioned(const std::string& msg) : std::runtime_error(msg) {}
};

/// Correlation coefficient requested where a covariance denominator vanishes.
class UndefinedCorrelation : public std::runtime_error {
 public:
  explicit UndefinedCorrelation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Root bracketing failed: the objective has the same sign at both ends.
class NoSignChange : public std::runtime_error {
 public:
  explicit NoSignChange(const std::string& msg) : std::runtime_error(msg) {}
};

inline int pow3(int n) {
  int d = 1;
  for (int i = 0; i < n; ++i) d *= 3;
  return d;
}

/// Column-stacking vectorization, so that vec(A rho B) = (B^T (x) A) vec(rho).
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, int dim) {
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Hermitian unit-trace state together with its spin-1 tensor factor count.
struct DensityMatrix {
  ComplexMatrix matrix;
  int n_spins = 1;

  int dim() const { return static_cast<int>(matrix.rows()); }

  /// Throws if the matrix is not a physical state: wrong shape for n_spins,
  /// non-Hermitian, trace away from one, or an eigenvalue below -eig_floor.
  void validate(double herm_tol = 1e-12, double trace_tol = 1e-12,
                double eig_floor = 1e-10) const {
    if (matrix.rows() != matrix.cols() || matrix.rows() != pow3(n_spins))
      throw ConfigError("density matrix shape does not match spin count");
    if (max_abs(matrix - matrix.adjoint()) > herm_tol)
      throw ConfigError("density matrix is not Hermitian at tolerance");
    if (std::abs(matrix.trace() - Complex(1.0)) > trace_tol)
      throw ConfigError("density matrix trace differs from one");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(matrix),
                                                    Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -eig_floor)
      throw ConfigError("density matrix has a negative eigenvalue beyond tolerance");
  }
};

}  // namespace spinsync
