#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "spinsync/liouvillian.hpp"
#include "spinsync/sync_measures.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

/// SVD-backed pseudo-inverse of the dissipative generator. The kernel is the
/// dark state |0...0><0...0|, so solves are well posed exactly on its range;
/// anything else is rejected rather than silently projected.
class DissipatorPinv {
 public:
  explicit DissipatorPinv(const SystemConfig& config) : config_(config) {
    config_.validate();
    for (int j = 0; j < config_.n_spins; ++j)
      if (config_.gamma_g[j] <= 0.0 || config_.gamma_d[j] <= 0.0)
        throw ConfigError("perturbative expansion needs both rates positive on every spin");
    const int d = config_.dim();
    ComplexMatrix diss = dissipator_superop(config_);
    svd_.compute(diss, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd_.singularValues();
    const double cut = 1e-12 * sv(0);
    rank_ = 0;
    while (rank_ < sv.size() && sv(rank_) > cut) ++rank_;
    if (rank_ != sv.size() - 1)
      throw DegenerateSteadyState("dissipator kernel is not one-dimensional");

    rho0_ = ComplexMatrix::Zero(d, d);
    const int dark = (d - 1) / 2;  // index of |0,...,0>
    rho0_(dark, dark) = 1.0;
    if ((diss * vec(rho0_)).norm() > 1e-12 * sv(0))
      throw std::logic_error("dark state fails to annihilate the dissipator");
    dissipator_ = std::move(diss);
  }

  const SystemConfig& config() const { return config_; }
  const ComplexMatrix& rho0() const { return rho0_; }
  const ComplexMatrix& matrix() const { return dissipator_; }

  /// Minimum-norm solve D x = rhs; throws RhsNotInRange when rhs has a
  /// component on the kernel's left cokernel beyond 1e-9 relative.
  ComplexVector solve(const ComplexVector& rhs) const {
    ComplexVector y = svd_.matrixU().adjoint() * rhs;
    ComplexVector coeffs = ComplexVector::Zero(y.size());
    coeffs.head(rank_) = y.head(rank_).array() /
                         svd_.singularValues().head(rank_).array().cast<Complex>();
    const double dropped = y.tail(y.size() - rank_).norm();
    if (dropped > 1e-9 * std::max(rhs.norm(), 1e-300))
      throw RhsNotInRange("right-hand side leaves the dissipator range (relative defect " +
                          std::to_string(dropped / rhs.norm()) + ")");
    return svd_.matrixV() * coeffs;
  }

 private:
  SystemConfig config_;
  // One-sided Jacobi: slower than the divide-and-conquer kernel but immune
  // to its complex-valued U/V pairing defect (Eigen 3.4.0), which solve()
  // cannot tolerate; the factorization is reused across all solves.
  Eigen::JacobiSVD<ComplexMatrix> svd_;
  Eigen::Index rank_ = 0;
  ComplexMatrix rho0_;
  ComplexMatrix dissipator_;
};

/// Corrections rho^(n) solving D(rho^(n+1)) = i [H, rho^(n)] from
/// rho^(0) = |0...0><0...0|, each traceless (n >= 1) and Hermitian. The
/// amplitudes in `config` are baked into H, so partial sums approximate the
/// steady state directly.
struct PerturbationSeries {
  std::vector<ComplexMatrix> orders;
  SystemConfig config;
  ComplexMatrix hamiltonian;
  ComplexMatrix dissipator;

  ComplexMatrix partial_sum(int max_order) const {
    if (max_order < 0 || max_order >= static_cast<int>(orders.size()))
      throw ConfigError("partial_sum: order outside computed range");
    ComplexMatrix acc = orders[0];
    for (int n = 1; n <= max_order; ++n) acc += orders[n];
    return acc;
  }
};

inline PerturbationSeries perturb_expand(const DissipatorPinv& pinv, const SystemConfig& config,
                                         int max_order) {
  if (max_order < 0 || max_order > 8)
    throw ConfigError("perturbative order must be between 0 and 8");
  config.validate();
  if (config.n_spins != pinv.config().n_spins ||
      config.gamma_g != pinv.config().gamma_g || config.gamma_d != pinv.config().gamma_d)
    throw ConfigError("perturb_expand: rates differ from the factorized dissipator");

  PerturbationSeries series;
  series.config = config;
  series.hamiltonian = build_hamiltonian(config);
  series.dissipator = pinv.matrix();
  series.orders.reserve(max_order + 1);
  series.orders.push_back(pinv.rho0());
  const int d = config.dim();
  for (int n = 1; n <= max_order; ++n) {
    const ComplexMatrix& prev = series.orders.back();
    ComplexMatrix rhs = im * (series.hamiltonian * prev - prev * series.hamiltonian);
    ComplexMatrix next = unvec(pinv.solve(vec(rhs)), d);
    next -= next.trace() * pinv.rho0();  // kernel shift: corrections are traceless
    next = hermitize(next);
    series.orders.push_back(std::move(next));
  }
  return series;
}

inline PerturbationSeries perturb_expand(const SystemConfig& config, int max_order) {
  return perturb_expand(DissipatorPinv(config), config, max_order);
}

struct OrderDiagnostics {
  double residual;    // || D vec(rho^n) - i vec([H, rho^(n-1)]) ||
  double trace_dev;   // |tr rho^n| for n >= 1, |tr - 1| for n = 0
  double herm_dev;    // max |rho^n - rho^n dagger|
  double parity_dev;  // even orders are real, odd imaginary: max leakage
};

inline OrderDiagnostics order_diagnostics(const PerturbationSeries& series, int n) {
  const auto& rho = series.orders.at(n);
  OrderDiagnostics d{};
  if (n == 0) {
    d.residual = (series.dissipator * vec(rho)).norm();
    d.trace_dev = std::abs(rho.trace() - Complex(1.0));
  } else {
    const auto& prev = series.orders[n - 1];
    ComplexMatrix rhs = im * (series.hamiltonian * prev - prev * series.hamiltonian);
    d.residual = (series.dissipator * vec(rho) - vec(rhs)).norm();
    d.trace_dev = std::abs(rho.trace());
  }
  d.herm_dev = max_abs(rho - rho.adjoint());
  d.parity_dev = n % 2 == 0 ? rho.imag().cwiseAbs().maxCoeff() : rho.real().cwiseAbs().maxCoeff();
  return d;
}

struct CoefficientFit {
  // (omega power, g power) -> coefficient of Omega^a g^b in the moment
  std::map<std::pair<int, int>, Complex> coefficients;
  double condition = 0.0;  // worst design-matrix condition over degrees
};

/// Fits the polynomial dependence of a moment on the drive and coupling
/// amplitudes. `base` fixes the rates and the direction of the amplitude
/// pattern: evaluation at (a, b) uses omega = a * base.omega, g = b * base.g.
/// Order-n corrections are exactly homogeneous of degree n in (a, b), so each
/// degree is fit independently from small-amplitude evaluations.
inline CoefficientFit extract_coefficients(const SystemConfig& base, const MomentSpec& target,
                                           const std::vector<std::pair<int, int>>& monomials) {
  if (monomials.empty()) throw ConfigError("extract_coefficients: no monomials requested");
  int max_degree = 0;
  for (auto [a, b] : monomials) {
    if (a < 0 || b < 0) throw ConfigError("extract_coefficients: negative powers");
    max_degree = std::max(max_degree, a + b);
  }
  if (max_degree > 8) throw ConfigError("extract_coefficients: degree above expansion limit");

  double scale = 0.0;
  for (int j = 0; j < base.n_spins; ++j)
    scale = std::max({scale, base.gamma_g[j], base.gamma_d[j]});
  scale *= 1e-3;

  static constexpr std::pair<int, int> kPoints[] = {
      {1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 3}};
  const int n_points = static_cast<int>(std::size(kPoints));

  DissipatorPinv pinv(base);
  Eigen::MatrixXd amps(n_points, 2);
  ComplexMatrix values(n_points, max_degree + 1);
  for (int t = 0; t < n_points; ++t) {
    const double a = kPoints[t].first * scale;
    const double b = kPoints[t].second * scale;
    SystemConfig c = base;
    for (double& w : c.omega) w *= a;
    for (double& w : c.g) w *= b;
    PerturbationSeries series = perturb_expand(pinv, c, max_degree);
    amps(t, 0) = a;
    amps(t, 1) = b;
    for (int n = 0; n <= max_degree; ++n)
      values(t, n) = moment_of(series.orders[n], base.n_spins, target).value;
  }

  CoefficientFit fit;
  for (int degree = 0; degree <= max_degree; ++degree) {
    bool wanted = false;
    for (auto [a, b] : monomials) wanted = wanted || a + b == degree;
    if (!wanted) continue;
    ComplexMatrix design(n_points, degree + 1);
    for (int t = 0; t < n_points; ++t)
      for (int a = 0; a <= degree; ++a)
        design(t, a) = std::pow(amps(t, 0), a) * std::pow(amps(t, 1), degree - a);
    Eigen::JacobiSVD<ComplexMatrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
    if (!(cond < 1e10))
      throw IllConditioned("coefficient fit at degree " + std::to_string(degree) +
                           " has condition " + std::to_string(cond));
    fit.condition = std::max(fit.condition, cond);
    ComplexVector coeffs = svd.solve(values.col(degree));
    for (auto [a, b] : monomials)
      if (a + b == degree) fit.coefficients[{a, b}] = coeffs(a);
  }
  return fit;
}

}  // namespace spinsync
