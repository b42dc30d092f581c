#include <catch2/catch_amalgamated.hpp>

#include "spinsync/sync_measures.hpp"

#include "spinsync/liouvillian.hpp"

#include "helpers.hpp"

using namespace spinsync;

TEST_CASE("wigner overlaps reproduce the closed spin-1 forms") {
  for (double theta : {0.3, 1.1, 2.4}) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    REQUIRE(wigner_d_little(1, 1, theta) == Catch::Approx(c * c).margin(1e-14));
    REQUIRE(wigner_d_little(1, 0, theta) ==
            Catch::Approx(std::sin(theta) / std::sqrt(2.0)).margin(1e-14));
    REQUIRE(wigner_d_little(1, -1, theta) == Catch::Approx(s * s).margin(1e-14));
    REQUIRE(wigner_d_little(0.5, 0.5, theta) == Catch::Approx(c).margin(1e-14));
    REQUIRE(wigner_d_little(0.5, -0.5, theta) == Catch::Approx(s).margin(1e-14));

    // rotated |S,S> stays normalized
    for (double spin : {0.5, 1.0, 1.5, 2.0}) {
      double norm = 0.0;
      for (double n = -spin; n <= spin + 0.1; n += 1.0)
        norm += std::pow(wigner_d_little(spin, n, theta), 2);
      REQUIRE(norm == Catch::Approx(1.0).margin(1e-13));
    }
  }
}

TEST_CASE("phase operator matches its Fourier expansion") {
  const SpinOps& s = spin1_ops();
  for (double phi : {0.0, 0.7, -2.1}) {
    ComplexMatrix c = c_operator(1, phi);
    REQUIRE(max_abs(c - ComplexMatrix(c.adjoint())) < 1e-14);

    ComplexMatrix expansion = ComplexMatrix::Identity(3, 3) / (2.0 * pi) +
                              (3.0 / 32.0) * std::exp(im * phi) * s.s_plus +
                              (3.0 / 32.0) * std::exp(-im * phi) * s.s_minus +
                              std::exp(2.0 * im * phi) / (8.0 * pi) * (s.s_plus * s.s_plus) +
                              std::exp(-2.0 * im * phi) / (8.0 * pi) * (s.s_minus * s.s_minus);
    REQUIRE(max_abs(c - expansion) < 1e-14);

    // spin-1/2 off-diagonal coefficient is 1/8
    ComplexMatrix h = c_operator(0.5, phi);
    REQUIRE(std::abs(h(0, 1) - std::exp(im * phi) / 8.0) < 1e-14);
    REQUIRE(std::abs(h(0, 0) - Complex(1.0 / (2.0 * pi))) < 1e-14);
  }

  // azimuthal average of the phase operator is the identity
  ComplexMatrix avg = ComplexMatrix::Zero(3, 3);
  const int grid = 16;
  for (int t = 0; t < grid; ++t) avg += (2.0 * pi / grid) * c_operator(1, 2.0 * pi * t / grid);
  REQUIRE(max_abs(avg - ComplexMatrix::Identity(3, 3)) < 1e-13);
}

TEST_CASE("series coefficients carry the moment values") {
  std::mt19937 gen(31);
  DensityMatrix rho = testutil::random_state(2, gen);

  PhaseSeries s1 = s1_series(rho, 0);
  REQUIRE(s1.terms.size() == 4);  // windings +-1, +-2; no DC term
  REQUIRE(std::abs(s1.terms.at({1, 0}) - moment_of(rho, MomentSpec::site(0, 1)).value) < 1e-14);
  REQUIRE(std::abs(s1.terms.at({2, 0}) - moment_of(rho, MomentSpec::site(0, 2)).value) < 1e-14);

  PhaseSeries rel = pair_series(rho, 0, 1);
  REQUIRE(std::abs(rel.terms.at({1, 0}) - moment_of(rho, MomentSpec::pair_of(0, 1, 1)).value) <
          1e-13);
  REQUIRE(std::abs(rel.terms.at({2, 0}) - moment_of(rho, MomentSpec::pair_of(0, 1, 2)).value) <
          1e-13);

  PhaseSeries joint = s2_joint_series(rho);
  REQUIRE(std::abs(joint.terms.at({1, 0}) -
                   moment_of(rho, MomentSpec::site(0, 1)).value / (2.0 * pi)) < 1e-14);

  // conjugate-winding pairing keeps eval() real
  for (const auto& [w, c] : joint.terms) {
    auto it = joint.terms.find({-w.first, -w.second});
    REQUIRE(it != joint.terms.end());
    REQUIRE(std::abs(c - std::conj(it->second)) < 1e-13);
  }
}

TEST_CASE("marginals are consistent across angle reductions") {
  std::mt19937 gen(37);
  const int grid = 32;

  DensityMatrix rho2 = testutil::random_state(2, gen);
  PhaseSeries joint = s2_joint_series(rho2);
  PhaseSeries s1 = s1_series(rho2, 0);
  PhaseSeries rel = pair_series(rho2, 0, 1);
  for (double phi : {0.2, 1.9}) {
    double acc_site = 0.0, acc_rel = 0.0;
    for (int t = 0; t < grid; ++t) {
      const double chi = 2.0 * pi * t / grid;
      acc_site += (2.0 * pi / grid) * joint.eval(phi, chi);
      acc_rel += (2.0 * pi / grid) * joint.eval(phi + chi, chi);
    }
    REQUIRE(acc_site == Catch::Approx(s1.eval(phi)).margin(1e-12));
    REQUIRE(acc_rel == Catch::Approx(rel.eval(phi)).margin(1e-12));
    // distribution integrates to zero (uniform part subtracted)
    double total = 0.0;
    for (int t = 0; t < grid; ++t) total += (2.0 * pi / grid) * s1.eval(2.0 * pi * t / grid);
    REQUIRE(std::abs(total) < 1e-12);
  }

  DensityMatrix rho3 = testutil::random_state(3, gen);
  PhaseSeries s3 = s3_series(rho3, S3Kind::ab_bc);
  PhaseSeries ab = pair_series(rho3, 0, 1);
  PhaseSeries bc = pair_series(rho3, 1, 2);
  for (double psi : {0.5, 2.7}) {
    double acc_ab = 0.0, acc_bc = 0.0;
    for (int t = 0; t < grid; ++t) {
      const double x = 2.0 * pi * t / grid;
      acc_ab += (2.0 * pi / grid) * s3.eval(psi, x);
      acc_bc += (2.0 * pi / grid) * s3.eval(x, psi);
    }
    REQUIRE(acc_ab == Catch::Approx(ab.eval(psi)).margin(1e-12));
    REQUIRE(acc_bc == Catch::Approx(bc.eval(psi)).margin(1e-12));
  }
}

TEST_CASE("moment bookkeeping and guards") {
  std::mt19937 gen(41);
  DensityMatrix rho = testutil::random_state(2, gen);

  MomentRecord rec = moment_of(rho, MomentSpec::pair_of(0, 1, 1));
  REQUIRE(rec.magnitude() == Catch::Approx(std::abs(rec.value)));
  REQUIRE(rec.locking_phase() == Catch::Approx(-std::arg(rec.value)));

  REQUIRE_THROWS_AS(moment_of(rho, MomentSpec::site(0, 3)), ConfigError);
  REQUIRE_THROWS_AS(moment_of(rho, MomentSpec::pair_of(1, 1, 1)), ConfigError);
  REQUIRE_THROWS_AS(pair_series(rho, 0, 0), ConfigError);
  REQUIRE_THROWS_AS(s3_series(rho, S3Kind::ab_bc), ConfigError);
}

TEST_CASE("distribution sampling, maxima counting, and argmax") {
  PhaseSeries series;
  series.n_kept = 1;
  series.terms[{1, 0}] = 0.5 * std::exp(-im * 1.0);
  series.terms[{-1, 0}] = 0.5 * std::exp(im * 1.0);  // eval = cos(phi - 1)

  PhaseDistribution dist = sample_distribution(series, DistributionKind::s1, 360);
  REQUIRE(dist.values.size() == 360);
  REQUIRE(dist.value_at(10) == Catch::Approx(std::cos(dist.angles[10] - 1.0)).margin(1e-13));
  REQUIRE(count_local_maxima(dist.values) == 1);
  REQUIRE(argmax_angle(dist) == Catch::Approx(1.0).margin(2.0 * pi / 360));

  series.terms.clear();
  series.terms[{2, 0}] = 0.5;
  series.terms[{-2, 0}] = 0.5;  // eval = cos(2 phi)
  dist = sample_distribution(series, DistributionKind::s1, 360);
  REQUIRE(count_local_maxima(dist.values) == 2);

  REQUIRE(count_local_maxima(std::vector<double>(8, 1.0)) == 0);
  REQUIRE_THROWS_AS(sample_distribution(series, DistributionKind::s1, 2), ConfigError);
}

TEST_CASE("sync peaks ignore ripples below the uniform level") {
  // cos(phi) + 0.3 cos(2 phi): the second harmonic puts a strict local
  // maximum at phi = pi, but it sits below the baseline (value -0.7).
  PhaseSeries series;
  series.n_kept = 1;
  series.terms[{1, 0}] = 0.5;
  series.terms[{-1, 0}] = 0.5;
  series.terms[{2, 0}] = 0.15;
  series.terms[{-2, 0}] = 0.15;
  PhaseDistribution dist = sample_distribution(series, DistributionKind::s1, 360);
  REQUIRE(count_local_maxima(dist.values) == 2);
  REQUIRE(count_sync_peaks(dist.values) == 1);

  // 0.2 cos(phi) + cos(2 phi): both maxima rise above the baseline.
  series.terms[{1, 0}] = 0.1;
  series.terms[{-1, 0}] = 0.1;
  series.terms[{2, 0}] = 0.5;
  series.terms[{-2, 0}] = 0.5;
  dist = sample_distribution(series, DistributionKind::s1, 360);
  REQUIRE(count_local_maxima(dist.values) == 2);
  REQUIRE(count_sync_peaks(dist.values) == 2);
}
