#include <doctest.h>

#include <cmath>
#include <random>

#include "mespec/errors.hpp"
#include "mespec/secular.hpp"
#include "mespec/spectral_basis.hpp"
#include "mespec/truncated_model.hpp"

using mespec::BiorthogonalSystem;
using mespec::LevelSpec;
using mespec::SecularContext;
using mespec::Spectrum;
using mespec::TruncatedModel;

namespace {

LevelSpec reference_spec() { return LevelSpec::affine(1.0, 0.0, 2.0, 0.4, 1.0); }

struct Setup {
  TruncatedModel model;
  Spectrum spectrum;
  BiorthogonalSystem system;

  explicit Setup(int n)
      : model(reference_spec(), n),
        spectrum(mespec::solve_spectrum(SecularContext::for_view(model.view()))),
        system(BiorthogonalSystem::build(model.view(), spectrum)) {}
};

}  // namespace

TEST_CASE("two-level eigenvectors in closed form") {
  const Setup s(2);
  const double nu = s.spectrum.nu(2);

  // Oracle: components u_m/(nu+b_m) with nu the 2x2 trace eigenvalue.
  const Eigen::VectorXd& p2 = s.system.right(2).components;
  CHECK(p2(0) == doctest::Approx(std::exp(-1.5) / (nu + s.model.b(1))).epsilon(1e-13));
  CHECK(p2(1) == doctest::Approx(std::exp(-3.0) / (nu + s.model.b(2))).epsilon(1e-13));
  CHECK(p2(0) == doctest::Approx(4.19016).epsilon(1e-4));
  CHECK(p2(1) == doctest::Approx(-4.19046).epsilon(1e-4));

  const Eigen::VectorXd& p1 = s.system.right(1).components;
  CHECK(p1(0) == doctest::Approx(0.731059).epsilon(1e-5));
  CHECK(p1(1) == doctest::Approx(0.268941).epsilon(1e-5));

  // Unscaled left components e^{-m/2}/(nu+b_m); d_2 = -f'(nu_2).
  const mespec::LeftEigenvector& q2 = s.system.left(2);
  CHECK(q2.components(0) * q2.d ==
        doctest::Approx(std::exp(-0.5) / (nu + s.model.b(1))).epsilon(1e-13));
  CHECK(q2.components(0) * q2.d == doctest::Approx(11.3900).epsilon(1e-4));
  CHECK(q2.components(1) * q2.d == doctest::Approx(-30.9637).epsilon(1e-3));
  CHECK(q2.d == doctest::Approx(-s.spectrum.record(2).fprime).epsilon(1e-15));

  // (p_2, q~_2) = 1 after the d_k scaling.
  CHECK(p2.dot(q2.components) == doctest::Approx(1.0).epsilon(1e-12));

  const Eigen::VectorXd& q1 = s.system.left(1).components;
  CHECK(q1(0) == 1.0);
  CHECK(q1(1) == 1.0);
}

TEST_CASE("gibbs vector spans the kernel") {
  const Setup s(64);
  CHECK((s.model.generator() * s.system.gibbs()).norm() <= 1e-14);
}

TEST_CASE("eigen residuals for every pair") {
  const Setup s(64);
  CHECK(s.system.max_right_residual() <= 1e-9);
  CHECK(s.system.max_left_residual() <= 1e-9);
}

TEST_CASE("sum-zero identity for nonzero modes") {
  const Setup s(64);
  CHECK(mespec::sum_zero_defect(s.system) <= 1e-10);
}

TEST_CASE("sign change sits exactly at the bracket index") {
  const Setup s(32);
  for (int k = 2; k <= 32; ++k) {
    const Eigen::VectorXd& p = s.system.right(k).components;
    for (int m = 1; m <= 32; ++m) {
      if (m < k) {
        CHECK(p(m - 1) > 0.0);
      } else {
        CHECK(p(m - 1) < 0.0);
      }
    }
  }
}

TEST_CASE("biorthogonality") {
  const Setup two(2);
  CHECK(mespec::biorthogonality_defect(two.system, 2) <= 1e-12);

  const Setup s(64);
  CHECK(mespec::biorthogonality_defect(s.system, 40) <= 1e-6);
}

TEST_CASE("pairing identity (p_k, q_k) = -f'(nu_k)") {
  const Setup s(64);
  CHECK(mespec::closed_form_pairing_defect(s.system) <= 1e-8);

  // Spot value on the two-level model, both routes computed independently.
  const Setup two(2);
  const double d = two.system.left(2).d;
  const double pairing = two.system.right(2).components.dot(two.system.left(2).components) * d;
  CHECK(pairing == doctest::Approx(d).epsilon(1e-12));
  CHECK(d == doctest::Approx(177.468).epsilon(1e-4));
}

TEST_CASE("reconstruction of random vectors") {
  const Setup s(64);
  std::mt19937_64 rng(424242ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd p(64);
    for (int m = 0; m < 64; ++m) {
      p(m) = gauss(rng);
    }
    const Eigen::VectorXd rebuilt = s.system.reconstruct(s.system.coefficients(p));
    worst = std::max(worst, (p - rebuilt).norm() / p.norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("projection crosscheck reproduces the left eigenvectors") {
  const Setup two(2);
  // Oracle: in dimension 2 the biorthogonal partner of p_1 is all-ones.
  CHECK(mespec::projection_crosscheck(two.system, 1) <= 1e-12);

  const Setup s(64);
  for (int j = 1; j <= 64; ++j) {
    CHECK(mespec::projection_crosscheck(s.system, j) <= 1e-6);
  }

  // N = 1: empty complement, t = p/||p||^2.
  const TruncatedModel single(LevelSpec::explicit_levels({0.5}, 2.0, 0.4, 1.0), 1);
  const Spectrum sp = mespec::solve_spectrum(SecularContext::for_view(single.view()));
  const BiorthogonalSystem sys = BiorthogonalSystem::build(single.view(), sp);
  CHECK(mespec::projection_crosscheck(sys, 1) <= 1e-12);
}

TEST_CASE("factorization A = H(I+S)") {
  const Setup s(64);
  CHECK(mespec::factorization_residual(s.model.view()) <= 1e-14);

  // Entry (1,1) by hand: -b_1 (1 - r_11/b_1) = -b_1 + e^{-2}.
  const Setup two(2);
  CHECK(two.model.generator()(0, 0) ==
        doctest::Approx(-two.model.b(1) + std::exp(-2.0)).epsilon(1e-14));

  // Degenerate uniform rates: H = -2I, S = -ones/2, H(I+S) = [[-1,1],[1,-1]].
  LevelSpec degenerate;
  degenerate.kind = mespec::LevelKind::Affine;
  degenerate.omega = 0.0;
  degenerate.offset = 0.0;
  degenerate.alpha = 2.0;
  degenerate.theta = 0.4;
  degenerate.gap_constant = 1.0;
  const TruncatedModel uniform(degenerate, 2);
  CHECK(mespec::factorization_residual(uniform.view()) == 0.0);
}

TEST_CASE("shifted-gibbs closed form") {
  // Paper identity: p_k - gibbs-scaled-by-1/Z_{(alpha+1)/2} equals
  // -nu_k e^{-lambda_m} / (Z_{(alpha+1)/2} (nu_k + b_m)) entrywise.
  const Setup s(32);
  const double z = s.model.partition_sum(1.5);
  for (int k = 2; k <= 32; ++k) {
    const mespec::EigenvalueRecord& rec = s.spectrum.record(k);
    const Eigen::VectorXd& p = s.system.right(k).components;
    for (int m = 1; m <= 32; ++m) {
      const double den = (s.model.b(m) - s.model.b(k)) + rec.offset;
      const double expected = -rec.nu * std::exp(-s.model.lambda(m)) / (z * den);
      const double shifted = p(m - 1) - std::exp(-s.model.lambda(m)) / z;
      CHECK(shifted == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("gram diagnostic") {
  const Setup s(64);
  const mespec::GramReport report = mespec::gram_diagnostic(s.model.view(), s.system, 2);
  CHECK(report.nonincreasing);
  CHECK(report.smallest_n_star > 0);
  CHECK(report.smallest_n_star <= 64);
  CHECK(report.values.back() == 0.0);  // n_star = N leaves an empty sum
  CHECK(report.g_value == doctest::Approx(4.9826735606).epsilon(1e-9));
  CHECK(report.smallest_n_star == 35);

  CHECK_THROWS_AS(mespec::gram_diagnostic(s.model.view(), s.system, 1), std::out_of_range);
}

TEST_CASE("consistency error on a corrupted eigenvalue") {
  const Setup s(8);
  Spectrum corrupted = s.spectrum;
  corrupted.records[3].nu *= 1.5;
  corrupted.records[3].offset = corrupted.records[3].nu + s.model.b(4);
  CHECK_THROWS_AS(mespec::right_eigenvector(s.model.view(), corrupted, 4),
                  mespec::ConsistencyError);
}
