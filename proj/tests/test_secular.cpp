#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mespec/errors.hpp"
#include "mespec/secular.hpp"
#include "mespec/truncated_model.hpp"

using mespec::EigenvalueRecord;
using mespec::LevelSpec;
using mespec::SecularContext;
using mespec::Spectrum;
using mespec::TruncatedModel;

namespace {

LevelSpec reference_spec() { return LevelSpec::affine(1.0, 0.0, 2.0, 0.4, 1.0); }

SecularContext reference_context(int n) {
  const TruncatedModel model(reference_spec(), n);
  return SecularContext::for_view(model.view());
}

LevelSpec random_spec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> gap(0.3, 1.4);
  std::uniform_real_distribution<double> alpha_dist(1.3, 2.7);
  std::vector<double> levels;
  double level = gap(rng);
  for (int m = 0; m < n; ++m) {
    levels.push_back(level);
    level += gap(rng);
  }
  return LevelSpec::explicit_levels(levels, alpha_dist(rng), 0.3, 0.5);
}

}  // namespace

TEST_CASE("secular function is pinned to 1 at zero") {
  for (int n : {1, 2, 16, 64}) {
    const SecularContext ctx = reference_context(n);
    CHECK(std::abs(mespec::secular_eval(ctx, 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("secular function vanishes far to the left") {
  const SecularContext ctx = reference_context(8);
  const double far = mespec::secular_eval(ctx, -1e8);
  CHECK(far < 0.0);
  CHECK(std::abs(far) < 1e-8);
}

TEST_CASE("pole proximity raises a solver error naming the pole") {
  const SecularContext ctx = reference_context(4);
  CHECK_THROWS_AS(mespec::secular_eval(ctx, -ctx.poles()(1)), mespec::SolverError);
  CHECK_THROWS_WITH_AS(mespec::secular_eval(ctx, -ctx.poles()(0)),
                       doctest::Contains("m = 1"), mespec::SolverError);
  CHECK_THROWS_AS(mespec::secular_derivative(ctx, -ctx.poles()(2)), mespec::SolverError);
}

TEST_CASE("two-level eigenvalue equals the trace") {
  // Oracle: for N = 2 the only nonzero eigenvalue is Tr A.
  const TruncatedModel model(reference_spec(), 2);
  const SecularContext ctx = SecularContext::for_view(model.view());
  const EigenvalueRecord rec = mespec::solve_eigenvalue(ctx, 2);
  CHECK(rec.nu == doctest::Approx(model.trace()).epsilon(1e-14));
  CHECK(rec.nu == doctest::Approx(-0.1122824).epsilon(1e-6));
  CHECK(rec.bracket_lo == doctest::Approx(-0.1655330).epsilon(1e-6));
  CHECK(rec.bracket_hi == doctest::Approx(-0.1004010).epsilon(1e-6));
  CHECK(rec.nu > rec.bracket_lo);
  CHECK(rec.nu < rec.bracket_hi);
  CHECK(rec.secular_residual <= 1e-12);
  CHECK_FALSE(rec.newton_fallback);

  // f evaluated at the root is 1.
  CHECK(mespec::secular_eval(ctx, rec.nu) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("secular derivative matches a central difference") {
  const SecularContext ctx = reference_context(16);
  // Interior points away from poles, h scaled by the nearest pole distance.
  for (double nu : {-0.03, -0.08, -0.13, -0.002}) {
    double nearest = 1e300;
    for (int m = 0; m < ctx.size(); ++m) {
      nearest = std::min(nearest, std::abs(nu + ctx.poles()(m)));
    }
    const double h = 1e-6 * nearest;
    const double oracle =
        (mespec::secular_eval(ctx, nu + h) - mespec::secular_eval(ctx, nu - h)) / (2.0 * h);
    const double derivative = mespec::secular_derivative(ctx, nu);
    CHECK(derivative < 0.0);
    CHECK(derivative == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("derivative value at the two-level root") {
  const TruncatedModel model(reference_spec(), 2);
  const SecularContext ctx = SecularContext::for_view(model.view());
  const EigenvalueRecord rec = mespec::solve_eigenvalue(ctx, 2);
  // Oracle: direct two-term evaluation at the trace eigenvalue.
  long double expected = 0.0L;
  for (int m = 0; m < 2; ++m) {
    const long double d = static_cast<long double>(rec.nu) + static_cast<long double>(ctx.poles()(m));
    expected -= static_cast<long double>(ctx.weights()(m)) / (d * d);
  }
  CHECK(rec.fprime == doctest::Approx(static_cast<double>(expected)).epsilon(1e-10));
  CHECK(rec.fprime == doctest::Approx(-177.478).epsilon(1e-3));
}

TEST_CASE("full spectrum at the reference truncation") {
  const TruncatedModel model(reference_spec(), 64);
  const SecularContext ctx = SecularContext::for_view(model.view());
  const Spectrum spectrum = mespec::solve_spectrum(ctx);
  REQUIRE(spectrum.size() == 64);
  CHECK(spectrum.record(1).nu == 0.0);

  for (int k = 2; k <= 64; ++k) {
    const EigenvalueRecord& rec = spectrum.record(k);
    const double width = ctx.poles()(k - 2) - ctx.poles()(k - 1);
    // Strict interlacing, asserted on the full-precision offsets.
    CHECK(rec.offset > -width);
    CHECK(rec.offset < 0.0);
    CHECK(rec.nu > spectrum.record(k - 1).nu - 1.0);  // ordering sanity
    CHECK(rec.secular_residual <= 1e-11);
    CHECK(rec.fprime < 0.0);
    CHECK(rec.alt_residual <= 1e-9);
    if (k > 2) {
      CHECK(spectrum.record(k - 1).nu < rec.nu);
    }
  }
  CHECK(std::abs(spectrum.trace_check) <= 1e-10 * std::abs(model.trace()));
  CHECK(spectrum.slowest().k == 64);
}

TEST_CASE("spectrum agrees with a dense eigensolver oracle") {
  for (int n : {8, 16, 64}) {
    const TruncatedModel model(reference_spec(), n);
    const SecularContext ctx = SecularContext::for_view(model.view());
    const Spectrum spectrum = mespec::solve_spectrum(ctx);

    const Eigen::EigenSolver<Eigen::MatrixXd> solver(model.generator());
    std::vector<double> dense(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(solver.eigenvalues()(i).imag()) <= 1e-12);
      dense[static_cast<std::size_t>(i)] = solver.eigenvalues()(i).real();
    }
    std::sort(dense.begin(), dense.end());
    std::vector<double> mine(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
      mine[static_cast<std::size_t>(k - 1)] = spectrum.nu(k);
    }
    std::sort(mine.begin(), mine.end());
    // The QR oracle itself carries O(||A|| n eps) error; the secular roots
    // are pinned much tighter by the trace and residual checks.
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(mine[static_cast<std::size_t>(k)] -
                     dense[static_cast<std::size_t>(k)]) <= 1e-10);
    }
  }
}

TEST_CASE("one-level spectrum is just zero") {
  const TruncatedModel model(LevelSpec::explicit_levels({0.4}, 2.0, 0.4, 1.0), 1);
  const Spectrum spectrum = mespec::solve_spectrum(SecularContext::for_view(model.view()));
  REQUIRE(spectrum.size() == 1);
  CHECK(spectrum.nu(1) == 0.0);
  CHECK(std::abs(spectrum.trace_check) == 0.0);
}

TEST_CASE("degenerate levels are rejected by the solver layer") {
  LevelSpec spec;
  spec.kind = mespec::LevelKind::Affine;
  spec.omega = 0.0;
  spec.offset = 1.0;
  spec.alpha = 2.0;
  spec.theta = 0.4;
  spec.gap_constant = 1.0;
  const TruncatedModel model(spec, 3);  // model side accepts the degenerate sequence
  CHECK_THROWS_AS(SecularContext::for_view(model.view()), mespec::ValidationError);
}

TEST_CASE("near-degenerate brackets raise a conditioning error") {
  const LevelSpec spec = LevelSpec::explicit_levels({1.0, 1.0 + 5e-16, 2.0}, 2.0, 0.4, 1.0);
  const TruncatedModel model(spec, 3);
  const SecularContext ctx = SecularContext::for_view(model.view());
  CHECK_THROWS_AS(mespec::solve_eigenvalue(ctx, 2), mespec::SolverError);
}

TEST_CASE("alt characterization rejects the zero eigenvalue") {
  const SecularContext ctx = reference_context(8);
  const Spectrum spectrum = mespec::solve_spectrum(ctx);
  CHECK_THROWS_AS(mespec::alt_characterization_residual(ctx, spectrum.record(1)),
                  std::domain_error);
  for (int k = 2; k <= 8; ++k) {
    CHECK(mespec::alt_characterization_residual(ctx, spectrum.record(k)) <= 1e-9);
  }
}

TEST_CASE("solve_eigenvalue rejects out-of-range indices") {
  const SecularContext ctx = reference_context(8);
  CHECK_THROWS_AS(mespec::solve_eigenvalue(ctx, 1), std::out_of_range);
  CHECK_THROWS_AS(mespec::solve_eigenvalue(ctx, 9), std::out_of_range);
}

TEST_CASE("inconsistent contexts are rejected") {
  // Poles not generated by the weights: f - 1 and the alt sum would no
  // longer share roots.
  Eigen::VectorXd w(3), b(3), u(3);
  w << 1.0, 0.5, 0.25;
  b << 3.0, 2.0, 1.0;
  u << 1.0, 0.7, 0.5;
  CHECK_THROWS_AS(SecularContext(w, b, u), mespec::ValidationError);
}

TEST_CASE("random models satisfy interlacing and the trace oracle") {
  std::mt19937_64 rng(777123ULL);
  for (int trial = 0; trial < 8; ++trial) {
    const TruncatedModel model(random_spec(rng, 20), 20);
    const SecularContext ctx = SecularContext::for_view(model.view());
    const Spectrum spectrum = mespec::solve_spectrum(ctx);
    for (int k = 2; k <= 20; ++k) {
      const double width = ctx.poles()(k - 2) - ctx.poles()(k - 1);
      CHECK(spectrum.record(k).offset > -width);
      CHECK(spectrum.record(k).offset < 0.0);
      CHECK(spectrum.record(k).secular_residual <= 1e-11);
      CHECK(spectrum.record(k).alt_residual <= 1e-9);
      CHECK(spectrum.record(k).fprime < 0.0);
    }
    CHECK(std::abs(spectrum.trace_check) <= 1e-10 * std::abs(model.trace()));
  }
}

TEST_CASE("lemma 1 explicit gap bound") {
  const mespec::Lemma1Report report = mespec::lemma1_check(TruncatedModel(reference_spec(), 64));
  CHECK(report.holds);
  CHECK(report.min_ratio >= 1.0);
  // c_alpha = Z_{3/2} / (1 + 2/c) at alpha = 2, c = 1.
  const TruncatedModel model(reference_spec(), 64);
  CHECK(report.constant == doctest::Approx(model.partition_sum(1.5) / 3.0).epsilon(1e-15));
}

TEST_CASE("lemma 2 supremum stays bounded as the truncation grows") {
  std::vector<double> sups;
  for (int n : {16, 32, 64}) {
    const TruncatedModel model(reference_spec(), n);
    const SecularContext ctx = SecularContext::for_view(model.view());
    const Spectrum spectrum = mespec::solve_spectrum(ctx);
    sups.push_back(mespec::lemma2_supremum(ctx, spectrum));
  }
  // The supremum converges from below: increments shrink and total growth
  // stays below one percent.
  CHECK(sups[2] - sups[1] <= sups[1] - sups[0] + 1e-12);
  CHECK(sups[2] / sups[0] - 1.0 <= 0.01);
  CHECK(sups[2] == doctest::Approx(0.4935196).epsilon(1e-5));
}
