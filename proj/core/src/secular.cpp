#include "mespec/secular.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mespec/compensated.hpp"
#include "mespec/errors.hpp"

namespace mespec {

namespace {

double ulp_of(double x) {
  const double a = std::abs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

// Both secular sums share this shape: dominant_m/(c_m + delta) summed around
// an anchored pole k (c_m = b_m - b_k, c_k = 0). Terms are accumulated from
// the largest index, the anchored term last so the compensation absorbs it.
double anchored_sum(const Eigen::VectorXd& num, const Eigen::VectorXd& poles, int anchor,
                    double delta, double* abs_sum = nullptr) {
  const Eigen::Index n = poles.size();
  const double bk = poles(anchor);
  CompensatedSum acc;
  double mag = 0.0;
  for (Eigen::Index m = n; m-- > 0;) {
    if (m == anchor) {
      continue;
    }
    const double term = num(m) / ((poles(m) - bk) + delta);
    acc += term;
    mag += std::abs(term);
  }
  const double dominant = num(anchor) / delta;
  acc += dominant;
  mag += std::abs(dominant);
  if (abs_sum != nullptr) {
    *abs_sum = mag;
  }
  return acc.value();
}

double anchored_derivative(const Eigen::VectorXd& num, const Eigen::VectorXd& poles, int anchor,
                           double delta) {
  const Eigen::Index n = poles.size();
  const double bk = poles(anchor);
  CompensatedSum acc;
  for (Eigen::Index m = n; m-- > 0;) {
    if (m == anchor) {
      continue;
    }
    const double d = (poles(m) - bk) + delta;
    acc += num(m) / (d * d);
  }
  acc += num(anchor) / (delta * delta);
  return -acc.value();
}

int nearest_pole(const Eigen::VectorXd& poles, double nu) {
  int best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < poles.size(); ++m) {
    const double d = std::abs(nu + poles(m));
    if (d < dist) {
      dist = d;
      best = static_cast<int>(m);
    }
  }
  return best;
}

}  // namespace

SecularContext::SecularContext(Eigen::VectorXd weights, Eigen::VectorXd poles,
                               Eigen::VectorXd alt_weights)
    : weights_(std::move(weights)), poles_(std::move(poles)), alt_weights_(std::move(alt_weights)) {
  if (weights_.size() != poles_.size() || alt_weights_.size() != poles_.size() ||
      poles_.size() == 0) {
    throw ValidationError("secular context requires equally sized nonempty inputs");
  }
  for (Eigen::Index m = 0; m < poles_.size(); ++m) {
    if (!(weights_(m) > 0.0) || !(alt_weights_(m) > 0.0)) {
      throw ValidationError("secular weights must be strictly positive");
    }
    if (!(poles_(m) > 0.0)) {
      throw ValidationError("secular poles must be strictly positive");
    }
    if (m + 1 < poles_.size() && !(poles_(m) > poles_(m + 1))) {
      throw ValidationError("secular poles must be strictly decreasing (degenerate levels)");
    }
  }
  // Self-consistency pins f(0) = 1: poles must satisfy b_m u_m / w_m = sum(u)
  // so that f - 1 and the alt sum share their roots.
  CompensatedSum z;
  for (Eigen::Index m = alt_weights_.size(); m-- > 0;) {
    z += alt_weights_(m);
  }
  for (Eigen::Index m = 0; m < poles_.size(); ++m) {
    const double implied = poles_(m) * alt_weights_(m) / weights_(m);
    if (std::abs(implied - z.value()) > 1e-10 * z.value()) {
      throw ValidationError("secular context is not self-consistent at m = " +
                            std::to_string(m + 1));
    }
  }
}

SecularContext SecularContext::for_view(const GeneratorView& view) {
  return SecularContext(view.u.cwiseProduct(view.v), view.b, view.u);
}

const EigenvalueRecord& Spectrum::record(int k) const {
  if (k < 1 || k > size()) {
    throw std::out_of_range("eigenvalue index " + std::to_string(k) + " out of range");
  }
  return records[static_cast<std::size_t>(k) - 1];
}

const EigenvalueRecord& Spectrum::slowest() const {
  if (records.size() < 2) {
    throw std::out_of_range("spectrum has no nonzero eigenvalue");
  }
  return records.back();
}

double secular_eval(const SecularContext& ctx, double nu) {
  const int j = nearest_pole(ctx.poles(), nu);
  const double delta = nu + ctx.poles()(j);
  if (delta == 0.0 || std::abs(delta) <= ulp_of(ctx.poles()(j))) {
    throw SolverError("secular function evaluated at pole m = " + std::to_string(j + 1));
  }
  return anchored_sum(ctx.weights(), ctx.poles(), j, delta);
}

double secular_derivative(const SecularContext& ctx, double nu) {
  const int j = nearest_pole(ctx.poles(), nu);
  const double delta = nu + ctx.poles()(j);
  if (delta == 0.0 || std::abs(delta) <= ulp_of(ctx.poles()(j))) {
    throw SolverError("secular derivative evaluated at pole m = " + std::to_string(j + 1));
  }
  return anchored_derivative(ctx.weights(), ctx.poles(), j, delta);
}

double secular_eval_at_offset(const SecularContext& ctx, int k, double delta) {
  if (k < 1 || k > ctx.size()) {
    throw std::out_of_range("anchor index out of range");
  }
  if (delta == 0.0) {
    throw SolverError("secular function evaluated at pole m = " + std::to_string(k));
  }
  return anchored_sum(ctx.weights(), ctx.poles(), k - 1, delta);
}

double secular_derivative_at_offset(const SecularContext& ctx, int k, double delta) {
  if (k < 1 || k > ctx.size()) {
    throw std::out_of_range("anchor index out of range");
  }
  if (delta == 0.0) {
    throw SolverError("secular derivative evaluated at pole m = " + std::to_string(k));
  }
  return anchored_derivative(ctx.weights(), ctx.poles(), k - 1, delta);
}

double alt_characterization_residual(const SecularContext& ctx, const EigenvalueRecord& rec) {
  if (rec.k < 2) {
    throw std::domain_error("alt characterization holds for nonzero eigenvalues only");
  }
  double mag = 0.0;
  const double value = anchored_sum(ctx.alt_weights(), ctx.poles(), rec.k - 1, rec.offset, &mag);
  return std::abs(value) / mag;
}

EigenvalueRecord solve_eigenvalue(const SecularContext& ctx, int k, const SolverOptions& options) {
  const int n = ctx.size();
  if (k < 2 || k > n) {
    throw std::out_of_range("solve_eigenvalue needs 2 <= k <= " + std::to_string(n));
  }
  const Eigen::VectorXd& b = ctx.poles();
  const Eigen::VectorXd& u = ctx.alt_weights();
  const int i = k - 1;
  const double width = b(i - 1) - b(i);
  if (width <= 64.0 * ulp_of(b(i - 1))) {
    throw SolverError("bracket " + std::to_string(k) + " is degenerate: poles differ by " +
                      std::to_string(width));
  }
  if (u(i) == 0.0 || ctx.weights()(i) == 0.0) {
    throw SolverError("weight underflow at k = " + std::to_string(k));
  }

  // Work in delta = nu + b_k on (-width, 0). The alt sum
  //   s(delta) = u_k/delta + sum_{m != k} u_m/((b_m - b_k) + delta)
  // decreases from +inf to -inf across the bracket exactly like f, and its
  // root is the eigenvalue. Rooting s instead of f - 1 keeps full relative
  // precision when the root is exponentially close to the pole.
  const auto s_at = [&](double d) { return anchored_sum(u, b, i, d); };

  // Left guard at a fixed relative inset. The right guard point shrinks
  // geometrically: for tail eigenvalues the root itself lies within
  // 1e-6*width of the pole, so a fixed inset would sit on the wrong side.
  double lo = -width * (1.0 - 1e-6);
  if (!(s_at(lo) > 0.0)) {
    throw SolverError("secular function not positive near lower bracket end, k = " +
                      std::to_string(k));
  }
  double hi = -1e-6 * width;
  int shrink = 0;
  while (!(s_at(hi) < 0.0)) {
    hi *= 1e-3;
    if (++shrink > 110 || hi == 0.0) {
      throw SolverError("could not certify upper bracket end, k = " + std::to_string(k));
    }
  }

  // Plain bisection down to the requested fraction of the bracket width.
  while ((hi - lo) > options.bisect_tol * width) {
    const double mid = 0.5 * (lo + hi);
    if (s_at(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Safeguarded Newton on s. Near the pole the Newton step from the flat
  // side overshoots; the reciprocal step solving u_k/delta = -rest lands on
  // the hyperbola directly, so it is the fallback candidate before bisection.
  double x = 0.5 * (lo + hi);
  bool fallback = false;
  int iterations = 0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (; iterations < options.newton_max_iter; ++iterations) {
    double mag = 0.0;
    const double sv = anchored_sum(u, b, i, x, &mag);
    if (sv > 0.0) {
      lo = x;
    } else if (sv < 0.0) {
      hi = x;
    }
    if (std::abs(sv) <= 1e-14 * mag) {
      break;
    }
    const double sp = anchored_derivative(u, b, i, x);
    double next = x - sv / sp;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      const double rest = sv - u(i) / x;
      next = (rest != 0.0) ? -u(i) / rest : 0.5 * (lo + hi);
      if (!std::isfinite(next) || next <= lo || next >= hi) {
        next = 0.5 * (lo + hi);
      }
    }
    if (std::abs(next - x) <= 4.0 * eps * std::abs(x)) {
      x = next;
      break;
    }
    x = next;
  }
  if (iterations >= options.newton_max_iter) {
    // Pure bisection to a two-ulp bracket as the last resort.
    fallback = true;
    while ((hi - lo) > 2.0 * ulp_of(std::max(std::abs(lo), std::abs(hi)))) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) {
        break;
      }
      if (s_at(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    x = 0.5 * (lo + hi);
  }

  EigenvalueRecord rec;
  rec.k = k;
  rec.offset = x;
  rec.nu = x - b(i);
  rec.bracket_lo = -b(i - 1);
  rec.bracket_hi = -b(i);
  rec.newton_fallback = fallback;
  rec.secular_residual = std::abs(secular_eval_at_offset(ctx, k, x) - 1.0);
  rec.fprime = secular_derivative_at_offset(ctx, k, x);
  rec.alt_residual = alt_characterization_residual(ctx, rec);
  return rec;
}

Spectrum solve_spectrum(const SecularContext& ctx, const SolverOptions& options) {
  const int n = ctx.size();
  Spectrum spectrum;
  spectrum.records.reserve(static_cast<std::size_t>(n));

  // nu_1 = 0 is structural (columns of the generator sum to zero) and is
  // pinned, never solved. Its residual record measures the secular pin f(0)=1.
  EigenvalueRecord first;
  first.k = 1;
  first.nu = 0.0;
  first.offset = ctx.poles()(0);  // distance to -b_1, kept for symmetry
  first.bracket_lo = 0.0;
  first.bracket_hi = 0.0;
  {
    CompensatedSum f0;
    CompensatedSum fp0;
    for (Eigen::Index m = ctx.size(); m-- > 0;) {
      const double t = ctx.weights()(m) / ctx.poles()(m);
      f0 += t;
      fp0 += t / ctx.poles()(m);
    }
    first.secular_residual = std::abs(f0.value() - 1.0);
    first.fprime = -fp0.value();
    first.alt_residual = std::numeric_limits<double>::quiet_NaN();
  }
  spectrum.records.push_back(first);

  for (int k = 2; k <= n; ++k) {
    EigenvalueRecord rec = solve_eigenvalue(ctx, k, options);
    if (rec.k >= 3 && !(spectrum.records.back().nu < rec.nu)) {
      throw ConsistencyError("eigenvalues not strictly increasing at k = " + std::to_string(k));
    }
    spectrum.records.push_back(rec);
  }

  // Global oracle: the eigenvalue sum must reproduce the trace
  // sum_m (w_m - b_m), both accumulated from the tail.
  CompensatedSum nu_sum;
  for (int k = n; k >= 2; --k) {
    nu_sum += spectrum.records[static_cast<std::size_t>(k) - 1].nu;
  }
  CompensatedSum trace;
  for (Eigen::Index m = ctx.size(); m-- > 0;) {
    trace += ctx.weights()(m) - ctx.poles()(m);
  }
  spectrum.trace_check = nu_sum.value() - trace.value();
  return spectrum;
}

Lemma1Report lemma1_check(const TruncatedModel& model) {
  Lemma1Report report;
  const double alpha = model.spec().alpha;
  const double theta = model.spec().theta;
  const double c = model.spec().gap_constant;
  report.constant =
      model.partition_sum(0.5 * (alpha + 1.0)) / (1.0 + 2.0 / (c * (alpha - 1.0)));
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (int m = 1; m < model.n(); ++m) {
    const double gap = model.b(m) - model.b(m + 1);
    const double bound =
        report.constant * std::exp(-(0.5 * (alpha - 1.0) + theta) * model.lambda(m));
    report.min_ratio = std::min(report.min_ratio, gap / bound);
  }
  report.holds = report.min_ratio >= 1.0;
  return report;
}

double lemma2_supremum(const SecularContext& ctx, const Spectrum& spectrum) {
  double sup = 0.0;
  for (const EigenvalueRecord& rec : spectrum.records) {
    if (rec.k < 2) {
      continue;
    }
    // e^{(alpha+1) lambda_k / 2} is exactly 1 / alt_weight_k.
    sup = std::max(sup, std::abs(rec.offset) / ctx.alt_weights()(rec.k - 1));
  }
  return sup;
}

}  // namespace mespec
