#include "mespec/truncated_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mespec/compensated.hpp"
#include "mespec/errors.hpp"

namespace mespec {

GeneratorParts assemble_generator(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const auto n = u.size();
  GeneratorParts parts;
  parts.rates = u * v.transpose();
  parts.b.resize(n);
  parts.generator = parts.rates;
  // Column sums and diagonals accumulate from the largest row index upward
  // (smallest magnitude first). The diagonal is the negated compensated sum
  // of its own column's off-diagonal entries.
  for (Eigen::Index j = 0; j < n; ++j) {
    CompensatedSum full;
    CompensatedSum off_diagonal;
    for (Eigen::Index i = n; i-- > 0;) {
      full += parts.rates(i, j);
      if (i != j) {
        off_diagonal += parts.rates(i, j);
      }
    }
    parts.b(j) = full.value();
    parts.generator(j, j) = -off_diagonal.value();
  }
  return parts;
}

TruncatedModel::TruncatedModel(LevelSpec spec, int n) : spec_(std::move(spec)), n_(n) {
  // Deliberately weaker than LevelSpec::validate: constant (degenerate)
  // sequences are usable for the model identities, and only the secular
  // solver rejects them once the brackets collapse.
  if (!(spec_.alpha > 1.0)) {
    throw ValidationError("alpha must exceed 1");
  }
  if (n_ < 1) {
    throw ValidationError("truncation dimension must be at least 1");
  }
  if (n_ > spec_.max_levels()) {
    throw ValidationError("truncation dimension " + std::to_string(n_) +
                          " exceeds the number of explicit levels");
  }
  lambdas_.resize(n_);
  for (int m = 1; m <= n_; ++m) {
    lambdas_(m - 1) = spec_.lambda(m);
    if (!std::isfinite(lambdas_(m - 1))) {
      throw ValidationError("level " + std::to_string(m) + " is not finite");
    }
    if (m > 1 && lambdas_(m - 1) < lambdas_(m - 2)) {
      throw ValidationError("levels must be nondecreasing");
    }
  }
  const double a = spec_.alpha;
  u_ = (-0.5 * (a + 1.0) * lambdas_.array()).exp();
  v_ = (-0.5 * (a - 1.0) * lambdas_.array()).exp();
  GeneratorParts parts = assemble_generator(u_, v_);
  rates_ = std::move(parts.rates);
  b_ = std::move(parts.b);
  generator_ = std::move(parts.generator);
}

double TruncatedModel::lambda(int m) const {
  if (m < 1 || m > n_) {
    throw std::out_of_range("level index " + std::to_string(m) + " out of range");
  }
  return lambdas_(m - 1);
}

double TruncatedModel::rate(int m, int k) const {
  if (m < 1 || m > n_ || k < 1 || k > n_) {
    throw std::out_of_range("rate index (" + std::to_string(m) + "," + std::to_string(k) +
                            ") out of range");
  }
  return rates_(m - 1, k - 1);
}

double TruncatedModel::b(int m) const {
  if (m < 1 || m > n_) {
    throw std::out_of_range("column sum index " + std::to_string(m) + " out of range");
  }
  return b_(m - 1);
}

GeneratorView TruncatedModel::view() const {
  return GeneratorView{lambdas_, u_, v_, b_, rates_, generator_};
}

double TruncatedModel::partition_sum(double beta) const {
  if (!(beta > 0.0)) {
    throw std::domain_error("partition sum requires beta > 0");
  }
  CompensatedSum acc;
  for (int i = n_; i-- > 0;) {
    acc += std::exp(-beta * lambdas_(i));
  }
  return acc.value();
}

ProbabilityVector TruncatedModel::gibbs_vector(double beta) const {
  const double z = partition_sum(beta);
  Eigen::VectorXd p = (-beta * lambdas_.array()).exp() / z;
  return ProbabilityVector::raw(std::move(p));
}

double TruncatedModel::smallest_beta() const {
  // Exponents used by the spectral identities: alpha, (alpha+1)/2,
  // (alpha-1)/2 and 1 (stationary Gibbs).
  return std::min(0.5 * (spec_.alpha - 1.0), 1.0);
}

TailBound TruncatedModel::tail() const { return tail_bound(spec_, n_, smallest_beta()); }

double TruncatedModel::trace() const {
  CompensatedSum acc;
  for (int i = n_; i-- > 0;) {
    acc += generator_(i, i);
  }
  return acc.value();
}

double TruncatedModel::trace_identity_residual() const {
  const double a = spec_.alpha;
  const double expected =
      partition_sum(a) - partition_sum(0.5 * (a - 1.0)) * partition_sum(0.5 * (a + 1.0));
  return trace() - expected;
}

double TruncatedModel::detailed_balance_residual() const {
  if (n_ < 2) {
    return 0.0;
  }
  const ProbabilityVector gibbs = gibbs_vector(1.0);
  const Eigen::VectorXd& p = gibbs.components();
  // The fluxes are formed in extended precision so the residual measures the
  // asymmetry of the stored rates and Gibbs weights, not this comparison.
  double worst = 0.0;
  for (int m = 0; m < n_; ++m) {
    for (int k = m + 1; k < n_; ++k) {
      const long double lhs =
          static_cast<long double>(rates_(m, k)) * static_cast<long double>(p(k));
      const long double rhs =
          static_cast<long double>(rates_(k, m)) * static_cast<long double>(p(m));
      worst = std::max(worst, static_cast<double>(std::abs(lhs - rhs) / lhs));
    }
  }
  return worst;
}

double TruncatedModel::column_sum_defect() const {
  double worst = 0.0;
  for (int j = 0; j < n_; ++j) {
    CompensatedSum off_diagonal;
    for (int i = n_; i-- > 0;) {
      if (i != j) {
        off_diagonal += rates_(i, j);
      }
    }
    worst = std::max(worst, std::abs(generator_(j, j) + off_diagonal.value()));
  }
  return worst;
}

double TruncatedModel::rank_one_defect() const {
  double worst = 0.0;
  for (int m = 0; m < n_; ++m) {
    for (int j = 0; j < n_; ++j) {
      const int i = (m + j) % n_;
      const int k = (j + 1) % n_;
      const double lhs = rates_(m, k) * rates_(j, i);
      const double rhs = rates_(m, i) * rates_(j, k);
      worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    }
  }
  return worst;
}

}  // namespace mespec
