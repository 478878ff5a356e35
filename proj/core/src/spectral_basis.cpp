#include "mespec/spectral_basis.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mespec/compensated.hpp"
#include "mespec/errors.hpp"

namespace mespec {

namespace {

constexpr double kResidualError = 1e-6;

// Denominators nu_k + b_m formed through the pole offset: (b_m - b_k) + delta
// keeps relative precision even when nu_k rounds to -b_k.
Eigen::VectorXd denominators(const GeneratorView& view, const EigenvalueRecord& rec) {
  const Eigen::Index n = view.b.size();
  Eigen::VectorXd den(n);
  const double bk = view.b(rec.k - 1);
  for (Eigen::Index m = 0; m < n; ++m) {
    den(m) = (view.b(m) - bk) + rec.offset;
  }
  den(rec.k - 1) = rec.offset;
  return den;
}

double relative_residual(const Eigen::MatrixXd& op, const Eigen::VectorXd& x, double nu) {
  return (op * x - nu * x).norm() / x.norm();
}

double kahan_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  CompensatedSum acc;
  for (Eigen::Index m = a.size(); m-- > 0;) {
    acc += a(m) * b(m);
  }
  return acc.value();
}

}  // namespace

RightEigenvector right_eigenvector(const GeneratorView& view, const Spectrum& spectrum, int k) {
  const int n = static_cast<int>(view.b.size());
  if (k < 1 || k > n) {
    throw std::out_of_range("eigenvector index " + std::to_string(k) + " out of range");
  }
  RightEigenvector result;
  result.k = k;
  if (k == 1) {
    // Stationary direction: the Gibbs vector at beta = 1.
    Eigen::VectorXd g = (-view.lambdas.array()).exp();
    double z;
    {
      CompensatedSum acc;
      for (Eigen::Index m = g.size(); m-- > 0;) {
        acc += g(m);
      }
      z = acc.value();
    }
    result.components = g / z;
  } else {
    result.components = view.u.cwiseQuotient(denominators(view, spectrum.record(k)));
  }
  result.eigen_residual = relative_residual(view.generator, result.components, spectrum.nu(k));
  if (result.eigen_residual > kResidualError) {
    throw ConsistencyError("right eigenvector residual " + std::to_string(result.eigen_residual) +
                           " at k = " + std::to_string(k) + " signals a bad eigenvalue");
  }
  return result;
}

LeftEigenvector left_eigenvector(const GeneratorView& view, const Spectrum& spectrum, int k) {
  const int n = static_cast<int>(view.b.size());
  if (k < 1 || k > n) {
    throw std::out_of_range("eigenvector index " + std::to_string(k) + " out of range");
  }
  LeftEigenvector result;
  result.k = k;
  if (k == 1) {
    // Columns of the generator sum to zero, so all-ones is a left null
    // vector; in finite dimension it is the biorthogonal partner of Gibbs.
    result.components = Eigen::VectorXd::Ones(n);
    result.d = 1.0;
  } else {
    const EigenvalueRecord& rec = spectrum.record(k);
    result.d = -rec.fprime;
    result.components = view.v.cwiseQuotient(denominators(view, rec)) / result.d;
  }
  result.eigen_residual =
      relative_residual(view.generator.transpose(), result.components, spectrum.nu(k));
  if (result.eigen_residual > kResidualError) {
    throw ConsistencyError("left eigenvector residual " + std::to_string(result.eigen_residual) +
                           " at k = " + std::to_string(k) + " signals a bad eigenvalue");
  }
  return result;
}

BiorthogonalSystem BiorthogonalSystem::build(const GeneratorView& view, const Spectrum& spectrum) {
  BiorthogonalSystem system;
  const int n = spectrum.size();
  system.rights_.reserve(static_cast<std::size_t>(n));
  system.lefts_.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    system.rights_.push_back(right_eigenvector(view, spectrum, k));
    system.lefts_.push_back(left_eigenvector(view, spectrum, k));
  }
  return system;
}

const RightEigenvector& BiorthogonalSystem::right(int k) const {
  if (k < 1 || k > size()) {
    throw std::out_of_range("eigenvector index " + std::to_string(k) + " out of range");
  }
  return rights_[static_cast<std::size_t>(k) - 1];
}

const LeftEigenvector& BiorthogonalSystem::left(int k) const {
  if (k < 1 || k > size()) {
    throw std::out_of_range("eigenvector index " + std::to_string(k) + " out of range");
  }
  return lefts_[static_cast<std::size_t>(k) - 1];
}

Eigen::VectorXd BiorthogonalSystem::coefficients(const Eigen::VectorXd& p) const {
  Eigen::VectorXd c(size());
  for (int k = 1; k <= size(); ++k) {
    c(k - 1) = kahan_inner(p, left(k).components);
  }
  return c;
}

Eigen::VectorXd BiorthogonalSystem::reconstruct(const Eigen::VectorXd& coefficients) const {
  const Eigen::Index n = rights_.front().components.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    CompensatedSum acc;
    for (int k = size(); k >= 1; --k) {
      acc += coefficients(k - 1) * right(k).components(m);
    }
    out(m) = acc.value();
  }
  return out;
}

double BiorthogonalSystem::max_right_residual() const {
  double worst = 0.0;
  for (const auto& r : rights_) {
    worst = std::max(worst, r.eigen_residual);
  }
  return worst;
}

double BiorthogonalSystem::max_left_residual() const {
  double worst = 0.0;
  for (const auto& l : lefts_) {
    worst = std::max(worst, l.eigen_residual);
  }
  return worst;
}

double biorthogonality_defect(const BiorthogonalSystem& system, int upto_k) {
  const int kk = std::min(upto_k, system.size());
  double worst = 0.0;
  for (int j = 1; j <= kk; ++j) {
    for (int k = 1; k <= kk; ++k) {
      const double ip = kahan_inner(system.right(j).components, system.left(k).components);
      worst = std::max(worst, std::abs(ip - (j == k ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double closed_form_pairing_defect(const BiorthogonalSystem& system) {
  double worst = 0.0;
  for (int k = 2; k <= system.size(); ++k) {
    const double d = system.left(k).d;
    const double pairing =
        kahan_inner(system.right(k).components, system.left(k).components) * d;
    worst = std::max(worst, std::abs(pairing - d) / std::abs(d));
  }
  return worst;
}

double sum_zero_defect(const BiorthogonalSystem& system) {
  double worst = 0.0;
  for (int k = 2; k <= system.size(); ++k) {
    const Eigen::VectorXd& p = system.right(k).components;
    CompensatedSum acc;
    for (Eigen::Index m = p.size(); m-- > 0;) {
      acc += p(m);
    }
    worst = std::max(worst, std::abs(acc.value()) / p.lpNorm<1>());
  }
  return worst;
}

double projection_crosscheck(const BiorthogonalSystem& system, int j) {
  const int n = system.size();
  if (j < 1 || j > n) {
    throw std::out_of_range("projection index " + std::to_string(j) + " out of range");
  }
  const Eigen::VectorXd& pj = system.right(j).components;
  Eigen::VectorXd projected;
  if (n == 1) {
    projected = pj;  // empty span, Q is the identity
  } else {
    Eigen::MatrixXd others(pj.size(), n - 1);
    int col = 0;
    for (int k = 1; k <= n; ++k) {
      if (k != j) {
        others.col(col++) = system.right(k).components;
      }
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(others);
    Eigen::MatrixXd q1 = Eigen::MatrixXd::Identity(pj.size(), n - 1);
    q1 = qr.householderQ() * q1;
    projected = pj - q1 * (q1.transpose() * pj);
  }
  const double norm2 = projected.squaredNorm();
  if (std::sqrt(norm2) < 1e-12 * pj.norm()) {
    throw SolverError("projection of eigenvector " + std::to_string(j) +
                      " is nearly degenerate");
  }
  const Eigen::VectorXd t = projected / norm2;
  const Eigen::VectorXd& qj = system.left(j).components;
  return (t - qj).norm() / qj.norm();
}

double factorization_residual(const GeneratorView& view) {
  const Eigen::Index n = view.b.size();
  // H = diag(-b), s_mn = -r_mn / b_m.
  const Eigen::MatrixXd s = -(view.b.cwiseInverse().asDiagonal() * view.rates);
  const Eigen::MatrixXd his =
      (-view.b).asDiagonal() * (Eigen::MatrixXd::Identity(n, n) + s);
  return (view.generator - his).cwiseAbs().maxCoeff();
}

GramReport gram_diagnostic(const GeneratorView& view, const BiorthogonalSystem& system,
                           int n_star) {
  const int n = system.size();
  if (n_star < 2 || n_star > n) {
    throw std::out_of_range("gram diagnostic requires 2 <= n_star <= N");
  }
  GramReport report;
  report.n_star = n_star;

  // Shifted family r_k = p_k - gibbs/||gibbs||, each normalized.
  const Eigen::VectorXd ghat = system.gibbs() / system.gibbs().norm();
  Eigen::MatrixXd r(view.b.size(), n);
  r.col(0) = ghat;
  for (int k = 2; k <= n; ++k) {
    Eigen::VectorXd shifted = system.right(k).components - ghat;
    r.col(k - 1) = shifted / shifted.norm();
  }

  // G(n) over the trailing block, accumulated from the smallest entries.
  report.values.assign(static_cast<std::size_t>(n) - 1, 0.0);
  for (int start = 2; start <= n; ++start) {
    CompensatedSum acc;
    for (int j = n; j >= start; --j) {
      for (int k = n; k >= start; --k) {
        if (j == k) {
          continue;
        }
        const double ip = r.col(j - 1).dot(r.col(k - 1));
        acc += ip * ip;
      }
    }
    report.values[static_cast<std::size_t>(start) - 2] = acc.value();
  }
  report.g_value = report.values[static_cast<std::size_t>(n_star) - 2];
  report.smallest_n_star = 0;
  for (int start = 2; start <= n; ++start) {
    if (report.values[static_cast<std::size_t>(start) - 2] < 1.0) {
      report.smallest_n_star = start;
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < report.values.size(); ++i) {
    if (report.values[i + 1] > report.values[i] + 1e-15) {
      report.nonincreasing = false;
      break;
    }
  }
  return report;
}

}  // namespace mespec
