#pragma once

#include <Eigen/Core>
#include <vector>

#include "mespec/secular.hpp"
#include "mespec/truncated_model.hpp"

namespace mespec {

struct RightEigenvector {
  int k = 1;
  Eigen::VectorXd components;
  double eigen_residual = 0.0;  // ||A p - nu p||_2 / ||p||_2, measured at construction
};

struct LeftEigenvector {
  int k = 1;
  Eigen::VectorXd components;   // normalized so that (p_k, q_k) = 1
  double d = 1.0;               // raw pairing (p_k, q_k-unscaled) = -f'(nu_k)
  double eigen_residual = 0.0;  // ||A^T q - nu q||_2 / ||q||_2
};

// Closed-form right eigenvector: Gibbs for k = 1, u_m/(nu_k + b_m) for k >= 2
// with the denominator formed through the stored pole offset. Throws
// ConsistencyError if the measured residual exceeds 1e-6.
RightEigenvector right_eigenvector(const GeneratorView& view, const Spectrum& spectrum, int k);

// Left eigenvector: all-ones for k = 1 (the unique biorthogonal partner of
// Gibbs in finite dimension), v_m/((nu_k + b_m) d_k) for k >= 2.
LeftEigenvector left_eigenvector(const GeneratorView& view, const Spectrum& spectrum, int k);

// The full biorthogonal family. Rights keep the literal closed form; all
// scaling sits in the lefts.
class BiorthogonalSystem {
 public:
  static BiorthogonalSystem build(const GeneratorView& view, const Spectrum& spectrum);

  int size() const { return static_cast<int>(rights_.size()); }
  const RightEigenvector& right(int k) const;  // 1-based
  const LeftEigenvector& left(int k) const;
  const Eigen::VectorXd& gibbs() const { return rights_.front().components; }

  // Expansion coefficients c_k = (p, q~_k) and the matching reconstruction.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& p) const;
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& coefficients) const;

  double max_right_residual() const;
  double max_left_residual() const;

 private:
  std::vector<RightEigenvector> rights_;
  std::vector<LeftEigenvector> lefts_;
};

// max_{j,k <= upto_k} |(p_j, q~_k) - delta_jk|.
double biorthogonality_defect(const BiorthogonalSystem& system, int upto_k);

// max over k >= 2 of |(p_k, q_k-unscaled) - (-f'(nu_k))| / |f'(nu_k)|.
double closed_form_pairing_defect(const BiorthogonalSystem& system);

// max over k >= 2 of |sum_m p_{k,m}| / ||p_k||_1 (the sum-zero identity).
double sum_zero_defect(const BiorthogonalSystem& system);

// Geometric construction of the biorthogonal partner by orthogonal
// projection onto the complement of span{p_k : k != j}; returns the relative
// distance to q~_j.
double projection_crosscheck(const BiorthogonalSystem& system, int j);

// max-entry |A - H(I + S)| with H = diag(-b), S = -rates_mn / b_m.
double factorization_residual(const GeneratorView& view);

struct GramReport {
  int n_star = 0;               // requested start index
  double g_value = 0.0;         // G(n_star)
  int smallest_n_star = 0;      // least n with G(n) < 1, 0 if none
  bool nonincreasing = true;    // G(n) nonincreasing in n
  std::vector<double> values;   // G(n) for n = 2..N
};

// Off-diagonal squared Gram sum of the normalized shifted eigenvectors
// r_k = p_k - gibbs/||gibbs||_2 (k >= 2), evaluated directly.
GramReport gram_diagnostic(const GeneratorView& view, const BiorthogonalSystem& system,
                           int n_star);

}  // namespace mespec
