#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace covest {

/// Dense real symmetric matrix. Construction symmetrizes the input as
/// (A + A') / 2, so entries(i, j) == entries(j, i) holds bit-for-bit.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& a);

  static SymMatrix identity(Eigen::Index n);
  static SymMatrix zero(Eigen::Index n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  Eigen::Index size() const { return a_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
  const Eigen::MatrixXd& dense() const { return a_; }

  double trace() const { return a_.trace(); }
  double frobenius() const { return a_.norm(); }

  /// M * A * M'
  SymMatrix congruence(const Eigen::MatrixXd& m) const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd a, Trusted) : a_(std::move(a)) {}

  Eigen::MatrixXd a_;
};

/// Eigenvalues sorted descending; eigenvectors stored as columns.
struct EigDecomp {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  /// V diag(f(lambda)) V'
  SymMatrix apply(const std::function<double(double)>& f) const;
};

/// Cyclic Jacobi eigensolver. Sweeps stop once the off-diagonal Frobenius
/// mass drops below 1e-12 * ||A||_F; more than 100 sweeps is a hard fault.
EigDecomp sym_eig(const SymMatrix& a);

/// Principal square root of a PSD matrix. Eigenvalues in (-tol_neg, 0) with
/// tol_neg = 1e-10 * ||A||_F are treated as roundoff and replaced by
/// clip_floor; anything more negative throws NegativeEigenvalue.
SymMatrix sqrtm_psd(const SymMatrix& a, double clip_floor = 0.0);

/// A^{-1/2} for symmetric positive definite A.
SymMatrix inv_sqrtm_spd(const SymMatrix& a);

/// A^{-1} for symmetric positive definite A.
SymMatrix inverse_spd(const SymMatrix& a);

/// log|A| for symmetric positive definite A.
double logdet_spd(const SymMatrix& a);

/// Matrix logarithm; throws NotPositiveDefinite when some eigenvalue is at
/// or below 1e-12 * ||A||_F.
SymMatrix logm_spd(const SymMatrix& a);

/// Frobenius-nearest PSD matrix (negative eigenvalues zeroed).
SymMatrix project_psd(const SymMatrix& a);

/// Eigenvalue soft-thresholding: the proximal map of tau * ||.||_* on
/// symmetric matrices.
SymMatrix shrink_eigenvalues(const SymMatrix& a, double tau);

double min_eigenvalue(const SymMatrix& a);

struct Norms {
  double frobenius;
  double trace;
  double nuclear;
};

Norms norms(const SymMatrix& a);

}  // namespace covest
