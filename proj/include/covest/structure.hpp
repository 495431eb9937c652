#pragma once

#include "covest/matops.hpp"

#include <vector>

namespace covest {

/// Linear subspace of symmetric n x n matrices, stored as a basis that is
/// orthonormal under the trace inner product <A, B> = tr(A B).
class LinearStructure {
 public:
  /// Symmetric Toeplitz matrices: Q_0 = I / sqrt(n), Q_k has ones on the
  /// +-k-th diagonals scaled to unit Frobenius norm.
  static LinearStructure toeplitz(Eigen::Index n);

  /// Orthonormalizes an arbitrary spanning set by modified Gram-Schmidt,
  /// dropping elements whose residual norm falls below 1e-10 times their
  /// original norm.
  static LinearStructure from_spanning_set(Eigen::Index n, const std::vector<SymMatrix>& spanning);

  Eigen::Index dimension() const { return n_; }
  std::size_t rank() const { return basis_.size(); }
  const std::vector<SymMatrix>& basis() const { return basis_; }
  bool is_toeplitz() const { return toeplitz_; }

  /// Coordinates c_k = tr(A Q_k).
  Eigen::VectorXd coordinates(const SymMatrix& a) const;
  /// sum_k c_k Q_k
  SymMatrix synthesize(const Eigen::VectorXd& coords) const;

 private:
  LinearStructure(Eigen::Index n, std::vector<SymMatrix> basis, bool toeplitz)
      : n_(n), basis_(std::move(basis)), toeplitz_(toeplitz) {}

  Eigen::Index n_;
  std::vector<SymMatrix> basis_;
  bool toeplitz_;
};

/// Orthogonal projection sum_k tr(A Q_k) Q_k. For the Toeplitz structure
/// this is per-diagonal averaging.
SymMatrix project_structure(const SymMatrix& a, const LinearStructure& l);

/// First row (r_0, ..., r_{n-1}) of a symmetric Toeplitz matrix.
struct ToeplitzParams {
  Eigen::VectorXd r;
};

SymMatrix params_to_matrix(const ToeplitzParams& p);

/// Throws NotToeplitz when some entry deviates from its diagonal's value by
/// more than 1e-10 * max(1, max|a_ij|).
ToeplitzParams matrix_to_params(const SymMatrix& t);

struct Admissibility {
  double toeplitz_defect;  ///< ||T - P(T)||_F
  double min_eig;
  bool admissible;
};

/// Membership test for {T >= 0, T Toeplitz} with tolerances relative to
/// max(||T||_F, 1).
Admissibility is_admissible(const SymMatrix& t, double tol);

}  // namespace covest
