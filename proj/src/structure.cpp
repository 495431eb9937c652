#include "covest/structure.hpp"

#include "covest/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace covest {

namespace {

double inner(const SymMatrix& a, const SymMatrix& b) {
  return a.dense().cwiseProduct(b.dense()).sum();
}

}  // namespace

LinearStructure LinearStructure::toeplitz(Eigen::Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Toeplitz structure needs n >= 1");
  std::vector<SymMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + k < n; ++i) {
      q(i, i + k) = 1.0;
      q(i + k, i) = 1.0;
    }
    q /= q.norm();
    basis.emplace_back(q);
  }
  return LinearStructure(n, std::move(basis), true);
}

LinearStructure LinearStructure::from_spanning_set(Eigen::Index n,
                                                   const std::vector<SymMatrix>& spanning) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "structure needs n >= 1");
  std::vector<SymMatrix> basis;
  for (const SymMatrix& q : spanning) {
    if (q.size() != n) throw Error(ErrorCode::DimensionMismatch, "spanning element has wrong size");
    const double original = q.frobenius();
    if (original == 0.0) continue;
    Eigen::MatrixXd v = q.dense();
    // Two passes of modified Gram-Schmidt keep orthogonality at roundoff.
    for (int pass = 0; pass < 2; ++pass) {
      for (const SymMatrix& b : basis) {
        v -= v.cwiseProduct(b.dense()).sum() * b.dense();
      }
    }
    const double residual = v.norm();
    if (residual < 1e-10 * original) continue;
    basis.emplace_back(v / residual);
  }
  if (basis.size() > static_cast<std::size_t>(n * (n + 1) / 2)) {
    throw Error(ErrorCode::InvalidArgument, "basis larger than the symmetric matrix space");
  }
  return LinearStructure(n, std::move(basis), false);
}

Eigen::VectorXd LinearStructure::coordinates(const SymMatrix& a) const {
  if (a.size() != n_) throw Error(ErrorCode::DimensionMismatch, "structure coordinates");
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    c(static_cast<Eigen::Index>(k)) = inner(a, basis_[k]);
  }
  return c;
}

SymMatrix LinearStructure::synthesize(const Eigen::VectorXd& coords) const {
  if (coords.size() != static_cast<Eigen::Index>(basis_.size())) {
    throw Error(ErrorCode::DimensionMismatch, "coordinate vector length");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    out += coords(static_cast<Eigen::Index>(k)) * basis_[k].dense();
  }
  return SymMatrix(out);
}

SymMatrix project_structure(const SymMatrix& a, const LinearStructure& l) {
  if (a.size() != l.dimension()) {
    std::ostringstream os;
    os << "matrix is " << a.size() << "x" << a.size() << ", structure is for n=" << l.dimension();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  return l.synthesize(l.coordinates(a));
}

SymMatrix params_to_matrix(const ToeplitzParams& p) {
  const Eigen::Index n = p.r.size();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "empty Toeplitz parameter vector");
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = p.r(std::abs(i - j));
  }
  return SymMatrix(t);
}

ToeplitzParams matrix_to_params(const SymMatrix& t) {
  const Eigen::Index n = t.size();
  const double tol = 1e-10 * std::max(1.0, t.dense().cwiseAbs().maxCoeff());
  ToeplitzParams p{Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double first = t(0, k);
    for (Eigen::Index i = 1; i + k < n; ++i) {
      if (std::abs(t(i, i + k) - first) > tol) {
        std::ostringstream os;
        os << "diagonal " << k << " is not constant (entry (" << i << "," << i + k
           << ") = " << t(i, i + k) << " vs " << first << ")";
        throw Error(ErrorCode::NotToeplitz, os.str());
      }
    }
    p.r(k) = first;
  }
  return p;
}

Admissibility is_admissible(const SymMatrix& t, double tol) {
  const LinearStructure l = LinearStructure::toeplitz(t.size());
  const double defect = (t - project_structure(t, l)).frobenius();
  const double lowest = min_eigenvalue(t);
  const double scale = std::max(t.frobenius(), 1.0);
  return {defect, lowest, defect <= tol * scale && lowest >= -tol * scale};
}

}  // namespace covest
