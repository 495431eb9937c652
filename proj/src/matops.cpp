#include "covest/matops.hpp"

#include "covest/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace covest {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularModel: return "SingularModel";
    case ErrorCode::SingularData: return "SingularData";
    case ErrorCode::PerturbationTooLarge: return "PerturbationTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotToeplitz: return "NotToeplitz";
    case ErrorCode::InitInfeasible: return "InitInfeasible";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
  }
  if (a.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be at least 1x1");
  }
  a_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::zero(Eigen::Index n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SymMatrix SymMatrix::congruence(const Eigen::MatrixXd& m) const {
  if (m.cols() != size()) {
    throw Error(ErrorCode::DimensionMismatch, "congruence factor has wrong column count");
  }
  return SymMatrix(m * a_ * m.transpose());
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "matrix sum");
  return SymMatrix(a.a_ + b.a_, SymMatrix::Trusted{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "matrix difference");
  return SymMatrix(a.a_ - b.a_, SymMatrix::Trusted{});
}

SymMatrix operator*(double s, const SymMatrix& a) {
  return SymMatrix(s * a.a_, SymMatrix::Trusted{});
}

SymMatrix EigDecomp::apply(const std::function<double(double)>& f) const {
  Eigen::VectorXd fv(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) fv(i) = f(values(i));
  return SymMatrix(vectors * fv.asDiagonal() * vectors.transpose());
}

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffTol = 1e-12;

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigDecomp sym_eig(const SymMatrix& sym) {
  Eigen::MatrixXd a = sym.dense();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = kOffTol * a.norm();

  double off = off_diagonal_norm(a);
  int sweep = 0;
  for (; sweep < kMaxSweeps && off > target; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Below machine resolution of the diagonal: annihilate without rotating.
        if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double nkp = akp - s * (akq + tau * akp);
          const double nkq = akq + s * (akp - tau * akq);
          a(k, p) = a(p, k) = nkp;
          a(k, q) = a(q, k) = nkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
    off = off_diagonal_norm(a);
  }
  if (off > target) {
    std::ostringstream os;
    os << "Jacobi eigensolver did not converge after " << kMaxSweeps
       << " sweeps (off-diagonal residual " << off << ")";
    throw Error(ErrorCode::NonConvergence, os.str());
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  EigDecomp out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

SymMatrix sqrtm_psd(const SymMatrix& a, double clip_floor) {
  if (!(clip_floor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "clip_floor must be >= 0");
  const double tol_neg = 1e-10 * a.frobenius();
  const EigDecomp e = sym_eig(a);
  const double lowest = e.values(e.values.size() - 1);
  if (lowest < -tol_neg) {
    std::ostringstream os;
    os << "eigenvalue " << lowest << " below tolerance " << -tol_neg;
    throw Error(ErrorCode::NegativeEigenvalue, os.str());
  }
  return e.apply([clip_floor](double l) { return std::sqrt(std::max(l, clip_floor)); });
}

namespace {

EigDecomp checked_spd_eig(const SymMatrix& a, double rel_tol, const char* what) {
  EigDecomp e = sym_eig(a);
  const double tol = rel_tol * a.frobenius();
  const double lowest = e.values(e.values.size() - 1);
  if (!(lowest > tol)) {
    std::ostringstream os;
    os << what << ": smallest eigenvalue " << lowest << " not above " << tol;
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  return e;
}

}  // namespace

SymMatrix inv_sqrtm_spd(const SymMatrix& a) {
  return checked_spd_eig(a, 1e-12, "inverse square root")
      .apply([](double l) { return 1.0 / std::sqrt(l); });
}

SymMatrix inverse_spd(const SymMatrix& a) {
  return checked_spd_eig(a, 1e-12, "inverse").apply([](double l) { return 1.0 / l; });
}

double logdet_spd(const SymMatrix& a) {
  const EigDecomp e = checked_spd_eig(a, 1e-12, "log-determinant");
  return e.values.array().log().sum();
}

SymMatrix logm_spd(const SymMatrix& a) {
  return checked_spd_eig(a, 1e-12, "matrix logarithm").apply([](double l) { return std::log(l); });
}

SymMatrix project_psd(const SymMatrix& a) {
  return sym_eig(a).apply([](double l) { return std::max(l, 0.0); });
}

SymMatrix shrink_eigenvalues(const SymMatrix& a, double tau) {
  return sym_eig(a).apply([tau](double l) {
    if (l > tau) return l - tau;
    if (l < -tau) return l + tau;
    return 0.0;
  });
}

double min_eigenvalue(const SymMatrix& a) {
  const EigDecomp e = sym_eig(a);
  return e.values(e.values.size() - 1);
}

Norms norms(const SymMatrix& a) {
  const EigDecomp e = sym_eig(a);
  return {a.frobenius(), a.trace(), e.values.cwiseAbs().sum()};
}

}  // namespace covest
