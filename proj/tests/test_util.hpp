#pragma once

#include "covest/matops.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace covest::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal();
    }
    return g;
  }

  SymMatrix symmetric(Eigen::Index n) {
    const Eigen::MatrixXd g = gaussian(n, n);
    return SymMatrix((g + g.transpose()) / 2.0);
  }

  /// G G' / n + shift I, well conditioned for shift ~ 0.1 or more.
  SymMatrix spd(Eigen::Index n, double shift = 0.1) {
    const Eigen::MatrixXd g = gaussian(n, n);
    return SymMatrix(g * g.transpose() / static_cast<double>(n) +
                     shift * Eigen::MatrixXd::Identity(n, n));
  }

  /// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
  Eigen::MatrixXd orthogonal(Eigen::Index n) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, n));
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
  }

  /// Symmetric Toeplitz SPD from a random spectral density (sum of cosines
  /// with positive weights plus a floor).
  SymMatrix toeplitz_spd(Eigen::Index n) {
    Eigen::MatrixXd t = 0.2 * Eigen::MatrixXd::Identity(n, n);
    for (int c = 0; c < 3; ++c) {
      const double w = uniform(0.0, 3.14159);
      const double a = uniform(0.2, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) t(i, j) += a * std::cos(w * static_cast<double>(i - j));
      }
    }
    return SymMatrix(t);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Oracle matrix function through Eigen's own solver, independent of sym_eig.
template <class F>
Eigen::MatrixXd eigen_apply(const Eigen::MatrixXd& a, F f) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(d(i));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

inline Eigen::MatrixXd oracle_sqrt(const Eigen::MatrixXd& a) {
  return eigen_apply(a, [](double v) { return std::sqrt(std::max(v, 0.0)); });
}

/// tr(T + T_hat - 2 (T_hat^{1/2} T T_hat^{1/2})^{1/2})
inline double oracle_bures_sq(const Eigen::MatrixXd& t, const Eigen::MatrixXd& t_hat) {
  const Eigen::MatrixXd r = oracle_sqrt(t_hat);
  return t.trace() + t_hat.trace() - 2.0 * oracle_sqrt(r * t * r).trace();
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace covest::testing
