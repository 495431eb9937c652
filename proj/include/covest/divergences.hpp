#pragma once

#include "covest/matops.hpp"

#include <string_view>

namespace covest {

enum class MetricKind {
  Likelihood,
  Kl,
  LogDeviation,
  Hellinger,
  Wasserstein2,
  RaoQuadratic,
  FisherQuadratic,
};

std::string_view to_string(MetricKind kind);

/// A finite, nonnegative dissimilarity value tagged with the measure that
/// produced it.
struct MetricValue {
  double value;
  MetricKind kind;
};

/// Which Gaussian is the reference in the KL integral. With model covariance
/// T (density p) and data covariance T_hat (density p_hat):
///   ModelFirst -> d_KL(p || p_hat), requires T_hat invertible;
///   DataFirst  -> d_KL(p_hat || p), requires T invertible.
enum class KlDirection { ModelFirst, DataFirst };

/// 1/2 (log|T| - log|T_hat| + tr(T_hat T^{-1}) - n).
/// Throws SingularModel for singular T and SingularData for singular T_hat,
/// for which the divergence is -log|T_hat| = +inf; use likelihood_objective.
MetricValue likelihood_divergence(const SymMatrix& t, const SymMatrix& t_hat);

/// The likelihood divergence without its -log|T_hat| constant:
/// 1/2 (log|T| + tr(T_hat T^{-1}) - n). Defined for any PSD T_hat and
/// possibly negative.
double likelihood_objective(const SymMatrix& t, const SymMatrix& t_hat);

MetricValue kl_gaussian(const SymMatrix& t, const SymMatrix& t_hat, KlDirection direction);

/// ||T^{-1/2} Delta T^{-1/2}||_F^2
MetricValue rao_quadratic(const SymMatrix& t, const SymMatrix& delta);

/// Fisher information of the density perturbation p_eps - p where p_eps has
/// covariance T + eps * Delta: det(I - eps^2 Delta_T^2)^{-1/2} - 1 with
/// Delta_T = T^{-1/2} Delta T^{-1/2}. Requires ||eps Delta_T||_F < 1.
MetricValue fisher_quadratic_gaussian(const SymMatrix& t, const SymMatrix& delta, double eps);

/// ||log(T_hat^{-1/2} T T_hat^{-1/2})||_F
MetricValue log_deviation(const SymMatrix& t, const SymMatrix& t_hat);

/// (tr(T + T_hat - 2 (T_hat^{1/2} T T_hat^{1/2})^{1/2}))^{1/2}; accepts
/// singular arguments.
MetricValue bures_hellinger(const SymMatrix& t, const SymMatrix& t_hat);

struct ProcrustesSolution {
  double distance;
  Eigen::MatrixXd u;  ///< orthogonal minimizer of ||T^{1/2} U - T_hat^{1/2}||_F
};

ProcrustesSolution hellinger_procrustes(const SymMatrix& t, const SymMatrix& t_hat);

/// Optimal cross-correlation S = E(XY') between zero-mean Gaussians with
/// covariances T and T_hat, and the squared transport distance it achieves.
struct CouplingSolution {
  Eigen::MatrixXd s;
  double cost;
};

/// Closed-form minimizer of tr(T + T_hat - S - S') subject to
/// [[T, S], [S', T_hat]] >= 0. T_hat must be invertible (SingularModel
/// otherwise); the transport SDP handles singular T_hat.
CouplingSolution optimal_coupling(const SymMatrix& t, const SymMatrix& t_hat);

/// Wasserstein-2 distance between N(0, T) and N(0, T_hat), evaluated through
/// the optimal coupling (so T_hat must be invertible).
MetricValue wasserstein2(const SymMatrix& t, const SymMatrix& t_hat);

}  // namespace covest
