#pragma once

#include "covest/matops.hpp"
#include "covest/structure.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covest {

enum class SolveStatus { Converged, MaxIters, Infeasible };

std::string_view to_string(SolveStatus status);

struct SolveReport {
  SymMatrix t_star;
  double objective = 0.0;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  SolveStatus status = SolveStatus::MaxIters;
  std::vector<std::string> notes;
};

/// Stopping tolerances are relative: a run stops once both residuals are
/// below eps * max(||T_hat||_F, 1).
struct AdmmOptions {
  double rho = 1.0;
  double eps_primal = 1e-8;
  double eps_dual = 1e-8;
  std::size_t max_iters = 50000;
  /// Residual balancing: rho is doubled or halved every 10 iterations when
  /// one residual exceeds the other tenfold.
  bool adaptive_rho = true;
};

enum class DescentDirection { Gradient, Newton };

struct DescentOptions {
  std::size_t max_iters = 50000;
  double gradient_tol = 1e-7;  ///< relative to max(||T_hat||_F, 1)
  double armijo = 1e-4;
  double shrink = 0.5;
  double pd_floor = 1e-10;  ///< iterates keep min_eig > pd_floor * scale
  /// Newton uses the Hessian with eigenvalues replaced by their magnitudes
  /// (floored), which is a descent direction even where f is nonconvex.
  DescentDirection direction = DescentDirection::Gradient;
};

struct TransportSolution {
  SolveReport report;
  Eigen::MatrixXd s_star;
  double distance = 0.0;
};

/// min tr(T + T_hat - S - S') over T in span(L) and S, subject to
/// [[T, S], [S', T_hat]] >= 0. T_hat may be singular.
TransportSolution solve_transport(const SymMatrix& t_hat, const LinearStructure& l,
                                  const AdmmOptions& opts = {});

/// Same ADMM with the T block pinned: the inner coupling problem.
TransportSolution solve_coupling_sdp(const SymMatrix& t, const SymMatrix& t_hat,
                                     const AdmmOptions& opts = {});

/// f(T) = log|T| + tr(T_hat T^{-1}) and its gradient in the coordinates of L,
/// d f / d c_k = tr((T^{-1} - T^{-1} T_hat T^{-1}) Q_k).
double ml_objective(const SymMatrix& t_hat, const SymMatrix& t);
Eigen::VectorXd ml_gradient(const SymMatrix& t_hat, const LinearStructure& l, const SymMatrix& t);

/// Largest |tr((T^{-1} T_hat T^{-1} - T^{-1}) Q_k)| over the basis.
double ml_stationarity_residual(const SymMatrix& t_hat, const LinearStructure& l,
                                const SymMatrix& t);

/// Maximum-likelihood Toeplitz fit. Without an explicit init, runs five
/// starts P(T_hat) + lambda I with lambda in {1e-4, ..., 1} * tr(T_hat)/n
/// (non-PD starts skipped) and keeps the lowest objective. The reported
/// objective is 1/2 (log|T| + tr(T_hat T^{-1}) - n).
SolveReport solve_ml(const SymMatrix& t_hat, const LinearStructure& l,
                     const std::optional<SymMatrix>& init = std::nullopt,
                     const DescentOptions& opts = {});

/// min over admissible T of d_KL(p || p_hat); T_hat must be positive
/// definite (SingularData otherwise). Reports the divergence as objective.
SolveReport solve_kl(const SymMatrix& t_hat, const LinearStructure& l,
                     const DescentOptions& opts = {});

/// min ||T_hat^{-1/2} T T_hat^{-1/2} - I||_F over admissible T.
SolveReport solve_log_linear(const SymMatrix& t_hat, const LinearStructure& l,
                             const AdmmOptions& opts = {});

/// min tr(T_hat - T) subject to T_hat - T >= 0, T admissible.
SolveReport solve_stoica(const SymMatrix& t_hat, const LinearStructure& l,
                         const AdmmOptions& opts = {});

/// min ||T_hat - T||_* over admissible T.
SolveReport solve_nuclear(const SymMatrix& t_hat, const LinearStructure& l,
                          const AdmmOptions& opts = {});

/// Feasible point of min tr(Q + Q_hat) s.t. T_hat + Q_hat = T + Q, Q, Q_hat >= 0
/// built from the eigen-split of T_hat - T (Q_hat its negative part, Q its
/// positive part); its value equals ||T_hat - T||_*.
struct NuclearSplit {
  SymMatrix q;
  SymMatrix q_hat;
  double trace_sum;
  double nuclear;
};

NuclearSplit verify_nuclear_identity(const SymMatrix& t_hat, const SymMatrix& t);

}  // namespace covest
