#include "covest/error.hpp"
#include "covest/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace covest {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

double scale_of(const SymMatrix& t_hat) { return std::max(t_hat.frobenius(), 1.0); }

void require_structure(const SymMatrix& t_hat, const LinearStructure& l) {
  if (t_hat.size() != l.dimension()) {
    std::ostringstream os;
    os << "T_hat is " << t_hat.size() << "x" << t_hat.size() << ", structure is for n="
       << l.dimension();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

void validate(const AdmmOptions& opts) {
  if (!(opts.rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (!(opts.eps_primal > 0.0) || !(opts.eps_dual > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ADMM tolerances must be positive");
  }
}

// Residual balancing shared by every ADMM loop below. Returns the factor
// applied to rho (the scaled duals must be divided by it).
double rebalance(const AdmmOptions& opts, std::size_t iter, double primal, double dual,
                 double& rho) {
  if (!opts.adaptive_rho || iter % 10 != 9) return 1.0;
  double factor = 1.0;
  if (primal > 10.0 * dual) factor = 2.0;
  else if (dual > 10.0 * primal) factor = 0.5;
  rho *= factor;
  return factor;
}

Eigen::MatrixXd psd_part(const Eigen::MatrixXd& a) { return project_psd(SymMatrix(a)).dense(); }

// ADMM for the transport SDP over Z = [[T, S], [S', T_hat]]: X carries the
// affine constraints (T_hat block pinned, T block through `fix_t`), Y the
// cone constraint, U the scaled dual of X = Y.
TransportSolution transport_admm(const SymMatrix& t_hat,
                                 const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& fix_t,
                                 const AdmmOptions& opts) {
  validate(opts);
  const Eigen::Index n = t_hat.size();
  const Eigen::Index m = 2 * n;
  const double scale = scale_of(t_hat);

  // <C, Z> = tr(T) - tr(S) - tr(S')
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  c.topLeftCorner(n, n).setIdentity();
  c.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  c.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);

  auto project_affine = [&](Eigen::MatrixXd w) {
    w.topLeftCorner(n, n) = fix_t(w.topLeftCorner(n, n));
    w.bottomRightCorner(n, n) = t_hat.dense();
    w.bottomLeftCorner(n, n) = w.topRightCorner(n, n).transpose();
    return w;
  };

  Eigen::MatrixXd y = project_affine(Eigen::MatrixXd::Zero(m, m));
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd x = y;
  double rho = opts.rho;
  double primal = 0.0, dual = 0.0;
  std::size_t iter = 0;
  SolveStatus status = SolveStatus::MaxIters;

  for (; iter < opts.max_iters; ++iter) {
    x = project_affine(y - u - c / rho);
    const Eigen::MatrixXd y_prev = y;
    y = psd_part(x + u);
    u += x - y;
    primal = (x - y).norm();
    dual = rho * (y - y_prev).norm();
    if (primal <= opts.eps_primal * scale && dual <= opts.eps_dual * scale) {
      status = SolveStatus::Converged;
      ++iter;
      break;
    }
    u /= rebalance(opts, iter, primal, dual, rho);
  }

  const SymMatrix t(x.topLeftCorner(n, n));
  Eigen::MatrixXd s = x.topRightCorner(n, n);
  const double objective = t.trace() + t_hat.trace() - 2.0 * s.trace();

  TransportSolution out{
      SolveReport{t, objective, iter, primal, dual, status, {}},
      std::move(s),
      std::sqrt(std::max(objective, 0.0)),
  };
  return out;
}

}  // namespace

TransportSolution solve_transport(const SymMatrix& t_hat, const LinearStructure& l,
                                  const AdmmOptions& opts) {
  require_structure(t_hat, l);
  return transport_admm(
      t_hat,
      [&l](const Eigen::MatrixXd& block) {
        return project_structure(SymMatrix(block), l).dense();
      },
      opts);
}

TransportSolution solve_coupling_sdp(const SymMatrix& t, const SymMatrix& t_hat,
                                     const AdmmOptions& opts) {
  if (t.size() != t_hat.size()) throw Error(ErrorCode::DimensionMismatch, "coupling marginals");
  return transport_admm(
      t_hat, [&t](const Eigen::MatrixXd&) { return t.dense(); }, opts);
}

SolveReport solve_stoica(const SymMatrix& t_hat, const LinearStructure& l,
                         const AdmmOptions& opts) {
  require_structure(t_hat, l);
  validate(opts);
  const Eigen::Index n = t_hat.size();
  const double scale = scale_of(t_hat);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd th = t_hat.dense();

  // Constraints T = Y1 >= 0 and T_hat - T = Y2 >= 0; objective -tr(T).
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd y1 = t, y2 = th, u1 = t, u2 = t;
  double rho = opts.rho;
  double primal = 0.0, dual = 0.0;
  std::size_t iter = 0;
  SolveStatus status = SolveStatus::MaxIters;

  for (; iter < opts.max_iters; ++iter) {
    t = project_structure(SymMatrix(0.5 * (y1 - u1 + th - y2 + u2 + eye / rho)), l).dense();
    const Eigen::MatrixXd y1_prev = y1, y2_prev = y2;
    y1 = psd_part(t + u1);
    y2 = psd_part(th - t + u2);
    const Eigen::MatrixXd r1 = t - y1;
    const Eigen::MatrixXd r2 = th - t - y2;
    u1 += r1;
    u2 += r2;
    primal = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
    dual = rho * std::sqrt((y1 - y1_prev).squaredNorm() + (y2 - y2_prev).squaredNorm());
    if (primal <= opts.eps_primal * scale && dual <= opts.eps_dual * scale) {
      status = SolveStatus::Converged;
      ++iter;
      break;
    }
    const double f = rebalance(opts, iter, primal, dual, rho);
    u1 /= f;
    u2 /= f;
  }

  const SymMatrix ts(t);
  return SolveReport{ts, t_hat.trace() - ts.trace(), iter, primal, dual, status, {}};
}

SolveReport solve_nuclear(const SymMatrix& t_hat, const LinearStructure& l,
                          const AdmmOptions& opts) {
  require_structure(t_hat, l);
  validate(opts);
  const Eigen::Index n = t_hat.size();
  const double scale = scale_of(t_hat);
  const Eigen::MatrixXd th = t_hat.dense();

  // Splitting D = T_hat - T (nuclear prox) and Y = T (PSD cone).
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd d = th, y = t, u1 = t, u2 = t;
  double rho = opts.rho;
  double primal = 0.0, dual = 0.0;
  std::size_t iter = 0;
  SolveStatus status = SolveStatus::MaxIters;

  for (; iter < opts.max_iters; ++iter) {
    t = project_structure(SymMatrix(0.5 * (th - d + u1 + y - u2)), l).dense();
    const Eigen::MatrixXd d_prev = d, y_prev = y;
    d = shrink_eigenvalues(SymMatrix(th - t + u1), 1.0 / rho).dense();
    y = psd_part(t + u2);
    const Eigen::MatrixXd r1 = th - t - d;
    const Eigen::MatrixXd r2 = t - y;
    u1 += r1;
    u2 += r2;
    primal = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
    dual = rho * std::sqrt((d - d_prev).squaredNorm() + (y - y_prev).squaredNorm());
    if (primal <= opts.eps_primal * scale && dual <= opts.eps_dual * scale) {
      status = SolveStatus::Converged;
      ++iter;
      break;
    }
    const double f = rebalance(opts, iter, primal, dual, rho);
    u1 /= f;
    u2 /= f;
  }

  const SymMatrix ts(t);
  return SolveReport{ts, norms(t_hat - ts).nuclear, iter, primal, dual, status, {}};
}

SolveReport solve_log_linear(const SymMatrix& t_hat, const LinearStructure& l,
                             const AdmmOptions& opts) {
  require_structure(t_hat, l);
  validate(opts);
  const Eigen::Index n = t_hat.size();
  const double scale = scale_of(t_hat);

  const EigDecomp eh = sym_eig(t_hat);
  if (!(eh.values(n - 1) > 1e-12 * t_hat.frobenius())) {
    throw Error(ErrorCode::SingularData, "log-linear fit needs a positive definite T_hat");
  }
  const Eigen::MatrixXd h_inv = eh.apply([](double v) { return 1.0 / v; }).dense();
  const Eigen::MatrixXd w = eh.apply([](double v) { return 1.0 / std::sqrt(v); }).dense();

  // Normal equations of 1/2 ||W T(c) W - I||_F^2 + rho/2 ||T(c) - Y + U||_F^2:
  // (G + rho I) c = tr(Q_k T_hat^{-1}) + rho tr(Q_k (Y - U)).
  const std::vector<SymMatrix>& basis = l.basis();
  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::MatrixXd> hq;
  hq.reserve(basis.size());
  for (const SymMatrix& q : basis) hq.push_back(h_inv * q.dense());
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd lin(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    lin(a) = hq[static_cast<std::size_t>(a)].trace();
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double g = (hq[static_cast<std::size_t>(a)] * hq[static_cast<std::size_t>(b)]).trace();
      gram(a, b) = gram(b, a) = g;
    }
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd y = t, u = t;
  double rho = opts.rho;
  double factored_rho = -1.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double primal = 0.0, dual = 0.0;
  std::size_t iter = 0;
  SolveStatus status = SolveStatus::MaxIters;

  for (; iter < opts.max_iters; ++iter) {
    if (rho != factored_rho) {
      llt.compute(gram + rho * Eigen::MatrixXd::Identity(k, k));
      factored_rho = rho;
    }
    const Eigen::VectorXd rhs = lin + rho * l.coordinates(SymMatrix(y - u));
    t = l.synthesize(llt.solve(rhs)).dense();
    const Eigen::MatrixXd y_prev = y;
    y = psd_part(t + u);
    u += t - y;
    primal = (t - y).norm();
    dual = rho * (y - y_prev).norm();
    if (primal <= opts.eps_primal * scale && dual <= opts.eps_dual * scale) {
      status = SolveStatus::Converged;
      ++iter;
      break;
    }
    u /= rebalance(opts, iter, primal, dual, rho);
  }

  const SymMatrix ts(t);
  const double objective =
      (w * t * w - Eigen::MatrixXd::Identity(n, n)).norm();
  return SolveReport{ts, objective, iter, primal, dual, status, {}};
}

NuclearSplit verify_nuclear_identity(const SymMatrix& t_hat, const SymMatrix& t) {
  if (t.size() != t_hat.size()) throw Error(ErrorCode::DimensionMismatch, "nuclear identity");
  const EigDecomp e = sym_eig(t_hat - t);
  SymMatrix q = e.apply([](double v) { return std::max(v, 0.0); });
  SymMatrix q_hat = e.apply([](double v) { return std::max(-v, 0.0); });
  const double trace_sum = q.trace() + q_hat.trace();
  return {std::move(q), std::move(q_hat), trace_sum, e.values.cwiseAbs().sum()};
}

}  // namespace covest
