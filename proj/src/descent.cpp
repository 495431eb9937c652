#include "covest/error.hpp"
#include "covest/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace covest {

namespace {

// Objective value, gradient in structure coordinates, and Hessian for one
// smooth problem over the interior of the PD cone.
struct Evaluation {
  double value;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// A point is usable only if T - floor * I admits a Cholesky factor.
std::optional<Eigen::LLT<Eigen::MatrixXd>> interior_factor(const Eigen::MatrixXd& t, double floor) {
  const Eigen::Index n = t.rows();
  Eigen::LLT<Eigen::MatrixXd> shifted(t - floor * Eigen::MatrixXd::Identity(n, n));
  if (shifted.info() != Eigen::Success) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXd> llt(t);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return llt;
}

double logdet(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

enum class Problem { MaximumLikelihood, KullbackLeibler };

// f_ml(T) = log|T| + tr(T_hat T^{-1})
// f_kl(T) = -log|T| + tr(T T_hat^{-1})
struct SmoothObjective {
  Problem problem;
  const LinearStructure& structure;
  Eigen::MatrixXd t_hat;
  Eigen::MatrixXd t_hat_inv;  // only for KL

  double value(const Eigen::MatrixXd& t, const Eigen::LLT<Eigen::MatrixXd>& llt) const {
    if (problem == Problem::MaximumLikelihood) {
      return logdet(llt) + llt.solve(t_hat).trace();
    }
    return -logdet(llt) + inner(t, t_hat_inv);
  }

  Evaluation evaluate(const Eigen::MatrixXd& t, const Eigen::LLT<Eigen::MatrixXd>& llt,
                      bool with_hessian) const {
    const Eigen::Index n = t.rows();
    const Eigen::MatrixXd t_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd g_mat;
    Eigen::MatrixXd b;
    if (problem == Problem::MaximumLikelihood) {
      b = t_inv * t_hat * t_inv;
      g_mat = t_inv - b;
    } else {
      g_mat = t_hat_inv - t_inv;
    }
    const auto& basis = structure.basis();
    const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
    Evaluation e{value(t, llt), Eigen::VectorXd(k), Eigen::MatrixXd()};
    for (Eigen::Index a = 0; a < k; ++a) {
      e.gradient(a) = inner(g_mat, basis[static_cast<std::size_t>(a)].dense());
    }
    if (!with_hessian) return e;

    // KL:  H_ab = tr(T^{-1} Q_a T^{-1} Q_b)
    // ML:  H_ab = -tr(T^{-1} Q_a T^{-1} Q_b) + 2 tr(T^{-1} Q_a B Q_b), B = T^{-1} T_hat T^{-1}
    std::vector<Eigen::MatrixXd> iq(basis.size());
    std::vector<Eigen::MatrixXd> qi(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) {
      iq[a] = t_inv * basis[a].dense();
      if (problem == Problem::MaximumLikelihood) qi[a] = basis[a].dense() * b;
    }
    e.hessian.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index c = 0; c <= a; ++c) {
        const auto& ia = iq[static_cast<std::size_t>(a)];
        const auto& ic = iq[static_cast<std::size_t>(c)];
        // tr(X Y) = sum(X .* Y')
        double h = inner(ia, ic.transpose());
        if (problem == Problem::MaximumLikelihood) {
          h = -h + 2.0 * inner(ia, qi[static_cast<std::size_t>(c)].transpose());
        }
        e.hessian(a, c) = e.hessian(c, a) = h;
      }
    }
    return e;
  }
};

Eigen::VectorXd search_direction(const Evaluation& e, DescentDirection kind) {
  if (kind == DescentDirection::Gradient) return -e.gradient;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.hessian);
  const Eigen::VectorXd mags = es.eigenvalues().cwiseAbs();
  const double floor = std::max(mags.maxCoeff(), 1.0) * 1e-10;
  const Eigen::VectorXd inv = mags.cwiseMax(floor).cwiseInverse();
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXd d = -(v * inv.asDiagonal() * v.transpose() * e.gradient);
  if (!(d.dot(e.gradient) < 0.0) || !d.allFinite()) return -e.gradient;
  return d;
}

struct DescentRun {
  Eigen::VectorXd coords;
  double value;
  double gradient_norm;
  std::size_t iterations;
  SolveStatus status;
  std::string note;
};

DescentRun descend(const SmoothObjective& obj, Eigen::VectorXd coords, double scale,
                   const DescentOptions& opts) {
  const LinearStructure& l = obj.structure;
  const double floor = opts.pd_floor * scale;
  const double tol = opts.gradient_tol * scale;

  Eigen::MatrixXd t = l.synthesize(coords).dense();
  auto llt = interior_factor(t, floor);
  if (!llt) throw Error(ErrorCode::InitInfeasible, "initial point is not positive definite");

  Evaluation e = obj.evaluate(t, *llt, opts.direction == DescentDirection::Newton);
  DescentRun run{coords, e.value, e.gradient.norm(), 0, SolveStatus::MaxIters, {}};

  for (; run.iterations < opts.max_iters; ++run.iterations) {
    run.gradient_norm = e.gradient.norm();
    if (run.gradient_norm <= tol) {
      run.status = SolveStatus::Converged;
      return run;
    }
    const Eigen::VectorXd d = search_direction(e, opts.direction);
    const double slope = e.gradient.dot(d);
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 80; ++halving, step *= opts.shrink) {
      const Eigen::VectorXd trial = run.coords + step * d;
      const Eigen::MatrixXd tt = l.synthesize(trial).dense();
      auto trial_llt = interior_factor(tt, floor);
      if (!trial_llt) continue;
      const double fv = obj.value(tt, *trial_llt);
      if (!(fv <= run.value + opts.armijo * step * slope)) continue;
      run.coords = trial;
      run.value = fv;
      t = tt;
      llt = std::move(trial_llt);
      accepted = true;
      break;
    }
    if (!accepted) {
      run.note = "line search stalled";
      break;
    }
    e = obj.evaluate(t, *llt, opts.direction == DescentDirection::Newton);
  }
  run.gradient_norm = e.gradient.norm();
  if (run.gradient_norm <= tol) run.status = SolveStatus::Converged;
  return run;
}

double scale_of(const SymMatrix& t_hat) { return std::max(t_hat.frobenius(), 1.0); }

void require_structure(const SymMatrix& t_hat, const LinearStructure& l) {
  if (t_hat.size() != l.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "T_hat and structure dimensions differ");
  }
}

SolveReport to_report(const LinearStructure& l, const DescentRun& run, double objective) {
  SolveReport rep{l.synthesize(run.coords), objective, run.iterations, run.gradient_norm, 0.0,
                  run.status, {}};
  if (!run.note.empty()) rep.notes.push_back(run.note);
  return rep;
}

}  // namespace

double ml_objective(const SymMatrix& t_hat, const SymMatrix& t) {
  Eigen::LLT<Eigen::MatrixXd> llt(t.dense());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularModel, "T is not positive definite");
  return logdet(llt) + llt.solve(t_hat.dense()).trace();
}

Eigen::VectorXd ml_gradient(const SymMatrix& t_hat, const LinearStructure& l, const SymMatrix& t) {
  Eigen::LLT<Eigen::MatrixXd> llt(t.dense());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularModel, "T is not positive definite");
  const SmoothObjective obj{Problem::MaximumLikelihood, l, t_hat.dense(), {}};
  return obj.evaluate(t.dense(), llt, false).gradient;
}

double ml_stationarity_residual(const SymMatrix& t_hat, const LinearStructure& l,
                                const SymMatrix& t) {
  return ml_gradient(t_hat, l, t).cwiseAbs().maxCoeff();
}

SolveReport solve_ml(const SymMatrix& t_hat, const LinearStructure& l,
                     const std::optional<SymMatrix>& init, const DescentOptions& opts) {
  require_structure(t_hat, l);
  const double scale = scale_of(t_hat);
  const Eigen::Index n = t_hat.size();
  const SmoothObjective obj{Problem::MaximumLikelihood, l, t_hat.dense(), {}};
  auto reported = [n](double f) { return 0.5 * (f - static_cast<double>(n)); };

  if (init) {
    if (init->size() != n) throw Error(ErrorCode::DimensionMismatch, "init has wrong size");
    const DescentRun run = descend(obj, l.coordinates(project_structure(*init, l)), scale, opts);
    return to_report(l, run, reported(run.value));
  }

  const SymMatrix base = project_structure(t_hat, l);
  const SymMatrix ridge_dir = project_structure(SymMatrix::identity(n), l);
  const double level = t_hat.trace() / static_cast<double>(n);
  std::vector<std::string> notes;
  std::optional<DescentRun> best;
  std::vector<double> finals;
  for (const double ridge : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const SymMatrix start = base + (ridge * level) * ridge_dir;
    std::ostringstream label;
    label << "start ridge " << ridge << "*tr/n";
    DescentRun run;
    try {
      run = descend(obj, l.coordinates(start), scale, opts);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::InitInfeasible) throw;
      notes.push_back(label.str() + ": skipped (not positive definite)");
      continue;
    }
    std::ostringstream os;
    os << label.str() << ": objective " << reported(run.value) << ", " << to_string(run.status)
       << " after " << run.iterations << " iterations";
    if (!run.note.empty()) os << " (" << run.note << ")";
    notes.push_back(os.str());
    finals.push_back(run.value);
    if (!best || run.value < best->value) best = std::move(run);
  }
  if (!best) {
    throw Error(ErrorCode::InitInfeasible, "no multi-start initial point is positive definite");
  }
  const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
  if (*hi - *lo > 1e-6 * std::max(1.0, std::abs(*lo))) {
    std::ostringstream os;
    os << "multi-start disagreement: objectives span [" << reported(*lo) << ", " << reported(*hi)
       << "]";
    notes.push_back(os.str());
  }
  SolveReport rep = to_report(l, *best, reported(best->value));
  rep.notes.insert(rep.notes.begin(), notes.begin(), notes.end());
  return rep;
}

SolveReport solve_kl(const SymMatrix& t_hat, const LinearStructure& l, const DescentOptions& opts) {
  require_structure(t_hat, l);
  const Eigen::Index n = t_hat.size();
  const EigDecomp eh = sym_eig(t_hat);
  if (!(eh.values(n - 1) > 1e-12 * t_hat.frobenius())) {
    throw Error(ErrorCode::SingularData, "KL fit is vacuous for singular T_hat");
  }
  const Eigen::MatrixXd h_inv = eh.apply([](double v) { return 1.0 / v; }).dense();
  const double logdet_hat = eh.values.array().log().sum();
  const SmoothObjective obj{Problem::KullbackLeibler, l, t_hat.dense(), h_inv};

  // Start from the structured projection, pushed inside the cone if needed.
  SymMatrix start = project_structure(t_hat, l);
  const double lowest = min_eigenvalue(start);
  const double margin = 1e-3 * t_hat.trace() / static_cast<double>(n);
  if (lowest < margin) start = start + (margin - lowest) * project_structure(SymMatrix::identity(n), l);

  const DescentRun run = descend(obj, l.coordinates(start), scale_of(t_hat), opts);
  const double kl = 0.5 * (logdet_hat + run.value - static_cast<double>(n));
  return to_report(l, run, std::max(kl, 0.0));
}

}  // namespace covest
