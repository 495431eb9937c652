#include "covest/divergences.hpp"

#include "covest/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace covest {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Likelihood: return "likelihood";
    case MetricKind::Kl: return "kl";
    case MetricKind::LogDeviation: return "log_deviation";
    case MetricKind::Hellinger: return "hellinger";
    case MetricKind::Wasserstein2: return "wasserstein2";
    case MetricKind::RaoQuadratic: return "rao_quadratic";
    case MetricKind::FisherQuadratic: return "fisher_quadratic";
  }
  return "unknown";
}

namespace {

void require_same_size(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << a.size() << "x" << a.size() << " vs " << b.size() << "x" << b.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

// Eigendecomposition of an argument that must be invertible; failures are
// reported with the caller's error code.
EigDecomp invertible_eig(const SymMatrix& a, ErrorCode code, const char* name) {
  EigDecomp e = sym_eig(a);
  const double lowest = e.values(e.values.size() - 1);
  const double tol = 1e-12 * a.frobenius();
  if (!(lowest > tol)) {
    std::ostringstream os;
    os << name << " is singular or indefinite (smallest eigenvalue " << lowest << ")";
    throw Error(code, os.str());
  }
  return e;
}

double logdet(const EigDecomp& e) { return e.values.array().log().sum(); }

SymMatrix inverse(const EigDecomp& e) {
  return e.apply([](double l) { return 1.0 / l; });
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  return a.dense().cwiseProduct(b.dense()).sum();
}

MetricValue nonnegative(double v, MetricKind kind) { return {std::max(v, 0.0), kind}; }

// tr((T_hat^{1/2} T T_hat^{1/2})^{1/2}), shared by the Hellinger and
// transport closed forms.
SymMatrix fidelity_root(const SymMatrix& t, const SymMatrix& t_hat_sqrt) {
  return sqrtm_psd(t.congruence(t_hat_sqrt.dense()));
}

}  // namespace

double likelihood_objective(const SymMatrix& t, const SymMatrix& t_hat) {
  require_same_size(t, t_hat);
  const EigDecomp et = invertible_eig(t, ErrorCode::SingularModel, "model covariance T");
  const double n = static_cast<double>(t.size());
  return 0.5 * (logdet(et) + trace_product(t_hat, inverse(et)) - n);
}

MetricValue likelihood_divergence(const SymMatrix& t, const SymMatrix& t_hat) {
  const double partial = likelihood_objective(t, t_hat);
  const EigDecomp eh = invertible_eig(t_hat, ErrorCode::SingularData, "data covariance T_hat");
  return nonnegative(partial - 0.5 * logdet(eh), MetricKind::Likelihood);
}

MetricValue kl_gaussian(const SymMatrix& t, const SymMatrix& t_hat, KlDirection direction) {
  require_same_size(t, t_hat);
  // d_KL(p_a || p_b) = 1/2 (log|T_b| - log|T_a| + tr(T_a T_b^{-1}) - n)
  const bool model_first = direction == KlDirection::ModelFirst;
  const SymMatrix& ta = model_first ? t : t_hat;
  const SymMatrix& tb = model_first ? t_hat : t;
  const EigDecomp eb = invertible_eig(tb, ErrorCode::SingularModel,
                                      model_first ? "T_hat" : "T");
  const EigDecomp ea = invertible_eig(ta, ErrorCode::SingularModel,
                                      model_first ? "T" : "T_hat");
  const double n = static_cast<double>(t.size());
  return nonnegative(0.5 * (logdet(eb) - logdet(ea) + trace_product(ta, inverse(eb)) - n),
                     MetricKind::Kl);
}

MetricValue rao_quadratic(const SymMatrix& t, const SymMatrix& delta) {
  require_same_size(t, delta);
  const EigDecomp et = invertible_eig(t, ErrorCode::SingularModel, "T");
  const SymMatrix w = et.apply([](double l) { return 1.0 / std::sqrt(l); });
  const double f = delta.congruence(w.dense()).frobenius();
  return {f * f, MetricKind::RaoQuadratic};
}

MetricValue fisher_quadratic_gaussian(const SymMatrix& t, const SymMatrix& delta, double eps) {
  require_same_size(t, delta);
  const EigDecomp et = invertible_eig(t, ErrorCode::SingularModel, "T");
  const SymMatrix w = et.apply([](double l) { return 1.0 / std::sqrt(l); });
  const SymMatrix delta_t = eps * delta.congruence(w.dense());
  if (!(delta_t.frobenius() < 1.0)) {
    std::ostringstream os;
    os << "||eps T^{-1/2} Delta T^{-1/2}||_F = " << delta_t.frobenius() << " must be < 1";
    throw Error(ErrorCode::PerturbationTooLarge, os.str());
  }
  // det(I - D^2)^{-1/2} - 1 = expm1(-1/2 sum log1p(-lambda^2)), exact for tiny eps.
  const EigDecomp ed = sym_eig(delta_t);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    log_det += std::log1p(-ed.values(i) * ed.values(i));
  }
  return nonnegative(std::expm1(-0.5 * log_det), MetricKind::FisherQuadratic);
}

MetricValue log_deviation(const SymMatrix& t, const SymMatrix& t_hat) {
  require_same_size(t, t_hat);
  invertible_eig(t, ErrorCode::SingularModel, "T");
  const EigDecomp eh = invertible_eig(t_hat, ErrorCode::SingularModel, "T_hat");
  const SymMatrix w = eh.apply([](double l) { return 1.0 / std::sqrt(l); });
  const EigDecomp ratio = sym_eig(t.congruence(w.dense()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < ratio.values.size(); ++i) {
    const double l = ratio.values(i);
    if (!(l > 0.0)) throw Error(ErrorCode::SingularModel, "T_hat^{-1/2} T T_hat^{-1/2} not positive");
    s += std::log(l) * std::log(l);
  }
  return {std::sqrt(s), MetricKind::LogDeviation};
}

MetricValue bures_hellinger(const SymMatrix& t, const SymMatrix& t_hat) {
  require_same_size(t, t_hat);
  const SymMatrix root = fidelity_root(t, sqrtm_psd(t_hat));
  const double sq = t.trace() + t_hat.trace() - 2.0 * root.trace();
  return {std::sqrt(std::max(sq, 0.0)), MetricKind::Hellinger};
}

ProcrustesSolution hellinger_procrustes(const SymMatrix& t, const SymMatrix& t_hat) {
  require_same_size(t, t_hat);
  const EigDecomp et = invertible_eig(t, ErrorCode::SingularModel, "T");
  const EigDecomp eh = invertible_eig(t_hat, ErrorCode::SingularModel, "T_hat");
  const SymMatrix t_sqrt = et.apply([](double l) { return std::sqrt(l); });
  const SymMatrix t_isqrt = et.apply([](double l) { return 1.0 / std::sqrt(l); });
  const SymMatrix h_sqrt = eh.apply([](double l) { return std::sqrt(l); });
  const SymMatrix h_isqrt = eh.apply([](double l) { return 1.0 / std::sqrt(l); });
  const SymMatrix root = fidelity_root(t, h_sqrt);

  Eigen::MatrixXd u = t_isqrt.dense() * h_isqrt.dense() * root.dense();
  const double d = (t_sqrt.dense() * u - h_sqrt.dense()).norm();
  return {d, std::move(u)};
}

CouplingSolution optimal_coupling(const SymMatrix& t, const SymMatrix& t_hat) {
  require_same_size(t, t_hat);
  const EigDecomp eh = invertible_eig(t_hat, ErrorCode::SingularModel, "T_hat");
  const SymMatrix h_sqrt = eh.apply([](double l) { return std::sqrt(l); });
  const SymMatrix h_isqrt = eh.apply([](double l) { return 1.0 / std::sqrt(l); });
  const SymMatrix root = fidelity_root(t, h_sqrt);

  Eigen::MatrixXd s = h_isqrt.dense() * root.dense() * h_sqrt.dense();
  const double cost = t.trace() + t_hat.trace() - 2.0 * s.trace();
  return {std::move(s), std::max(cost, 0.0)};
}

MetricValue wasserstein2(const SymMatrix& t, const SymMatrix& t_hat) {
  return {std::sqrt(optimal_coupling(t, t_hat).cost), MetricKind::Wasserstein2};
}

}  // namespace covest
