// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "covest/divergences.hpp"
#include "covest/experiment.hpp"
#include "covest/solvers.hpp"
#include "covest/spectral.hpp"
#include "grid_oracle.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace covest;
using covest::testing::Rng;
using covest::testing::rel_err;

namespace {

constexpr std::size_t kTarget = 50;  // grid index of pi/4 at M = 200

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t dist_to_target(std::size_t idx) { return idx > kTarget ? idx - kTarget : kTarget - idx; }

std::size_t interior_peaks(const SpectrumGrid& g) {
  std::size_t count = 0;
  for (const Peak& p : g.peaks) count += p.index > 0 && p.index + 1 < g.psd.size();
  return count;
}

const MethodResult& result_for(const ExperimentReport& rep, Method m) {
  for (const auto& r : rep.results) {
    if (r.method == m) return r;
  }
  throw std::logic_error("method missing from report");
}

std::string top(const MethodResult& r) {
  if (r.error) return "error(" + *r.error + ")";
  if (r.spectrum.peaks.empty()) return "no peak";
  return std::to_string(r.spectrum.peaks.front().index);
}

std::optional<std::size_t> top_index(const MethodResult& r) {
  if (r.error || r.spectrum.peaks.empty()) return std::nullopt;
  return r.spectrum.peaks.front().index;
}

struct Phase {
  std::string label;
  double psi;
  ExperimentReport report;
  double seconds;
};

Phase run_phase(const std::string& label, double psi) {
  ExperimentConfig cfg;
  cfg.psi = psi;
  cfg.label = label;
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep = run_experiment(cfg);
  return {label, psi, std::move(rep), seconds_since(t0)};
}

void criterion1() {
  Rng rng(1001);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_cost = 0.0, worst_s = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 2 + k % 5;
    const SymMatrix t = rng.spd(n);
    const SymMatrix th = rng.spd(n);
    const TransportSolution sdp = solve_coupling_sdp(t, th);
    // Closed form evaluated on the test side.
    const Eigen::MatrixXd r = covest::testing::oracle_sqrt(th.dense());
    const Eigen::MatrixXd m = covest::testing::oracle_sqrt(r * t.dense() * r);
    const Eigen::MatrixXd s0 = r.inverse() * m * r;
    const double cost = t.trace() + th.trace() - 2.0 * m.trace();
    worst_cost = std::max(worst_cost, rel_err(sdp.report.objective, cost));
    worst_s = std::max(worst_s, (sdp.s_star - s0).norm());
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max rel cost err " << worst_cost << " (<=1e-5), max ||S-S0||_F " << worst_s
     << " (<=1e-4), " << secs << " s (<10)";
  report(1, worst_cost <= 1e-5 && worst_s <= 1e-4 && secs < 10.0,
         "coupling ADMM matches closed form on 20 SPD pairs", os.str());
}

void criterion2() {
  Rng rng(1002);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = rng.integer(1, 8);
    const SymMatrix t = rng.spd(n);
    const SymMatrix th = rng.spd(n);
    const double h = bures_hellinger(t, th).value;
    worst = std::max(worst, rel_err(h * h, optimal_coupling(t, th).cost));
  }
  std::ostringstream os;
  os << "max rel err " << worst << " (<=1e-9)";
  report(2, worst <= 1e-9, "Hellinger^2 equals transport cost on 100 SPD pairs", os.str());
}

void criterion3() {
  Rng rng(1003);
  const double eps[] = {1e-2, 5e-3, 2.5e-3};
  double kl_lo = 1e9, kl_hi = 0, f_lo = 1e9, f_hi = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = rng.integer(2, 6);
    const SymMatrix t = rng.spd(n);
    SymMatrix d = rng.symmetric(n);
    d = (1.0 / std::sqrt(rao_quadratic(t, d).value)) * d;  // ||Delta_T||_F = 1
    double e_kl[3], e_f[3];
    for (int i = 0; i < 3; ++i) {
      const double g_rao = rao_quadratic(t, eps[i] * d).value;
      e_kl[i] = std::abs(kl_gaussian(t, t + eps[i] * d, KlDirection::ModelFirst).value - 0.25 * g_rao);
      e_f[i] = std::abs(g_rao - 2.0 * fisher_quadratic_gaussian(t, d, eps[i]).value);
    }
    for (int i = 0; i < 2; ++i) {
      kl_lo = std::min(kl_lo, e_kl[i] / e_kl[i + 1]);
      kl_hi = std::max(kl_hi, e_kl[i] / e_kl[i + 1]);
      f_lo = std::min(f_lo, e_f[i] / e_f[i + 1]);
      f_hi = std::max(f_hi, e_f[i] / e_f[i + 1]);
    }
  }
  std::ostringstream os;
  os << "KL-Rao/4 halving ratios in [" << kl_lo << ", " << kl_hi << "] (want [6,10]); Rao-2Fisher in ["
     << f_lo << ", " << f_hi << "] (want [12,20])";
  report(3, kl_lo >= 6 && kl_hi <= 10 && f_lo >= 12 && f_hi <= 20,
         "expansion orders for eps in {1e-2, 5e-3, 2.5e-3}, 10 random (T, Delta)", os.str());
}

void criterion4(const Phase& p) {
  const auto& b = result_for(p.report, Method::Burg);
  const auto& m = result_for(p.report, Method::Ml);
  const auto& t = result_for(p.report, Method::Transport);
  const bool pass = top_index(b) == kTarget && top_index(m) == kTarget && top_index(t) == kTarget &&
                    p.seconds < 30.0;
  std::ostringstream os;
  os << "top peaks burg " << top(b) << ", ml " << top(m) << ", transport " << top(t)
     << " (want 50); " << p.seconds << " s (<30)";
  report(4, pass, "psi = pi/2: all three methods peak at grid index 50", os.str());
}

void criterion5(const Phase& p) {
  const auto& b = result_for(p.report, Method::Burg);
  const auto& m = result_for(p.report, Method::Ml);
  const auto& t = result_for(p.report, Method::Transport);
  const auto bi = top_index(b), mi = top_index(m), ti = top_index(t);
  const bool burg_ok = bi && dist_to_target(*bi) > 1 && interior_peaks(b.spectrum) >= 2;
  const bool ml_ok = mi && dist_to_target(*mi) <= 1;
  const bool tr_ok = ti && dist_to_target(*ti) <= 1;
  std::ostringstream os;
  os << "burg top " << top(b) << " with " << interior_peaks(b.spectrum) << " interior peaks ("
     << (burg_ok ? "ok" : "bad") << "); ml top " << top(m) << " (" << (ml_ok ? "ok" : "bad")
     << "); transport top " << top(t) << " (" << (tr_ok ? "ok" : "bad") << "); want ml/transport in [49,51]";
  report(5, burg_ok && ml_ok && tr_ok, "psi = pi/4: Burg split and displaced, ML and transport on target",
         os.str());
}

void criterion6(const Phase& p) {
  const auto& b = result_for(p.report, Method::Burg);
  const auto& m = result_for(p.report, Method::Ml);
  const auto& t = result_for(p.report, Method::Transport);
  const auto bi = top_index(b), mi = top_index(m), ti = top_index(t);
  const bool burg_ok = bi && dist_to_target(*bi) > 1;
  const bool ml_ok = mi && dist_to_target(*mi) <= 1 && interior_peaks(m.spectrum) >= 2;
  const bool tr_ok = ti && dist_to_target(*ti) <= 1;
  std::ostringstream os;
  os << "burg top " << top(b) << " (" << (burg_ok ? "ok" : "bad") << "); ml top " << top(m) << " with "
     << interior_peaks(m.spectrum) << " interior peaks (" << (ml_ok ? "ok" : "bad") << "); transport top "
     << top(t) << " (" << (tr_ok ? "ok" : "bad") << ")";
  report(6, burg_ok && ml_ok && tr_ok,
         "psi = 3pi/4: transport and ML dominant line on target, Burg displaced", os.str());
}

void criterion7(const std::vector<Phase>& phases) {
  bool pass = true;
  std::ostringstream os;
  for (const Phase& p : phases) {
    const auto& t = result_for(p.report, Method::Transport);
    if (!t.estimate) {
      pass = false;
      os << p.label << ": no estimate; ";
      continue;
    }
    const double r0 = (*t.estimate)(0, 0);
    const double floor = std::max(min_eigenvalue(*t.estimate), 0.0);
    const double energy = r0 - floor;
    const double hat_r0 = p.report.t_hat.trace() / static_cast<double>(p.report.t_hat.size());
    pass = pass && r0 <= hat_r0 + 1e-8;
    os << p.label << ": r0(T*) " << r0 << " vs r0(T_hat) " << hat_r0 << ", energy proxy " << energy
       << (energy < 0.5 ? " < 0.5" : " >= 0.5") << "; ";
  }
  report(7, pass, "transport r0 does not exceed the sample r0", os.str());
}

void criterion8(const std::vector<Phase>& phases) {
  bool pass = true;
  std::ostringstream os;
  for (const Phase& p : phases) {
    const auto& m = result_for(p.report, Method::Ml);
    if (m.error || !m.report) {
      pass = false;
      os << p.label << ": error; ";
      continue;
    }
    const LinearStructure l = LinearStructure::toeplitz(p.report.t_hat.size());
    const double scale = std::max(p.report.t_hat.frobenius(), 1.0);
    const double res = ml_stationarity_residual(p.report.t_hat, l, m.report->t_star);
    const bool ok = m.report->status == SolveStatus::Converged && res <= 1e-6 * scale;
    pass = pass && ok;
    os << p.label << ": " << to_string(m.report->status) << ", residual " << res << "; ";
  }

  Rng rng(1008);
  const LinearStructure l6 = LinearStructure::toeplitz(6);
  int converged = 0;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SymMatrix th = rng.spd(6);
    const SolveReport r = solve_ml(th, l6);
    const double res = ml_stationarity_residual(th, l6, r.t_star) / std::max(th.frobenius(), 1.0);
    converged += r.status == SolveStatus::Converged;
    worst = std::max(worst, res);
  }
  pass = pass && converged == 20 && worst <= 1e-6;
  os << "random n=6: " << converged << "/20 converged, max scaled residual " << worst << "; ";

  double fd_worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = rng.integer(2, 8);
    const LinearStructure l = LinearStructure::toeplitz(n);
    const SymMatrix th = rng.spd(n);
    const SymMatrix t = rng.toeplitz_spd(n);
    const Eigen::VectorXd g = ml_gradient(th, l, t);
    const Eigen::VectorXd c = l.coordinates(t);
    Eigen::VectorXd fd(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      Eigen::VectorXd up = c, down = c;
      up(i) += 1e-6;
      down(i) -= 1e-6;
      fd(i) = (ml_objective(th, l.synthesize(up)) - ml_objective(th, l.synthesize(down))) / 2e-6;
    }
    fd_worst = std::max(fd_worst, (g - fd).norm() / std::max(g.norm(), 1e-300));
  }
  pass = pass && fd_worst <= 1e-5;
  os << "gradient vs central differences max rel err " << fd_worst;
  report(8, pass, "ML stationarity residual <= 1e-6 scale at convergence; gradient matches FD", os.str());
}

void criterion9() {
  Rng rng(1009);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = rng.integer(1, 8);
    const SymMatrix th = rng.symmetric(n);
    const SymMatrix t = rng.symmetric(n);
    const NuclearSplit s = verify_nuclear_identity(th, t);
    const double oracle =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>((th - t).dense()).eigenvalues().cwiseAbs().sum();
    const double feas = ((th + s.q_hat) - (t + s.q)).frobenius();
    worst = std::max({worst, std::abs(s.trace_sum - oracle), feas});
  }
  std::ostringstream os;
  os << "max |tr(Q+Q_hat) - ||T_hat-T||_*| and feasibility defect " << worst << " (<=1e-10)";
  report(9, worst <= 1e-10, "nuclear eigen-split identity on 50 symmetric differences", os.str());
}

void criterion10() {
  using covest::testing::grid_search_2x2;
  Rng rng(1010);
  const LinearStructure l2 = LinearStructure::toeplitz(2);
  std::vector<Eigen::Matrix2d> cases(3);
  cases[0] << 2, 0, 0, 1;
  cases[1] << 1, 0, 0, 2;
  cases[2] = rng.spd(2, 0.2).dense();
  double worst = 0.0;
  std::ostringstream os;
  for (const Eigen::Matrix2d& th : cases) {
    const double range = 1.5 * th.diagonal().maxCoeff();
    const Eigen::Matrix2d w = covest::testing::inv_sqrt2(th);
    const double g_st = grid_search_2x2(range, 1e-3, [&](double a, double b) {
                          return covest::testing::stoica_objective_2x2(th, a, b);
                        }).value;
    const double g_nu = grid_search_2x2(range, 1e-3, [&](double a, double b) {
                          return covest::testing::nuclear_objective_2x2(th, a, b);
                        }).value;
    const double g_ll = grid_search_2x2(range, 1e-3, [&](double a, double b) {
                          return covest::testing::loglin_objective_2x2(w, a, b);
                        }).value;
    const double d_st = std::abs(solve_stoica(SymMatrix(th), l2).objective - g_st);
    const double d_nu = std::abs(solve_nuclear(SymMatrix(th), l2).objective - g_nu);
    const double d_ll = std::abs(solve_log_linear(SymMatrix(th), l2).objective - g_ll);
    worst = std::max({worst, d_st, d_nu, d_ll});
    os << "[" << d_st << ", " << d_nu << ", " << d_ll << "] ";
  }
  os << "(stoica, nuclear, loglin gaps; <=2e-3)";
  report(10, worst <= 2e-3, "n = 2 solvers match dense grid search", os.str());
}

void criterion11() {
  Rng rng(1011);
  std::map<std::string, bool> ok{{"nonnegativity", true},  {"identity", true},
                                 {"symmetry", true},       {"asymmetry exhibited", false},
                                 {"triangle", true},       {"unitary invariance", true},
                                 {"congruence invariance", true}};
  double tri_slack = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index n = rng.integer(1, 8);
    const SymMatrix a = rng.spd(n), b = rng.spd(n), c = rng.spd(n);
    const double ab = bures_hellinger(a, b).value;
    const double bc = bures_hellinger(b, c).value;
    const double ac = bures_hellinger(a, c).value;
    tri_slack = std::max(tri_slack, ac - ab - bc);
    if (ac > ab + bc + 1e-9) ok["triangle"] = false;

    const double vals[] = {likelihood_divergence(a, b).value,
                           kl_gaussian(a, b, KlDirection::ModelFirst).value,
                           kl_gaussian(a, b, KlDirection::DataFirst).value,
                           log_deviation(a, b).value,
                           ab,
                           wasserstein2(a, b).value,
                           rao_quadratic(a, b - a).value};
    for (double v : vals) {
      if (!(v >= 0.0) || !std::isfinite(v)) ok["nonnegativity"] = false;
    }
    const double scale = std::max({a.frobenius(), b.frobenius(), 1.0});
    if (likelihood_divergence(a, a).value > 1e-10 || kl_gaussian(a, a, KlDirection::ModelFirst).value > 1e-10 ||
        log_deviation(a, a).value > 1e-10 || std::pow(bures_hellinger(a, a).value, 2) > 1e-10 * scale ||
        std::pow(wasserstein2(a, a).value, 2) > 1e-10 * scale) {
      ok["identity"] = false;
    }
    if (std::abs(log_deviation(a, b).value - log_deviation(b, a).value) > 1e-9 ||
        std::abs(ab - bures_hellinger(b, a).value) > 1e-9 ||
        std::abs(optimal_coupling(a, b).cost - optimal_coupling(b, a).cost) > 1e-9) {
      ok["symmetry"] = false;
    }
    if (std::abs(likelihood_divergence(a, b).value - likelihood_divergence(b, a).value) > 1e-3 &&
        std::abs(kl_gaussian(a, b, KlDirection::ModelFirst).value -
                 kl_gaussian(b, a, KlDirection::ModelFirst).value) > 1e-3) {
      ok["asymmetry exhibited"] = true;
    }
    const Eigen::MatrixXd q = rng.orthogonal(n);
    if (std::abs(bures_hellinger(a.congruence(q), b.congruence(q)).value - ab) > 1e-8) {
      ok["unitary invariance"] = false;
    }
    const Eigen::MatrixXd m = rng.gaussian(n, n) + 3.0 * Eigen::MatrixXd::Identity(n, n);
    if (std::abs(log_deviation(a.congruence(m), b.congruence(m)).value - log_deviation(a, b).value) > 1e-7) {
      ok["congruence invariance"] = false;
    }
  }
  bool pass = true;
  std::ostringstream os;
  for (const auto& [name, v] : ok) {
    pass = pass && v;
    os << name << (v ? " ok" : " FAILED") << "; ";
  }
  os << "max triangle excess " << tri_slack;
  report(11, pass, "metric axioms on 200 random SPD triples", os.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();

  std::vector<Phase> phases;
  phases.push_back(run_phase("pi4", std::numbers::pi / 4));
  phases.push_back(run_phase("pi2", std::numbers::pi / 2));
  phases.push_back(run_phase("3pi4", 3 * std::numbers::pi / 4));
  criterion4(phases[1]);
  criterion5(phases[0]);
  criterion6(phases[2]);
  criterion7(phases);
  criterion8(phases);

  criterion9();
  criterion10();
  criterion11();

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
