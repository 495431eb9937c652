#include "covest/divergences.hpp"
#include "covest/error.hpp"
#include "covest/experiment.hpp"
#include "covest/io.hpp"
#include "covest/solvers.hpp"
#include "covest/spectral.hpp"
#include "covest/structure.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace covest;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kMethodFailed = 2;

struct Globals {
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::optional<double> rho;
  std::uint64_t seed = 0;

  AdmmOptions admm() const {
    AdmmOptions o;
    if (tol) o.eps_primal = o.eps_dual = *tol;
    if (max_iters) o.max_iters = *max_iters;
    if (rho) o.rho = *rho;
    return o;
  }

  DescentOptions descent() const {
    DescentOptions o;
    if (tol) o.gradient_tol = *tol;
    if (max_iters) o.max_iters = *max_iters;
    return o;
  }
};

// Usage and IO failures map to exit 1, numerical failures of a method to 2.
int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotToeplitz:
      return kUsage;
    default:
      return kMethodFailed;
  }
}

void print_report(const SolveReport& r) {
  std::cerr << "status " << to_string(r.status) << ", objective " << io::format_double(r.objective)
            << ", iterations " << r.iterations << ", residuals "
            << io::format_double(r.primal_residual) << " / " << io::format_double(r.dual_residual)
            << '\n';
  for (const auto& note : r.notes) std::cerr << "note: " << note << '\n';
}

SymMatrix read_symmetric(const std::string& path) {
  const Eigen::MatrixXd a = io::read_csv_matrix(path);
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, path + " is not a square matrix");
  }
  return SymMatrix(a);
}

struct EstimateArgs {
  std::string input;
  std::string method;
  std::string structure = "toeplitz";
  std::string out;
  bool covariance = false;
  std::size_t order = 10;
};

int run_estimate(const EstimateArgs& a, const Globals& g) {
  const auto method = parse_method(a.method);
  if (!method) throw Error(ErrorCode::InvalidArgument, "unknown method '" + a.method + "'");
  const Eigen::MatrixXd raw = io::read_csv_matrix(a.input);
  if (*method == Method::Burg) {
    if (a.covariance) throw Error(ErrorCode::InvalidArgument, "burg needs observations, not a covariance");
    const ObservationSet obs(raw);
    const std::size_t order = std::min<std::size_t>(a.order, static_cast<std::size_t>(obs.length() - 1));
    const ARModel m = burg_ar(obs.record(0), order);
    const std::vector<double> r = ar_autocovariance(m, static_cast<std::size_t>(obs.length()));
    const SymMatrix t = params_to_matrix(
        ToeplitzParams{Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()))});
    io::write_csv_matrix(a.out, t.dense());
    return kOk;
  }
  const SymMatrix t_hat = a.covariance ? read_symmetric(a.input) : sample_covariance(ObservationSet(raw));
  const LinearStructure l = LinearStructure::toeplitz(static_cast<std::size_t>(t_hat.size()));
  const SolveReport r = estimate_covariance(*method, t_hat, l, g.admm(), g.descent());
  print_report(r);
  io::write_csv_matrix(a.out, r.t_star.dense());
  return r.status == SolveStatus::Converged ? kOk : kMethodFailed;
}

struct DistanceArgs {
  std::string a;
  std::string b;
  std::string metric;
};

const std::map<std::string, int>& metric_names() {
  static const std::map<std::string, int> names{
      {"hellinger", 0}, {"wasserstein", 1}, {"likelihood", 2}, {"kl", 3}, {"kl-reverse", 4},
      {"logdev", 5},
  };
  return names;
}

int run_distance(const DistanceArgs& d) {
  const SymMatrix a = read_symmetric(d.a);
  const SymMatrix b = read_symmetric(d.b);
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "matrices differ in size");
  double v = 0.0;
  switch (metric_names().at(d.metric)) {
    case 0: v = bures_hellinger(a, b).value; break;
    case 1: v = wasserstein2(a, b).value; break;
    case 2: v = likelihood_divergence(a, b).value; break;
    case 3: v = kl_gaussian(a, b, KlDirection::ModelFirst).value; break;
    case 4: v = kl_gaussian(a, b, KlDirection::DataFirst).value; break;
    default: v = log_deviation(a, b).value; break;
  }
  std::cout << io::format_double(v) << '\n';
  return kOk;
}

struct SpectrumArgs {
  std::string input;
  std::optional<std::size_t> order;
  std::size_t grid = 200;
  std::string out;
  std::string svg;
  std::string from = "auto";
};

int run_spectrum(const SpectrumArgs& s) {
  const Eigen::MatrixXd raw = io::read_csv_matrix(s.input);
  std::string from = s.from;
  if (from == "auto") from = raw.rows() == 1 && raw.cols() > 1 ? "series" : "covariance";

  ExperimentConfig cfg;
  cfg.label = "input";
  cfg.grid = s.grid;
  MethodResult res;
  if (from == "series") {
    const ObservationSet obs(raw);
    const std::size_t order = s.order.value_or(std::min<std::size_t>(10, obs.length() - 1));
    res.method = Method::Burg;
    res.model = burg_ar(obs.record(0), order);
    res.spectrum = me_spectrum(res.model, s.grid);
  } else {
    if (raw.rows() != raw.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "covariance input must be square");
    }
    CovarianceSpectrum cs = covariance_spectrum(SymMatrix(raw), s.order, s.grid);
    if (cs.warning) std::cerr << "warning: " << *cs.warning << '\n';
    res.method = Method::Ml;
    res.model = std::move(cs.model);
    res.spectrum = std::move(cs.spectrum);
  }
  io::write_text(s.out, spectrum_csv(res.spectrum));
  if (!s.svg.empty()) {
    ExperimentReport rep{cfg, ObservationSet(ObservationSet::Records::Zero(1, 1)),
                         SymMatrix::identity(1), {res}};
    io::write_text(s.svg, spectrum_svg(rep));
  }
  if (!res.spectrum.peaks.empty()) {
    const Peak& p = res.spectrum.peaks.front();
    std::cerr << "top peak at index " << p.index << ", omega " << io::format_double(p.freq) << '\n';
  }
  return kOk;
}

struct ReproArgs {
  std::string phase = "all";
  std::string outdir = "paper_out";
  std::vector<std::string> methods{"burg", "ml", "transport"};
};

int run_repro(const ReproArgs& r, const Globals& g) {
  std::vector<Method> methods;
  for (const auto& name : r.methods) {
    const auto m = parse_method(name);
    if (!m) throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
    methods.push_back(*m);
  }
  const std::vector<std::pair<std::string, double>> phases{
      {"pi4", std::numbers::pi / 4}, {"pi2", std::numbers::pi / 2}, {"3pi4", 3 * std::numbers::pi / 4}};
  std::vector<ExperimentReport> reports;
  for (const auto& [label, psi] : phases) {
    if (r.phase != "all" && r.phase != label) continue;
    ExperimentConfig cfg;
    cfg.psi = psi;
    cfg.label = label;
    cfg.methods = methods;
    cfg.admm = g.admm();
    cfg.descent = g.descent();
    reports.push_back(run_experiment(cfg));
  }
  write_reports(reports, r.outdir);

  int rc = kOk;
  for (const auto& rep : reports) {
    for (const auto& res : rep.results) {
      std::cerr << rep.config.label << ' ' << to_string(res.method) << ": ";
      if (res.error) {
        std::cerr << "error: " << *res.error << '\n';
        rc = kMethodFailed;
        continue;
      }
      if (!res.spectrum.peaks.empty()) std::cerr << "top peak index " << res.spectrum.peaks[0].index;
      if (res.report) std::cerr << ", " << to_string(res.report->status);
      std::cerr << '\n';
      for (const auto& w : res.warnings) std::cerr << "  warning: " << w << '\n';
      if (res.report) {
        for (const auto& n : res.report->notes) std::cerr << "  note: " << n << '\n';
      }
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured covariance estimation and maximum-entropy spectra"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--tol", g.tol, "Relative stopping tolerance for the solvers")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", g.max_iters, "Iteration cap for the solvers")->check(CLI::PositiveNumber);
  app.add_option("--rho", g.rho, "Initial ADMM penalty")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for randomized helpers (unused; the experiment is deterministic)");

  std::vector<std::string> method_names;
  for (Method m : all_methods()) method_names.emplace_back(to_string(m));

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Structured covariance estimate from data");
  c_est->add_option("--input", est.input, "Observation CSV, one record per row")->required();
  c_est->add_option("--method", est.method, "Estimator")->required()->check(CLI::IsMember(method_names));
  c_est->add_option("--structure", est.structure, "Linear structure")->check(CLI::IsMember({"toeplitz"}));
  c_est->add_option("--out", est.out, "Output matrix CSV")->required();
  c_est->add_flag("--covariance", est.covariance, "Treat --input as a covariance matrix");
  c_est->add_option("--order", est.order, "AR order for burg")->check(CLI::PositiveNumber);

  DistanceArgs dist;
  std::vector<std::string> metrics;
  for (const auto& [name, id] : metric_names()) metrics.push_back(name);
  auto* c_dist = app.add_subcommand("distance", "Distance between two covariance matrices");
  c_dist->add_option("--a", dist.a, "First matrix CSV")->required();
  c_dist->add_option("--b", dist.b, "Second matrix CSV")->required();
  c_dist->add_option("--metric", dist.metric, "Measure")->required()->check(CLI::IsMember(metrics));

  SpectrumArgs spec;
  auto* c_spec = app.add_subcommand("spectrum", "Maximum-entropy spectrum");
  c_spec->add_option("--input", spec.input, "Toeplitz covariance CSV or single-row series CSV")->required();
  c_spec->add_option("--order", spec.order, "AR order")->check(CLI::PositiveNumber);
  c_spec->add_option("--grid", spec.grid, "Grid intervals M on [0, pi]")->check(CLI::PositiveNumber);
  c_spec->add_option("--out", spec.out, "Spectrum CSV")->required();
  c_spec->add_option("--svg", spec.svg, "Optional SVG plot");
  c_spec->add_option("--from", spec.from, "Input kind")->check(CLI::IsMember({"auto", "covariance", "series"}));

  ReproArgs repro;
  auto* c_repro = app.add_subcommand("repro-paper", "Spectral-line experiment at three phases");
  c_repro->add_option("--phase", repro.phase, "Phase")->check(CLI::IsMember({"pi4", "pi2", "3pi4", "all"}));
  c_repro->add_option("--outdir", repro.outdir, "Output directory");
  c_repro->add_option("--methods", repro.methods, "Methods to run")->delimiter(',')->check(CLI::IsMember(method_names));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*c_est) return run_estimate(est, g);
    if (*c_dist) return run_distance(dist);
    if (*c_spec) return run_spectrum(spec);
    return run_repro(repro, g);
  } catch (const Error& e) {
    std::cerr << "covest: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "covest: " << e.what() << '\n';
    return kUsage;
  }
}
