#include "covest/experiment.hpp"

#include "covest/error.hpp"
#include "covest/io.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace covest {

ObservationSet::ObservationSet(Records records) : records_(std::move(records)) {
  if (records_.rows() < 1 || records_.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "observation set needs at least one non-empty record");
  }
}

SymMatrix sample_covariance(const ObservationSet& obs) {
  const Eigen::MatrixXd x = obs.records();
  return SymMatrix(x.transpose() * x / static_cast<double>(obs.count()));
}

const std::array<double, 11>& paper_noise() {
  static const std::array<double, 11> v{0.000562,  -0.019127, 0.007377, -0.000149,
                                        -0.007479, -0.013960, 0.003510, 0.012380,
                                        0.006979,  0.003092,  0.010053};
  return v;
}

ObservationSet paper_signal(double psi) {
  const auto& v = paper_noise();
  ObservationSet::Records x(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t t = 0; t < v.size(); ++t) {
    x(0, static_cast<Eigen::Index>(t)) =
        std::cos(std::numbers::pi / 4.0 * static_cast<double>(t) + psi) + v[t];
  }
  return ObservationSet(std::move(x));
}

namespace {

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr MethodName kMethodNames[] = {
    {Method::Burg, "burg"},        {Method::Ml, "ml"},           {Method::Transport, "transport"},
    {Method::Kl, "kl"},            {Method::LogLinear, "loglin"}, {Method::Stoica, "stoica"},
    {Method::Nuclear, "nuclear"},
};

template <class F>
std::optional<double> try_value(F&& f) {
  try {
    const double v = f();
    if (std::isfinite(v)) return v;
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& e : kMethodNames) {
    if (e.method == m) return e.name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& e : kMethodNames) {
    if (e.name == name) return e.method;
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& e : kMethodNames) out.push_back(e.method);
    return out;
  }();
  return methods;
}

DistanceTable distances_from(const SymMatrix& estimate, const SymMatrix& t_hat) {
  DistanceTable d;
  d.hellinger = try_value([&] { return bures_hellinger(estimate, t_hat).value; });
  // Coupling needs its second argument invertible; the value is symmetric.
  d.wasserstein2 = try_value([&] { return wasserstein2(t_hat, estimate).value; });
  d.likelihood = try_value([&] { return likelihood_divergence(estimate, t_hat).value; });
  d.likelihood_shifted = try_value([&] { return likelihood_objective(estimate, t_hat); });
  d.kl_model_first =
      try_value([&] { return kl_gaussian(estimate, t_hat, KlDirection::ModelFirst).value; });
  d.kl_data_first =
      try_value([&] { return kl_gaussian(estimate, t_hat, KlDirection::DataFirst).value; });
  d.log_deviation = try_value([&] { return log_deviation(estimate, t_hat).value; });
  return d;
}

SolveReport estimate_covariance(Method m, const SymMatrix& t_hat, const LinearStructure& l,
                                const AdmmOptions& admm, const DescentOptions& descent) {
  switch (m) {
    case Method::Ml:
      return solve_ml(t_hat, l, std::nullopt, descent);
    case Method::Transport:
      return solve_transport(t_hat, l, admm).report;
    case Method::Kl:
      return solve_kl(t_hat, l, descent);
    case Method::LogLinear:
      return solve_log_linear(t_hat, l, admm);
    case Method::Stoica:
      return solve_stoica(t_hat, l, admm);
    case Method::Nuclear:
      return solve_nuclear(t_hat, l, admm);
    case Method::Burg:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "Burg works on the data, not on a covariance");
}

namespace {

MethodResult run_burg(const ExperimentConfig& cfg, const ObservationSet& data) {
  MethodResult res;
  if (data.count() > 1) res.warnings.push_back("Burg uses the first record only");
  res.model = burg_ar(data.record(0), cfg.ar_order);
  const std::vector<double> r = ar_autocovariance(res.model, static_cast<std::size_t>(data.length()));
  res.estimate = params_to_matrix(ToeplitzParams{Eigen::Map<const Eigen::VectorXd>(
      r.data(), static_cast<Eigen::Index>(r.size()))});
  res.spectrum = me_spectrum(res.model, cfg.grid);
  return res;
}

MethodResult run_matrix_method(Method m, const ExperimentConfig& cfg, const SymMatrix& t_hat,
                               const LinearStructure& l) {
  MethodResult res;
  res.method = m;
  res.report = estimate_covariance(m, t_hat, l, cfg.admm, cfg.descent);
  res.estimate = res.report->t_star;
  const std::size_t max_order = static_cast<std::size_t>(t_hat.size() - 1);
  CovarianceSpectrum cs =
      covariance_spectrum(res.report->t_star, std::min(cfg.ar_order, max_order), cfg.grid);
  if (cs.warning) res.warnings.push_back(*cs.warning);
  res.model = std::move(cs.model);
  res.spectrum = std::move(cs.spectrum);
  return res;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const ObservationSet& data) {
  ExperimentReport report{cfg, data, sample_covariance(data), {}};
  const LinearStructure l = LinearStructure::toeplitz(static_cast<std::size_t>(data.length()));
  for (Method m : cfg.methods) {
    MethodResult res;
    res.method = m;
    try {
      res = m == Method::Burg ? run_burg(cfg, data) : run_matrix_method(m, cfg, report.t_hat, l);
      if (res.estimate) res.distances = distances_from(*res.estimate, report.t_hat);
    } catch (const Error& e) {
      res.error = e.what();
    }
    report.results.push_back(std::move(res));
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, paper_signal(cfg.psi));
}

std::string spectrum_csv(const SpectrumGrid& g) {
  std::ostringstream os;
  os << "index,omega,psd,log10_psd\n";
  for (std::size_t i = 0; i < g.psd.size(); ++i) {
    os << i << ',' << io::format_double(g.freqs[i]) << ',' << io::format_double(g.psd[i]) << ','
       << io::format_double(std::log10(g.psd[i])) << '\n';
  }
  return os.str();
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

// Quoted when it could break the row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

std::string summary_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  os << "phase,method,status,top_peak_index,top_peak_omega,top_peak_value,num_peaks,"
        "second_peak_index,r0,t_hat_r0,objective,iterations,primal_residual,dual_residual,"
        "hellinger,wasserstein2,likelihood,likelihood_shifted,kl_model_first,kl_data_first,"
        "log_deviation,error\n";
  for (const auto& rep : reports) {
    const double t_hat_r0 = rep.t_hat.trace() / static_cast<double>(rep.t_hat.size());
    for (const auto& res : rep.results) {
      os << rep.config.label << ',' << to_string(res.method) << ',';
      if (res.error) {
        os << "error";
      } else if (res.report) {
        os << to_string(res.report->status);
      } else {
        os << "ok";
      }
      const auto& peaks = res.spectrum.peaks;
      if (!res.error && !peaks.empty()) {
        os << ',' << peaks[0].index << ',' << io::format_double(peaks[0].freq) << ','
           << io::format_double(peaks[0].value);
      } else {
        os << ",,,";
      }
      os << ',' << (res.error ? std::string() : std::to_string(peaks.size())) << ','
         << (peaks.size() > 1 ? std::to_string(peaks[1].index) : std::string()) << ','
         << (res.estimate ? io::format_double((*res.estimate)(0, 0)) : std::string()) << ','
         << io::format_double(t_hat_r0) << ',';
      if (res.report) {
        os << io::format_double(res.report->objective) << ',' << res.report->iterations << ','
           << io::format_double(res.report->primal_residual) << ','
           << io::format_double(res.report->dual_residual);
      } else {
        os << ",,,";
      }
      const auto& d = res.distances;
      os << ',' << opt(d.hellinger) << ',' << opt(d.wasserstein2) << ',' << opt(d.likelihood) << ','
         << opt(d.likelihood_shifted) << ',' << opt(d.kl_model_first) << ','
         << opt(d.kl_data_first) << ',' << opt(d.log_deviation) << ','
         << csv_field(res.error.value_or("")) << '\n';
    }
  }
  return os.str();
}

void write_reports(const std::vector<ExperimentReport>& reports, const std::filesystem::path& dir) {
  for (const auto& rep : reports) {
    for (const auto& res : rep.results) {
      if (res.error) continue;
      io::write_text(dir / ("spectrum_" + rep.config.label + "_" + std::string(to_string(res.method)) +
                            ".csv"),
                     spectrum_csv(res.spectrum));
    }
    io::write_text(dir / ("figure_" + rep.config.label + ".svg"), spectrum_svg(rep));
  }
  io::write_text(dir / "summary.csv", summary_csv(reports));
}

}  // namespace covest
