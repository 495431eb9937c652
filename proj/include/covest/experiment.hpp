#pragma once

#include "covest/divergences.hpp"
#include "covest/matops.hpp"
#include "covest/solvers.hpp"
#include "covest/spectral.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covest {

/// m records of length n, stored one record per row.
class ObservationSet {
 public:
  using Records = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit ObservationSet(Records records);

  Eigen::Index length() const { return records_.cols(); }
  Eigen::Index count() const { return records_.rows(); }
  const Records& records() const { return records_; }
  std::span<const double> record(Eigen::Index k) const {
    return {records_.data() + k * records_.cols(), static_cast<std::size_t>(records_.cols())};
  }

 private:
  Records records_;
};

/// (1/m) sum_k x_k x_k'
SymMatrix sample_covariance(const ObservationSet& obs);

/// The single 11-sample record cos(pi t / 4 + psi) + v(t), t = 0..10, with
/// the fixed noise realization of the spectral-line test case.
ObservationSet paper_signal(double psi);

/// Noise realization added by paper_signal.
const std::array<double, 11>& paper_noise();

enum class Method { Burg, Ml, Transport, Kl, LogLinear, Stoica, Nuclear };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct ExperimentConfig {
  double psi = 0.0;
  std::string label;  ///< used in file names, e.g. "pi4"
  std::size_t grid = 200;
  std::size_t ar_order = 10;
  std::vector<Method> methods{Method::Burg, Method::Ml, Method::Transport};
  AdmmOptions admm;
  DescentOptions descent;
};

/// Distance of an estimate from the sample covariance under each measure;
/// empty where the measure is undefined (e.g. singular T_hat).
struct DistanceTable {
  std::optional<double> hellinger;
  std::optional<double> wasserstein2;
  std::optional<double> likelihood;
  std::optional<double> likelihood_shifted;  ///< without -log|T_hat|
  std::optional<double> kl_model_first;
  std::optional<double> kl_data_first;
  std::optional<double> log_deviation;
};

DistanceTable distances_from(const SymMatrix& estimate, const SymMatrix& t_hat);

struct MethodResult {
  Method method = Method::Burg;
  std::optional<std::string> error;
  std::optional<SolveReport> report;  ///< absent for Burg
  std::optional<SymMatrix> estimate;  ///< Burg: Toeplitz of its model autocovariances
  ARModel model;
  SpectrumGrid spectrum;
  DistanceTable distances;
  std::vector<std::string> warnings;
};

struct ExperimentReport {
  ExperimentConfig config;
  ObservationSet data;
  SymMatrix t_hat;
  std::vector<MethodResult> results;  ///< in config.methods order
};

/// Structured estimate of T_hat by one of the matrix methods (not Burg).
SolveReport estimate_covariance(Method m, const SymMatrix& t_hat, const LinearStructure& l,
                                const AdmmOptions& admm, const DescentOptions& descent);

/// Runs each configured method on the data; a failing method records its
/// error and the others still run.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const ObservationSet& data);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Output writers; every number uses io::format_double so repeated runs are
/// byte-identical.
std::string spectrum_csv(const SpectrumGrid& g);
std::string summary_csv(const std::vector<ExperimentReport>& reports);
std::string spectrum_svg(const ExperimentReport& report);

/// Writes spectrum_<label>_<method>.csv, figure_<label>.svg and summary.csv.
void write_reports(const std::vector<ExperimentReport>& reports, const std::filesystem::path& dir);

}  // namespace covest
