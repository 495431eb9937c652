#pragma once

#include "covest/matops.hpp"
#include "covest/structure.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace covest {

/// Prediction polynomial 1 + sum_k a_k z^{-k} driven by white noise of
/// variance noise_var. Burg on perfectly predictable data yields
/// noise_var == 0; every other path produces noise_var > 0.
struct ARModel {
  std::vector<double> coeffs;
  double noise_var = 0.0;
  std::vector<double> reflections;

  std::size_t order() const { return coeffs.size(); }
};

struct Peak {
  std::size_t index;
  double freq;
  double value;
};

/// psd sampled at freqs[i] = i * pi / M, i = 0..M.
struct SpectrumGrid {
  std::vector<double> freqs;
  std::vector<double> psd;
  std::vector<Peak> peaks;
};

/// Burg lattice recursion (forward + backward prediction error).
ARModel burg_ar(std::span<const double> x, std::size_t order);

/// Levinson-Durbin on r_0..r_p giving the order-p model whose first p + 1
/// autocovariances are r. Throws NotPositiveDefinite once a prediction
/// error drops to 1e-12 * r_0 or below.
ARModel levinson(const ToeplitzParams& r);

/// Levinson-Durbin that stops instead of throwing. If the error collapses at
/// lag k with |reflection| <= 1 (a singular but PSD extension) the order-k
/// model is kept with noise_var floored at 1e-12 * r_0; if the reflection
/// leaves the unit interval the order-(k-1) model is returned.
struct LevinsonResult {
  ARModel model;
  std::optional<std::size_t> failed_lag;
};

LevinsonResult levinson_truncated(const ToeplitzParams& r);

/// Maximum-entropy spectrum noise_var / |A(e^{i w})|^2 on M + 1 points of
/// [0, pi]; peaks are filled by find_peaks.
SpectrumGrid me_spectrum(const ARModel& m, std::size_t grid = 200);

/// Strict local maxima (endpoints compared with their single neighbour),
/// sorted by value descending, ties by index.
std::vector<Peak> find_peaks(const SpectrumGrid& g);

/// Autocovariances r_0..r_{count-1} of the stationary process an AR model
/// describes (reflection coefficients are recomputed by step-down when the
/// model carries none).
std::vector<double> ar_autocovariance(const ARModel& m, std::size_t count);

/// Covariance estimate -> Toeplitz lags -> Levinson -> spectrum. Uses lags
/// 0..order (order defaults to n - 1).
struct CovarianceSpectrum {
  ARModel model;
  SpectrumGrid spectrum;
  std::optional<std::string> warning;
};

CovarianceSpectrum covariance_spectrum(const SymMatrix& t, std::optional<std::size_t> order,
                                       std::size_t grid = 200);

}  // namespace covest
