#include "covest/spectral.hpp"

#include "covest/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace covest {

namespace {

// a_new[j] = a[j] + k * a[m - 2 - j], then append k.
void levinson_step(std::vector<double>& a, double k) {
  const std::size_t m = a.size();
  std::vector<double> next(m + 1);
  for (std::size_t j = 0; j < m; ++j) next[j] = a[j] + k * a[m - 1 - j];
  next[m] = k;
  a = std::move(next);
}

}  // namespace

ARModel burg_ar(std::span<const double> x, std::size_t order) {
  const std::size_t n = x.size();
  if (order < 1 || n <= order) {
    std::ostringstream os;
    os << "Burg needs 1 <= order < length (order " << order << ", length " << n << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  std::vector<double> f(x.begin(), x.end());
  std::vector<double> b(x.begin(), x.end());
  double energy = 0.0;
  for (double v : x) energy += v * v;

  ARModel model;
  model.noise_var = energy / static_cast<double>(n);
  for (std::size_t m = 1; m <= order; ++m) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = m; t < n; ++t) {
      num += f[t] * b[t - 1];
      den += f[t] * f[t] + b[t - 1] * b[t - 1];
    }
    if (den < 1e-300) {
      std::ostringstream os;
      os << "prediction residuals vanished at order " << m;
      throw Error(ErrorCode::DegenerateSignal, os.str());
    }
    const double k = std::clamp(-2.0 * num / den, -1.0, 1.0);
    levinson_step(model.coeffs, k);
    model.reflections.push_back(k);
    // Descending t keeps b[t - 1] at its previous-order value.
    for (std::size_t t = n - 1; t >= m; --t) {
      const double ft = f[t];
      f[t] = ft + k * b[t - 1];
      b[t] = b[t - 1] + k * ft;
    }
    model.noise_var *= 1.0 - k * k;
  }
  return model;
}

LevinsonResult levinson_truncated(const ToeplitzParams& params) {
  const Eigen::VectorXd& r = params.r;
  if (r.size() < 1) throw Error(ErrorCode::InvalidArgument, "empty autocovariance sequence");
  const double r0 = r(0);
  LevinsonResult out;
  if (!(r0 > 0.0)) {
    out.failed_lag = 0;
    return out;
  }
  const double floor = 1e-12 * r0;
  double err = r0;
  ARModel& model = out.model;
  model.noise_var = r0;
  for (Eigen::Index k = 1; k < r.size(); ++k) {
    double acc = r(k);
    for (std::size_t j = 0; j < model.coeffs.size(); ++j) {
      acc += model.coeffs[j] * r(k - 1 - static_cast<Eigen::Index>(j));
    }
    const double refl = -acc / err;
    const double next = err * (1.0 - refl * refl);
    if (next <= floor) {
      out.failed_lag = static_cast<std::size_t>(k);
      if (std::abs(refl) <= 1.0 + 1e-9) {
        levinson_step(model.coeffs, std::clamp(refl, -1.0, 1.0));
        model.reflections.push_back(std::clamp(refl, -1.0, 1.0));
        model.noise_var = floor;
      }
      return out;
    }
    levinson_step(model.coeffs, refl);
    model.reflections.push_back(refl);
    err = next;
    model.noise_var = err;
  }
  return out;
}

ARModel levinson(const ToeplitzParams& r) {
  LevinsonResult res = levinson_truncated(r);
  if (res.failed_lag) {
    std::ostringstream os;
    os << "prediction error vanished at lag " << *res.failed_lag;
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  return std::move(res.model);
}

SpectrumGrid me_spectrum(const ARModel& m, std::size_t grid) {
  if (grid < 1) throw Error(ErrorCode::InvalidArgument, "spectrum grid needs M >= 1");
  if (!(m.noise_var > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "maximum-entropy spectrum needs noise_var > 0");
  }
  SpectrumGrid g;
  g.freqs.resize(grid + 1);
  g.psd.resize(grid + 1);
  const double step = std::numbers::pi / static_cast<double>(grid);
  for (std::size_t i = 0; i <= grid; ++i) {
    const double w = step * static_cast<double>(i);
    std::complex<double> a(1.0, 0.0);
    for (std::size_t k = 0; k < m.coeffs.size(); ++k) {
      a += m.coeffs[k] * std::polar(1.0, -w * static_cast<double>(k + 1));
    }
    g.freqs[i] = w;
    g.psd[i] = m.noise_var / std::max(std::norm(a), std::numeric_limits<double>::min());
  }
  g.peaks = find_peaks(g);
  return g;
}

std::vector<Peak> find_peaks(const SpectrumGrid& g) {
  std::vector<Peak> peaks;
  const std::size_t n = g.psd.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = g.psd[i];
    const bool above_left = i == 0 || v > g.psd[i - 1];
    const bool above_right = i + 1 == n || v > g.psd[i + 1];
    if (n > 1 && above_left && above_right) {
      peaks.push_back({i, g.freqs.empty() ? 0.0 : g.freqs[i], v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.value > b.value; });
  return peaks;
}

CovarianceSpectrum covariance_spectrum(const SymMatrix& t, std::optional<std::size_t> order,
                                       std::size_t grid) {
  const ToeplitzParams full = matrix_to_params(t);
  const std::size_t p = order.value_or(static_cast<std::size_t>(t.size() - 1));
  if (p + 1 > static_cast<std::size_t>(full.r.size())) {
    std::ostringstream os;
    os << "AR order " << p << " needs " << p + 1 << " lags, matrix provides " << full.r.size();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const ToeplitzParams lags{full.r.head(static_cast<Eigen::Index>(p + 1))};
  LevinsonResult lev = levinson_truncated(lags);
  CovarianceSpectrum out;
  if (lev.failed_lag) {
    if (*lev.failed_lag == 0) {
      throw Error(ErrorCode::NotPositiveDefinite, "r_0 must be positive");
    }
    std::ostringstream os;
    os << "prediction error vanished at lag " << *lev.failed_lag << "; AR order truncated to "
       << lev.model.order();
    out.warning = os.str();
  }
  out.model = std::move(lev.model);
  out.spectrum = me_spectrum(out.model, grid);
  return out;
}

std::vector<double> ar_autocovariance(const ARModel& m, std::size_t count) {
  const std::size_t p = m.order();
  std::vector<double> refl = m.reflections;
  if (refl.size() != p) {
    // Step-down: a^{(j-1)}_i = (a^{(j)}_i - k_j a^{(j)}_{j-i}) / (1 - k_j^2).
    refl.assign(p, 0.0);
    std::vector<double> a = m.coeffs;
    for (std::size_t j = p; j >= 1; --j) {
      const double k = a[j - 1];
      if (!(std::abs(k) < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "AR model is not minimum phase");
      }
      refl[j - 1] = k;
      std::vector<double> lower(j - 1);
      for (std::size_t i = 0; i + 1 < j; ++i) lower[i] = (a[i] - k * a[j - 2 - i]) / (1.0 - k * k);
      a = std::move(lower);
    }
  }
  double gain = 1.0;
  for (double k : refl) gain *= 1.0 - k * k;
  if (!(gain > 0.0)) throw Error(ErrorCode::InvalidArgument, "reflection coefficient of magnitude 1");

  std::vector<double> r(std::max<std::size_t>(count, 1));
  r[0] = m.noise_var / gain;
  std::vector<double> a;
  double err = r[0];
  for (std::size_t j = 1; j < r.size(); ++j) {
    if (j <= p) {
      // r_j = -k_j e_{j-1} - sum_i a^{(j-1)}_i r_{j-1-i}
      double acc = -refl[j - 1] * err;
      for (std::size_t i = 0; i < a.size(); ++i) acc -= a[i] * r[j - 1 - i];
      r[j] = acc;
      levinson_step(a, refl[j - 1]);
      err *= 1.0 - refl[j - 1] * refl[j - 1];
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < p; ++i) acc -= m.coeffs[i] * r[j - 1 - i];
      r[j] = acc;
    }
  }
  r.resize(count);
  return r;
}

}  // namespace covest
