#include "epkit/timefreq.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include "epkit/error.hpp"

namespace epkit {

namespace {

// Owns an r2c plan and its buffers. FFTW planning is not thread-safe, so
// plans are made per call.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() { fftw_destroy_plan(plan_); }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  // Zero-pads `x` to n and returns the one-sided power normalised so that
  // the bins sum to sum(x^2).
  void power(std::span<const double> x, std::vector<double>& out) {
    std::fill(in_.get(), in_.get() + n_, 0.0);
    std::copy(x.begin(), x.end(), in_.get());
    fftw_execute(plan_);
    const std::size_t bins = n_ / 2 + 1;
    out.resize(bins);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < bins; ++k) {
      const double re = out_.get()[k][0], im = out_.get()[k][1];
      const bool edge = k == 0 || (n_ % 2 == 0 && k == n_ / 2);
      out[k] = (edge ? 1.0 : 2.0) * (re * re + im * im) * scale;
    }
  }

 private:
  struct Free {
    void operator()(void* p) const { fftw_free(p); }
  };
  std::size_t n_;
  std::unique_ptr<double, Free> in_;
  std::unique_ptr<fftw_complex, Free> out_;
  fftw_plan plan_{};
};

constexpr double kTiny = 1e-300;

}  // namespace

std::size_t TimeFrequencyMap::nearest_bin(double f_hz) const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < freqs_hz.size(); ++k) {
    if (std::abs(freqs_hz[k] - f_hz) < std::abs(freqs_hz[best] - f_hz)) best = k;
  }
  return best;
}

std::size_t TimeFrequencyMap::center_index(double c_ms) const {
  for (std::size_t i = 0; i < centers_ms.size(); ++i) {
    if (std::abs(centers_ms[i] - c_ms) < 1e-6) return i;
  }
  return npos;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  return w;
}

std::vector<double> one_sided_power(std::span<const double> segment, std::size_t nfft) {
  if (nfft < segment.size()) throw Error(ErrorCode::InvalidSpec, "nfft shorter than segment");
  RealFft fft(nfft);
  std::vector<double> out;
  fft.power(segment, out);
  return out;
}

TimeFrequencyMap stft_power_db(const EpochSet& set, const StftConfig& config) {
  if (set.epochs.empty()) throw Error(ErrorCode::Empty, "no epochs");
  if (!(config.window_ms > 0.0) || !(config.step_ms > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "window and step must be positive");
  }
  const EpochGrid& grid = set.grid;
  const auto win = static_cast<std::size_t>(std::llround(config.window_ms * grid.fs / 1000.0));
  if (win < 2) throw Error(ErrorCode::InvalidSpec, "window shorter than two samples");
  const std::size_t nfft = config.nfft == 0 ? 2 * win : config.nfft;
  if (nfft < win) throw Error(ErrorCode::InvalidSpec, "nfft shorter than the window");
  const std::size_t half = win / 2;

  // Centres on multiples of the step whose full window lies inside the epoch.
  std::vector<double> centers;
  std::vector<std::size_t> starts;
  const double first_t = grid.time_ms(0);
  const double last_t = grid.time_ms(grid.length - 1);
  const auto k_lo = static_cast<long long>(std::floor(first_t / config.step_ms)) - 1;
  const auto k_hi = static_cast<long long>(std::ceil(last_t / config.step_ms)) + 1;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double c = static_cast<double>(k) * config.step_ms;
    const double idx = grid.index_of(c);
    const auto center = static_cast<long long>(std::llround(idx));
    const long long start = center - static_cast<long long>(half);
    if (start < 0 || start + static_cast<long long>(win) > static_cast<long long>(grid.length)) continue;
    centers.push_back(c);
    starts.push_back(static_cast<std::size_t>(start));
  }

  TimeFrequencyMap map;
  map.baseline_center_lo_ms = config.baseline_center_lo_ms;
  map.baseline_center_hi_ms = config.baseline_center_hi_ms;
  map.baseline_from_ms = config.baseline_center_lo_ms - config.window_ms / 2.0;
  map.baseline_to_ms = config.baseline_center_hi_ms + config.window_ms / 2.0;
  map.nfft = nfft;
  map.window_samples = win;
  map.n_epochs = set.epochs.size();
  map.centers_ms = centers;

  std::vector<std::size_t> baseline_rows;
  for (double c = config.baseline_center_lo_ms; c <= config.baseline_center_hi_ms + 1e-9; c += config.step_ms) {
    const std::size_t idx = map.center_index(c);
    if (idx == TimeFrequencyMap::npos) {
      throw Error(ErrorCode::WindowTooShort, "epoch does not cover the baseline window centred at " +
                                                 std::to_string(c) + " ms");
    }
    baseline_rows.push_back(idx);
  }

  const std::size_t bins = nfft / 2 + 1;
  map.freqs_hz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) map.freqs_hz[k] = static_cast<double>(k) * grid.fs / static_cast<double>(nfft);

  std::vector<double> evoked;
  if (config.subtract_evoked) evoked = average_epochs(set).trace;

  const auto taper = hann_window(win);
  RealFft fft(nfft);
  map.power.assign(centers.size(), std::vector<double>(bins, 0.0));
  std::vector<double> segment(win), spectrum;
  // Epoch order does not matter up to rounding: each cell is a plain sum.
  for (const auto& epoch : set.epochs) {
    for (std::size_t c = 0; c < centers.size(); ++c) {
      for (std::size_t i = 0; i < win; ++i) {
        double v = epoch[starts[c] + i];
        if (!evoked.empty()) v -= evoked[starts[c] + i];
        segment[i] = v * taper[i];
      }
      fft.power(segment, spectrum);
      for (std::size_t k = 0; k < bins; ++k) map.power[c][k] += spectrum[k];
    }
  }
  const double n_epochs = static_cast<double>(set.epochs.size());
  for (auto& row : map.power) {
    for (double& v : row) v /= n_epochs;
  }

  std::vector<double> reference(bins, 0.0);
  for (std::size_t r : baseline_rows) {
    for (std::size_t k = 0; k < bins; ++k) reference[k] += map.power[r][k];
  }
  for (double& v : reference) v /= static_cast<double>(baseline_rows.size());

  map.power_db.assign(centers.size(), std::vector<double>(bins, 0.0));
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t k = 0; k < bins; ++k) {
      map.power_db[c][k] = 10.0 * std::log10(std::max(map.power[c][k], kTiny) / std::max(reference[k], kTiny));
    }
  }
  return map;
}

std::vector<double> default_gamma_centers() { return {20.0, 25.0, 30.0, 35.0, 40.0}; }

double gamma_band_summary(const TimeFrequencyMap& map, std::span<const double> centers_ms, double freq_hz) {
  std::vector<double> centers(centers_ms.begin(), centers_ms.end());
  if (centers.empty()) centers = default_gamma_centers();
  if (map.freqs_hz.empty()) throw Error(ErrorCode::Empty, "empty map");
  const std::size_t bin = map.nearest_bin(freq_hz);
  double sum = 0.0;
  for (double c : centers) {
    const std::size_t idx = map.center_index(c);
    if (idx == TimeFrequencyMap::npos) {
      throw Error(ErrorCode::MissingCenter, "no window centred at " + std::to_string(c) + " ms");
    }
    sum += map.power_db[idx][bin];
  }
  return sum / static_cast<double>(centers.size());
}

}  // namespace epkit
