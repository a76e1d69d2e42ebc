#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "epkit/epochs.hpp"

namespace epkit {

struct StftConfig {
  double window_ms{20.0};
  double step_ms{5.0};
  // Zero-padded transform length in samples; 0 picks twice the window
  // length, which puts a bin exactly on 50 Hz at 19.2 kHz.
  std::size_t nfft{0};
  // Window centres whose power forms the reference spectrum.
  double baseline_center_lo_ms{-25.0};
  double baseline_center_hi_ms{-15.0};
  // Subtract the evoked average from every epoch before the transform.
  bool subtract_evoked{false};
};

// dB power change per (window centre, frequency) against the pre-stimulus
// reference spectrum.
struct TimeFrequencyMap {
  std::vector<double> centers_ms;
  std::vector<double> freqs_hz;
  std::vector<std::vector<double>> power_db;  // centers x freqs
  std::vector<std::vector<double>> power;     // linear, epoch-averaged
  double baseline_center_lo_ms{-25.0};
  double baseline_center_hi_ms{-15.0};
  // Time span covered by the baseline windows.
  double baseline_from_ms{-35.0};
  double baseline_to_ms{-5.0};
  std::size_t nfft{0};
  std::size_t window_samples{0};
  std::size_t n_epochs{0};

  std::size_t nearest_bin(double f_hz) const;
  // Exact match within 1e-6 ms, or npos.
  std::size_t center_index(double c_ms) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Symmetric Hann window of n samples.
std::vector<double> hann_window(std::size_t n);

// One-sided power of a real segment zero-padded to nfft: sum over bins
// equals the segment energy sum(x^2) (Parseval).
std::vector<double> one_sided_power(std::span<const double> segment, std::size_t nfft);

// Hann-windowed short-time transform of every epoch at centres spaced
// step_ms apart (multiples of the step, full window inside the epoch),
// power averaged over epochs, then 10*log10(P / P_baseline). Throws
// WindowTooShort when the baseline windows do not fit in the epoch.
TimeFrequencyMap stft_power_db(const EpochSet& set, const StftConfig& config = {});

inline constexpr double kGammaHz = 50.0;

// Mean dB change at the bin nearest `freq_hz` over the requested centres.
// Throws MissingCenter when a centre is not on the map.
double gamma_band_summary(const TimeFrequencyMap& map,
                          std::span<const double> centers_ms = std::span<const double>(),
                          double freq_hz = kGammaHz);

// Default summary centres 20..40 ms.
std::vector<double> default_gamma_centers();

}  // namespace epkit
