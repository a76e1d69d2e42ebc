#pragma once

#include <complex>
#include <span>
#include <vector>

namespace epkit {

enum class FilterKind { band_pass, low_pass, high_pass };

// Maximally-flat (Butterworth) recursive filter of the given order.
// A band-pass of order N has 2N poles, matching the usual butter(N, [lo hi])
// convention. With zero_phase the filter runs forward then backward, so the
// magnitude response is squared and the phase cancels.
struct FilterSpec {
  FilterKind kind{FilterKind::band_pass};
  int order{2};
  double low_hz{1.0};     // band-pass and high-pass
  double high_hz{1000.0}; // band-pass and low-pass
  bool zero_phase{true};

  static FilterSpec band_pass(double low, double high, int order = 2, bool zero_phase = true) {
    return {FilterKind::band_pass, order, low, high, zero_phase};
  }
  static FilterSpec low_pass(double cutoff, int order = 3, bool zero_phase = true) {
    return {FilterKind::low_pass, order, 0.0, cutoff, zero_phase};
  }
  static FilterSpec high_pass(double cutoff, int order = 2, bool zero_phase = true) {
    return {FilterKind::high_pass, order, cutoff, 0.0, zero_phase};
  }
};

// Throws InvalidSpec unless 0 < low < high < fs/2 (as applicable) and order >= 1.
void validate(const FilterSpec& spec, double fs_hz);

// Transposed direct-form II biquad, a0 normalised to 1.
struct Biquad {
  double b0{1.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
};

class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  // Complex response H(e^{j 2 pi f / fs}) of one causal pass.
  std::complex<double> response(double f_hz, double fs_hz) const;

  // Causal filtering from the given per-section state (two values per
  // section), or from rest when `state` is empty.
  std::vector<double> filter(std::span<const double> x, std::span<const double> state = {}) const;

  // Per-section initial state for a steady unit input (step response has no
  // start-up transient when scaled by the first sample).
  std::vector<double> steady_state() const;

  // Forward-backward filtering with odd-reflection padding and steady-state
  // initial conditions at both ends.
  std::vector<double> filtfilt(std::span<const double> x) const;

  // Samples after which the slowest pole's impulse response has decayed
  // below `tolerance`.
  std::size_t decay_length(double tolerance = 1e-12) const;

 private:
  std::vector<Biquad> sections_;
};

SosFilter design_butterworth(const FilterSpec& spec, double fs_hz);

// Designs and applies the filter to one channel.
std::vector<double> apply_filter(std::span<const double> x, const FilterSpec& spec, double fs_hz);

}  // namespace epkit
