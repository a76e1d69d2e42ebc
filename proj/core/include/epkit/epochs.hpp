#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epkit/signal.hpp"

namespace epkit {

// Time window relative to pulse onset, milliseconds.
struct TimeWindow {
  double t_min_ms{-40.0};
  double t_max_ms{105.0};
};

inline constexpr double kBaselineMs = 5.0;

// Sample grid shared by epochs and averaged traces: sample i sits at
// (first_offset + i) / fs seconds from the pulse onset.
struct EpochGrid {
  double fs{0.0};
  std::ptrdiff_t first_offset{0};
  std::size_t length{0};

  double time_ms(std::size_t i) const noexcept {
    return static_cast<double>(first_offset + static_cast<std::ptrdiff_t>(i)) * 1000.0 / fs;
  }
  double dt_ms() const noexcept { return 1000.0 / fs; }
  // Fractional sample index of time t.
  double index_of(double t_ms) const noexcept { return t_ms * fs / 1000.0 - static_cast<double>(first_offset); }
  // First sample at or after t / last sample at or before t, clamped to the grid.
  std::size_t first_at_or_after(double t_ms) const noexcept;
  std::size_t last_at_or_before(double t_ms) const noexcept;

  static EpochGrid make(const TimeWindow& window, double fs_hz);
};

struct EpochSet {
  std::vector<std::vector<double>> epochs;  // pulse x sample, baseline corrected
  TimeWindow window;
  EpochGrid grid;
  std::string channel;
  EpKind kind{EpKind::dcr};
  double artifact_end_ms{0.0};  // pulse width + excision margin
  std::size_t dropped{0};       // pulses whose window left the recording

  std::size_t size() const noexcept { return epochs.size(); }
};

// Averaged, baseline-corrected single-channel response, positive up.
struct EvokedPotential {
  std::vector<double> trace;
  TimeWindow window;
  EpochGrid grid;
  std::size_t n_averaged{0};
  EpKind kind{EpKind::dcr};
  std::string channel;
  double artifact_end_ms{0.0};
  bool inverted{false};
};

// Cuts one epoch per pulse and subtracts the mean of its own [-5, 0) ms.
// Pulses whose window leaves the recording are dropped and counted; throws
// NoValidEpochs if none remain, InvalidSpec for an inconsistent window.
EpochSet extract_epochs(const SignalBuffer& buffer, const StimTrain& train, std::string_view channel,
                        const TimeWindow& window = {}, double extra_ms = 4.0);

// Pointwise mean across epochs. Throws Empty for an empty set.
EvokedPotential average_epochs(const EpochSet& set);

// Subtracts the mean of [-baseline_ms, 0) from a trace on `grid`.
void baseline_correct(std::span<double> trace, const EpochGrid& grid, double baseline_ms = kBaselineMs);

enum class GateMode { any_deflection, n1_amplitude };

struct GateResult {
  bool accept{false};
  double measured_uv{0.0};
};

// Accepts when the measured deflection reaches the threshold (inclusive).
// any_deflection: max |trace| over (artifact end, +100 ms].
// n1_amplitude: depth of the most negative sample in [8, 35] ms.
GateResult amplitude_gate(const EvokedPotential& ep, double threshold_uv = 100.0,
                          GateMode mode = GateMode::any_deflection);

struct StabilityReport {
  double similarity{0.0};  // in [-1, 1]
  bool stable{false};
  std::size_t first_half{0};
  std::size_t second_half{0};
};

// Zero-lag normalised correlation between the averages of the first and
// second halves of the train, over the post-artifact part of the window.
// Throws TooFewEpochs below 4 epochs.
StabilityReport stability_check(const EpochSet& set, double threshold = 0.8);

}  // namespace epkit
