#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epkit/epochs.hpp"
#include "epkit/filter.hpp"

namespace epkit {

enum class RelaxationClass { monotonic, after_positivity };

std::string_view to_string(RelaxationClass c) noexcept;

struct P0Summary {
  double latency_ms{0.0};
  double amplitude_uv{0.0};
};

// Waveform measurements of one evoked potential. Times in ms from pulse
// onset; amplitudes in microvolts, positive up.
struct WaveformMetrics {
  std::optional<double> t_zc1;    // zero crossing entering N1
  std::optional<double> t_zc2;    // zero crossing leaving N1
  std::optional<double> w_n1;     // t_zc2 - t_zc1
  std::optional<double> whq_n1;   // width where trace <= N1_MAXAMP / 4
  double n1_maxamp{0.0};          // signed, negative for a canonical N1
  double n1_latency{0.0};
  double area_40_100{0.0};        // uV*ms
  double min_slope_50_80{0.0};    // uV/ms
  RelaxationClass relaxation_class{RelaxationClass::monotonic};
  std::optional<P0Summary> p0;
  bool inverted{false};
};

struct N1Result {
  double latency_ms{0.0};
  double maxamp_uv{0.0};
  std::optional<double> t_zc1;
  std::optional<double> t_zc2;
  std::optional<double> w_n1;
  std::optional<double> whq_n1;
};

struct MetricsConfig {
  double n1_window_lo_ms{8.0};
  double n1_window_hi_ms{35.0};
  // Zero-phase low-pass applied before any measurement.
  FilterSpec smoothing{FilterSpec::low_pass(200.0, 3, true)};
  bool smooth{true};
  double area_t0_ms{40.0};
  double area_t1_ms{100.0};
  double slope_t0_ms{50.0};
  double slope_t1_ms{80.0};
  // Flip the trace when the dominant extremum of the N1 window is positive.
  bool invert{false};
  // N1 must be deeper than this many baseline RMS.
  double noise_floor_factor{3.0};
};

// Finds N1 as the most negative sample in the N1 window and the bracketing
// zero crossings (linear sub-sample interpolation, nearest to the peak).
// The crossing search before N1 is limited to times after the artifact.
// Throws NoN1 when the window minimum is not below the noise floor; missing
// crossings leave the corresponding fields empty.
N1Result locate_n1(const EvokedPotential& ep, const MetricsConfig& config = {});

// Trapezoidal integral over [t0, t1] ms with interpolated end points.
// Throws WindowOutOfRange when the interval leaves the epoch.
double signed_area(const EvokedPotential& ep, double t0_ms = 40.0, double t1_ms = 100.0);

struct SlopeResult {
  double min_slope{0.0};  // uV/ms
  RelaxationClass relaxation_class{RelaxationClass::monotonic};
};

// Minimum central-difference derivative over [t0, t1] ms.
SlopeResult relaxation_min_slope(const EvokedPotential& ep, double t0_ms = 50.0, double t1_ms = 80.0);

// Low-pass smoothing used ahead of the measurements.
EvokedPotential smooth_trace(const EvokedPotential& ep, const FilterSpec& spec);

// True when the N1 window is dominated by a positive extremum.
bool needs_inversion(const EvokedPotential& ep, const MetricsConfig& config = {});

// Full metric record: optional inversion, smoothing, N1, area, slope, P0.
WaveformMetrics compute_metrics(const EvokedPotential& ep, const MetricsConfig& config = {});

struct OnsetConfig {
  FilterSpec smoothing{FilterSpec::low_pass(250.0, 3, true)};
  double start_after_artifact_ms{2.0};
  double n1_window_lo_ms{8.0};
  double n1_window_hi_ms{35.0};
};

struct TrainOnsets {
  std::vector<double> onsets_ms;
  std::size_t missing{0};
};

// Per-pulse onset (t_zc1) measured on each epoch after zero-phase low-pass
// filtering, searching from artifact end + 2 ms. Throws TooFewEpochs below 5.
TrainOnsets per_train_onsets(const EpochSet& set, const OnsetConfig& config = {});

}  // namespace epkit
