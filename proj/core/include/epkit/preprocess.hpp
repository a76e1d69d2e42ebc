#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epkit/filter.hpp"
#include "epkit/signal.hpp"

namespace epkit {

// Half-open sample range [begin, end) replaced by interpolation.
struct ExcisionWindow {
  std::size_t begin{0};
  std::size_t end{0};

  bool overlaps(std::size_t lo, std::size_t hi) const noexcept { return begin < hi && lo < end; }
};

inline constexpr double kDefaultExtraMs = 4.0;

// Windows [onset, onset + pulse_width + extra_ms) for every pulse of the
// train, merged when they touch.
std::vector<ExcisionWindow> excision_windows(const StimTrain& train, double fs_hz,
                                             double extra_ms = kDefaultExtraMs);

// Replaces each excision window by the straight line joining the last sample
// before it and the first sample after it, on every channel. Throws
// WindowOutOfRange if a window has no bounding sample on either side.
SignalBuffer excise_artifact(const SignalBuffer& buffer, const StimTrain& train,
                             double extra_ms = kDefaultExtraMs);
SignalBuffer excise_windows(const SignalBuffer& buffer, std::span<const ExcisionWindow> windows);

inline constexpr double kLineHz = 50.0;
inline constexpr std::size_t kMinLinePeriods = 40;

// Phase-locked average of one mains period on one channel. Phase is anchored
// at sample 0 of the recording.
struct LineNoiseTemplate {
  std::string channel;
  std::vector<double> pattern;  // round(fs / line_hz) samples, zero mean
  std::size_t period_samples{0};
  double line_hz{kLineHz};
  std::size_t periods_used{0};
  // fs / line_hz is not an integer: samples are binned by nearest phase.
  bool resampled{false};

  double rms() const noexcept;
};

// Averages the mains periods of `channel` that do not overlap any excluded
// window. Throws TooShort when fewer than 40 clean periods remain.
LineNoiseTemplate estimate_line_template(const SignalBuffer& buffer, std::string_view channel,
                                         std::span<const ExcisionWindow> exclude = {},
                                         double line_hz = kLineHz);

// Tiles each channel's template at the common phase and subtracts it.
// `channels` lists the channels to clean (all channels when empty); throws
// MissingTemplate if one of them has no template.
SignalBuffer subtract_line_noise(const SignalBuffer& buffer, std::span<const LineNoiseTemplate> templates,
                                 std::span<const std::string> channels = {});

struct LineCleanResult {
  SignalBuffer buffer;
  std::vector<LineNoiseTemplate> templates;
  std::string reference_channel;          // noisiest channel, locks the phase
  std::vector<double> reference_similarity;  // per channel, correlation with the reference pattern
};

// Template on the noisiest channel first, then a channel-specific template on
// every channel, subtracted channel by channel.
LineCleanResult clean_line_noise(const SignalBuffer& buffer, std::span<const ExcisionWindow> exclude = {},
                                 double line_hz = kLineHz);

// Filters every channel. Throws InvalidSpec when the filter does not fit fs.
SignalBuffer apply_filter(const SignalBuffer& buffer, const FilterSpec& spec);

struct PreprocessConfig {
  double extra_ms{kDefaultExtraMs};
  bool remove_line_noise{true};
  double line_hz{kLineHz};
  bool band_pass{true};
  FilterSpec filter{FilterSpec::band_pass(1.0, 1000.0, 2, true)};
};

struct PreprocessResult {
  Session session;
  std::vector<LineNoiseTemplate> templates;
  std::string reference_channel;
  std::vector<std::string> warnings;
};

// Artifact excision for every train, then mains cleaning with the excision
// windows excluded, then band-pass filtering. Records the applied steps in
// session.processing ("excise", "line50", "bandpass").
PreprocessResult preprocess_session(const Session& session, const PreprocessConfig& config = {});

}  // namespace epkit
