#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epkit {

enum class EpKind { dcr, acep };

std::string_view to_string(EpKind kind) noexcept;
// Accepts "DCR"/"ACEP" in any case; throws InvalidManifest otherwise.
EpKind parse_kind(std::string_view text);

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  bool operator==(const Point3&) const = default;
};

// Straight-line distance in millimetres. Throws NonFinite for NaN/inf input.
double euclidean_distance(const Point3& a, const Point3& b);

// Uniformly sampled multichannel voltage trace (microvolts).
//
// Channels all have the same length. Time is addressed by sample index;
// ms_to_samples/samples_to_ms convert at the buffer's rate.
class SignalBuffer {
 public:
  SignalBuffer(std::vector<std::vector<double>> samples, double fs_hz,
               std::vector<std::string> channel_ids);

  double fs() const noexcept { return fs_; }
  std::size_t n_channels() const noexcept { return samples_.size(); }
  std::size_t n_samples() const noexcept { return samples_.front().size(); }
  const std::vector<std::string>& channel_ids() const noexcept { return ids_; }

  std::span<const double> channel(std::size_t index) const { return samples_.at(index); }
  std::span<const double> channel(std::string_view id) const { return channel(index_of(id)); }
  // Throws InvalidSpec when the id is unknown.
  std::size_t index_of(std::string_view id) const;
  bool has_channel(std::string_view id) const noexcept;

  double samples_to_ms(double n) const noexcept { return n * 1000.0 / fs_; }
  std::ptrdiff_t ms_to_samples(double ms) const noexcept;

  // Copy with one channel replaced.
  SignalBuffer with_channel(std::size_t index, std::vector<double> data) const;
  const std::vector<std::vector<double>>& data() const noexcept { return samples_; }

 private:
  std::vector<std::vector<double>> samples_;
  double fs_;
  std::vector<std::string> ids_;
};

// Stimulation train metadata. Onsets come from the stimulator log, not from
// artifact detection.
class StimTrain {
 public:
  StimTrain(EpKind kind, double f_des_hz, double pulse_width_ms,
            std::vector<std::size_t> pulse_onsets, std::vector<int> polarity_pattern,
            Point3 site_mm, double fs_hz);

  EpKind kind() const noexcept { return kind_; }
  double f_des_hz() const noexcept { return f_des_; }
  double pulse_width_ms() const noexcept { return pulse_width_ms_; }
  const std::vector<std::size_t>& pulse_onsets() const noexcept { return onsets_; }
  std::size_t n_pulses() const noexcept { return onsets_.size(); }
  const std::vector<int>& polarity_pattern() const noexcept { return polarity_; }
  // Pattern is cycled when shorter than the pulse count.
  int polarity(std::size_t pulse) const noexcept { return polarity_[pulse % polarity_.size()]; }
  const Point3& site() const noexcept { return site_; }

 private:
  EpKind kind_;
  double f_des_;
  double pulse_width_ms_;
  std::vector<std::size_t> onsets_;
  std::vector<int> polarity_;
  Point3 site_;
};

// Evenly spaced onsets for a train of `count` pulses starting at `first`.
std::vector<std::size_t> regular_onsets(std::size_t first, std::size_t count, double f_des_hz,
                                        double fs_hz);

struct ElectrodeGeometry {
  std::map<std::string, Point3> positions;  // channel id -> mm
  std::map<std::string, Point3> des_sites;  // named stimulation sites -> mm
};

struct Session {
  SignalBuffer buffer;
  std::vector<StimTrain> trains;
  std::optional<ElectrodeGeometry> geometry;
  std::string patient_label;
  // Processing steps already applied, in order (e.g. "excise", "line50").
  std::vector<std::string> processing;

  bool has_step(std::string_view step) const noexcept;
};

// Checks the cross-object invariants of a session: onsets inside the buffer,
// non-overlapping trains, geometry covering every channel. Throws
// InvalidManifest on violation.
void validate(const Session& session);

}  // namespace epkit
