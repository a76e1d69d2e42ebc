#include "epkit/signal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "epkit/error.hpp"

namespace epkit {

std::string_view to_string(EpKind kind) noexcept { return kind == EpKind::dcr ? "DCR" : "ACEP"; }

EpKind parse_kind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "DCR") return EpKind::dcr;
  if (upper == "ACEP") return EpKind::acep;
  throw Error(ErrorCode::InvalidManifest, "unknown response kind '" + std::string(text) + "'");
}

double euclidean_distance(const Point3& a, const Point3& b) {
  for (double v : {a.x, a.y, a.z, b.x, b.y, b.z}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "coordinate is not finite");
  }
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

SignalBuffer::SignalBuffer(std::vector<std::vector<double>> samples, double fs_hz,
                           std::vector<std::string> channel_ids)
    : samples_(std::move(samples)), fs_(fs_hz), ids_(std::move(channel_ids)) {
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw Error(ErrorCode::InvalidManifest, "sampling rate must be positive");
  }
  if (samples_.empty()) throw Error(ErrorCode::InvalidManifest, "no channels");
  if (ids_.size() != samples_.size()) {
    throw Error(ErrorCode::InvalidManifest, "channel id count does not match channel count");
  }
  const std::size_t n = samples_.front().size();
  if (n == 0) throw Error(ErrorCode::InvalidManifest, "buffer has no samples");
  for (const auto& ch : samples_) {
    if (ch.size() != n) throw Error(ErrorCode::InvalidManifest, "channels differ in length");
  }
  std::vector<std::string> sorted = ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidManifest, "duplicate channel id");
  }
}

std::size_t SignalBuffer::index_of(std::string_view id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw Error(ErrorCode::InvalidSpec, "unknown channel '" + std::string(id) + "'");
  return static_cast<std::size_t>(it - ids_.begin());
}

bool SignalBuffer::has_channel(std::string_view id) const noexcept {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

std::ptrdiff_t SignalBuffer::ms_to_samples(double ms) const noexcept {
  return static_cast<std::ptrdiff_t>(std::llround(ms * fs_ / 1000.0));
}

SignalBuffer SignalBuffer::with_channel(std::size_t index, std::vector<double> data) const {
  auto copy = samples_;
  copy.at(index) = std::move(data);
  return SignalBuffer(std::move(copy), fs_, ids_);
}

StimTrain::StimTrain(EpKind kind, double f_des_hz, double pulse_width_ms,
                     std::vector<std::size_t> pulse_onsets, std::vector<int> polarity_pattern,
                     Point3 site_mm, double fs_hz)
    : kind_(kind),
      f_des_(f_des_hz),
      pulse_width_ms_(pulse_width_ms),
      onsets_(std::move(pulse_onsets)),
      polarity_(std::move(polarity_pattern)),
      site_(site_mm) {
  if (onsets_.empty()) throw Error(ErrorCode::InvalidManifest, "train has no pulses");
  if (!(pulse_width_ms_ > 0.0) || !std::isfinite(pulse_width_ms_)) {
    throw Error(ErrorCode::InvalidManifest, "pulse width must be positive");
  }
  if (!(f_des_ > 0.0) || !std::isfinite(f_des_)) {
    throw Error(ErrorCode::InvalidManifest, "stimulation frequency must be positive");
  }
  if (!(fs_hz > 0.0)) throw Error(ErrorCode::InvalidManifest, "sampling rate must be positive");
  if (polarity_.empty()) polarity_ = {1};
  for (int p : polarity_) {
    if (p != 1 && p != -1) throw Error(ErrorCode::InvalidManifest, "polarity entries must be +1 or -1");
  }
  for (double v : {site_.x, site_.y, site_.z}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidManifest, "site coordinate not finite");
  }
  const double period = fs_hz / f_des_;
  for (std::size_t i = 1; i < onsets_.size(); ++i) {
    if (onsets_[i] <= onsets_[i - 1]) {
      throw Error(ErrorCode::InvalidManifest, "pulse onsets must be strictly increasing");
    }
    const double spacing = static_cast<double>(onsets_[i] - onsets_[i - 1]);
    if (std::abs(spacing - period) > 0.01 * period) {
      throw Error(ErrorCode::InvalidManifest,
                  "pulse spacing " + std::to_string(spacing) + " samples inconsistent with f_des");
    }
  }
}

std::vector<std::size_t> regular_onsets(std::size_t first, std::size_t count, double f_des_hz,
                                        double fs_hz) {
  std::vector<std::size_t> out;
  out.reserve(count);
  const double period = fs_hz / f_des_hz;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(first + static_cast<std::size_t>(std::llround(static_cast<double>(i) * period)));
  }
  return out;
}

bool Session::has_step(std::string_view step) const noexcept {
  return std::find(processing.begin(), processing.end(), step) != processing.end();
}

void validate(const Session& session) {
  const std::size_t n = session.buffer.n_samples();
  const double fs = session.buffer.fs();
  struct Span {
    std::size_t begin, end;
  };
  std::vector<Span> spans;
  for (const auto& train : session.trains) {
    const auto& onsets = train.pulse_onsets();
    if (onsets.back() >= n) {
      throw Error(ErrorCode::InvalidManifest, "pulse onset beyond end of recording");
    }
    const auto width = static_cast<std::size_t>(std::ceil(train.pulse_width_ms() * fs / 1000.0));
    spans.push_back({onsets.front(), onsets.back() + width});
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.begin < b.begin; });
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].begin < spans[i - 1].end) {
      throw Error(ErrorCode::InvalidManifest, "stimulation trains overlap in time");
    }
  }
  if (session.geometry) {
    for (const auto& id : session.buffer.channel_ids()) {
      if (!session.geometry->positions.contains(id)) {
        throw Error(ErrorCode::InvalidManifest, "channel '" + id + "' has no position");
      }
    }
    for (const auto& [name, p] : session.geometry->positions) {
      for (double v : {p.x, p.y, p.z}) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidManifest, "position of '" + name + "' not finite");
      }
    }
  }
}

}  // namespace epkit
