#include "epkit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epkit/error.hpp"

namespace epkit {

namespace {

std::vector<ExcisionWindow> merged(std::vector<ExcisionWindow> windows) {
  std::sort(windows.begin(), windows.end(),
            [](const ExcisionWindow& a, const ExcisionWindow& b) { return a.begin < b.begin; });
  std::vector<ExcisionWindow> out;
  for (const auto& w : windows) {
    if (!out.empty() && w.begin <= out.back().end) {
      out.back().end = std::max(out.back().end, w.end);
    } else {
      out.push_back(w);
    }
  }
  return out;
}

// Maps sample index -> (mains cycle, phase bin). Exact modular arithmetic
// when fs / line_hz is an integer.
class LinePhase {
 public:
  LinePhase(double fs_hz, double line_hz) : ratio_(fs_hz / line_hz) {
    period_ = static_cast<std::size_t>(std::llround(ratio_));
    if (period_ < 2) throw Error(ErrorCode::InvalidSpec, "line frequency too close to fs");
    integral_ = std::abs(ratio_ - static_cast<double>(period_)) < 1e-9;
  }

  std::size_t period() const noexcept { return period_; }
  bool integral() const noexcept { return integral_; }

  std::size_t cycle(std::size_t n) const noexcept {
    if (integral_) return n / period_;
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) / ratio_));
  }
  std::size_t bin(std::size_t n) const noexcept {
    if (integral_) return n % period_;
    const double phase = static_cast<double>(n) / ratio_;
    const double frac = phase - std::floor(phase);
    return static_cast<std::size_t>(std::llround(frac * static_cast<double>(period_))) % period_;
  }

 private:
  double ratio_;
  std::size_t period_{0};
  bool integral_{true};
};

double mean(std::span<const double> x) {
  return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double correlation(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<ExcisionWindow> excision_windows(const StimTrain& train, double fs_hz, double extra_ms) {
  if (!(extra_ms >= 0.0)) throw Error(ErrorCode::InvalidSpec, "extra_ms must be non-negative");
  const auto length = static_cast<std::size_t>(std::llround((train.pulse_width_ms() + extra_ms) * fs_hz / 1000.0));
  std::vector<ExcisionWindow> windows;
  windows.reserve(train.n_pulses());
  for (std::size_t onset : train.pulse_onsets()) windows.push_back({onset, onset + std::max<std::size_t>(length, 1)});
  return merged(std::move(windows));
}

SignalBuffer excise_windows(const SignalBuffer& buffer, std::span<const ExcisionWindow> windows) {
  const std::size_t n = buffer.n_samples();
  const auto ordered = merged({windows.begin(), windows.end()});
  for (const auto& w : ordered) {
    if (w.begin < 1 || w.end >= n) {
      throw Error(ErrorCode::WindowOutOfRange,
                  "excision window [" + std::to_string(w.begin) + ", " + std::to_string(w.end) +
                      ") has no bounding samples inside the recording");
    }
  }
  auto data = buffer.data();
  for (auto& ch : data) {
    for (const auto& w : ordered) {
      const double left = ch[w.begin - 1];
      const double right = ch[w.end];
      const double span = static_cast<double>(w.end - w.begin + 1);
      for (std::size_t i = w.begin; i < w.end; ++i) {
        ch[i] = left + (right - left) * static_cast<double>(i - w.begin + 1) / span;
      }
    }
  }
  return SignalBuffer(std::move(data), buffer.fs(), buffer.channel_ids());
}

SignalBuffer excise_artifact(const SignalBuffer& buffer, const StimTrain& train, double extra_ms) {
  const auto windows = excision_windows(train, buffer.fs(), extra_ms);
  return excise_windows(buffer, windows);
}

double LineNoiseTemplate::rms() const noexcept {
  if (pattern.empty()) return 0.0;
  double s = 0.0;
  for (double v : pattern) s += v * v;
  return std::sqrt(s / static_cast<double>(pattern.size()));
}

LineNoiseTemplate estimate_line_template(const SignalBuffer& buffer, std::string_view channel,
                                         std::span<const ExcisionWindow> exclude, double line_hz) {
  const LinePhase phase(buffer.fs(), line_hz);
  const auto x = buffer.channel(channel);
  const std::size_t n = x.size();
  const std::size_t period = phase.period();

  // Cycles touching an excluded window, and the final partial cycle, are skipped.
  const std::size_t n_cycles = phase.cycle(n - 1) + 1;
  std::vector<char> skip(n_cycles, 0);
  skip.back() = phase.cycle(n - 1) == phase.cycle(n) ? 1 : 0;
  for (const auto& w : exclude) {
    if (w.begin >= n) continue;
    const std::size_t last = std::min(w.end, n) - 1;
    for (std::size_t c = phase.cycle(w.begin); c <= phase.cycle(last); ++c) skip[c] = 1;
  }

  std::vector<double> sum(period, 0.0);
  std::vector<std::size_t> hits(period, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (skip[phase.cycle(i)]) continue;
    const std::size_t b = phase.bin(i);
    sum[b] += x[i];
    ++hits[b];
  }
  const auto used = static_cast<std::size_t>(std::count(skip.begin(), skip.end(), 0));
  if (used < kMinLinePeriods) {
    throw Error(ErrorCode::TooShort, "only " + std::to_string(used) + " clean mains periods on channel '" +
                                         std::string(channel) + "', need " + std::to_string(kMinLinePeriods));
  }

  LineNoiseTemplate t;
  t.channel = std::string(channel);
  t.period_samples = period;
  t.line_hz = line_hz;
  t.periods_used = used;
  t.resampled = !phase.integral();
  t.pattern.resize(period);
  for (std::size_t b = 0; b < period; ++b) t.pattern[b] = hits[b] ? sum[b] / static_cast<double>(hits[b]) : 0.0;
  const double m = mean(t.pattern);
  for (double& v : t.pattern) v -= m;
  return t;
}

SignalBuffer subtract_line_noise(const SignalBuffer& buffer, std::span<const LineNoiseTemplate> templates,
                                 std::span<const std::string> channels) {
  std::vector<std::string> targets(channels.begin(), channels.end());
  if (targets.empty()) targets = buffer.channel_ids();
  auto data = buffer.data();
  for (const auto& id : targets) {
    auto it = std::find_if(templates.begin(), templates.end(),
                           [&](const LineNoiseTemplate& t) { return t.channel == id; });
    if (it == templates.end()) throw Error(ErrorCode::MissingTemplate, "no line template for channel '" + id + "'");
    const LinePhase phase(buffer.fs(), it->line_hz);
    if (phase.period() != it->pattern.size()) {
      throw Error(ErrorCode::MissingTemplate, "template for '" + id + "' has the wrong period");
    }
    auto& ch = data[buffer.index_of(id)];
    for (std::size_t i = 0; i < ch.size(); ++i) ch[i] -= it->pattern[phase.bin(i)];
  }
  return SignalBuffer(std::move(data), buffer.fs(), buffer.channel_ids());
}

LineCleanResult clean_line_noise(const SignalBuffer& buffer, std::span<const ExcisionWindow> exclude,
                                 double line_hz) {
  std::vector<LineNoiseTemplate> templates;
  templates.reserve(buffer.n_channels());
  for (const auto& id : buffer.channel_ids()) {
    templates.push_back(estimate_line_template(buffer, id, exclude, line_hz));
  }
  const auto ref = std::max_element(templates.begin(), templates.end(),
                                    [](const auto& a, const auto& b) { return a.rms() < b.rms(); });
  std::vector<double> similarity;
  for (const auto& t : templates) similarity.push_back(correlation(t.pattern, ref->pattern));
  std::string reference = ref->channel;
  auto cleaned = subtract_line_noise(buffer, templates);
  return {std::move(cleaned), std::move(templates), std::move(reference), std::move(similarity)};
}

SignalBuffer apply_filter(const SignalBuffer& buffer, const FilterSpec& spec) {
  const SosFilter f = design_butterworth(spec, buffer.fs());
  auto data = buffer.data();
  for (auto& ch : data) ch = spec.zero_phase ? f.filtfilt(ch) : f.filter(ch);
  return SignalBuffer(std::move(data), buffer.fs(), buffer.channel_ids());
}

PreprocessResult preprocess_session(const Session& session, const PreprocessConfig& config) {
  std::vector<ExcisionWindow> windows;
  for (const auto& train : session.trains) {
    const auto w = excision_windows(train, session.buffer.fs(), config.extra_ms);
    windows.insert(windows.end(), w.begin(), w.end());
  }
  windows = merged(std::move(windows));

  PreprocessResult result{session, {}, {}, {}};
  Session& out = result.session;
  if (!windows.empty()) {
    out.buffer = excise_windows(out.buffer, windows);
    out.processing.push_back("excise");
  }
  if (config.remove_line_noise) {
    auto cleaned = clean_line_noise(out.buffer, windows, config.line_hz);
    out.buffer = std::move(cleaned.buffer);
    result.reference_channel = cleaned.reference_channel;
    for (std::size_t i = 0; i < cleaned.templates.size(); ++i) {
      if (cleaned.templates[i].resampled) {
        result.warnings.push_back("fs/line ratio is not an integer on '" + cleaned.templates[i].channel +
                                  "'; template phase binned to nearest sample");
      }
    }
    result.templates = std::move(cleaned.templates);
    std::ostringstream step;
    step << "line" << config.line_hz;
    out.processing.push_back(step.str());
  }
  if (config.band_pass) {
    out.buffer = apply_filter(out.buffer, config.filter);
    out.processing.push_back("bandpass");
  }
  return result;
}

}  // namespace epkit
