#include "epkit/epochs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epkit/error.hpp"

namespace epkit {

namespace {

constexpr double kGridEps = 1e-9;

std::vector<double> mean_of(std::span<const std::vector<double>> rows, std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < length; ++i) out[i] += r[i];
  }
  const double n = static_cast<double>(rows.size());
  for (double& v : out) v /= n;
  return out;
}

// First sample strictly after t.
std::size_t first_after(const EpochGrid& grid, double t_ms) {
  std::size_t i = grid.first_at_or_after(t_ms);
  if (i < grid.length && std::abs(grid.time_ms(i) - t_ms) < kGridEps * 1000.0 / grid.fs) ++i;
  return i;
}

}  // namespace

std::size_t EpochGrid::first_at_or_after(double t_ms) const noexcept {
  const double idx = std::ceil(index_of(t_ms) - kGridEps);
  if (idx <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), length);
}

std::size_t EpochGrid::last_at_or_before(double t_ms) const noexcept {
  const double idx = std::floor(index_of(t_ms) + kGridEps);
  if (idx <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), length == 0 ? 0 : length - 1);
}

EpochGrid EpochGrid::make(const TimeWindow& window, double fs_hz) {
  if (!(window.t_min_ms < 0.0 && window.t_max_ms > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "epoch window must satisfy t_min < 0 < t_max");
  }
  EpochGrid g;
  g.fs = fs_hz;
  g.first_offset = static_cast<std::ptrdiff_t>(std::llround(window.t_min_ms * fs_hz / 1000.0));
  const auto last = static_cast<std::ptrdiff_t>(std::llround(window.t_max_ms * fs_hz / 1000.0));
  g.length = static_cast<std::size_t>(last - g.first_offset);
  return g;
}

void baseline_correct(std::span<double> trace, const EpochGrid& grid, double baseline_ms) {
  const std::size_t lo = grid.first_at_or_after(-baseline_ms);
  const std::size_t hi = grid.first_at_or_after(0.0);
  if (hi <= lo) throw Error(ErrorCode::InvalidSpec, "baseline interval is empty");
  const double m = std::accumulate(trace.begin() + static_cast<std::ptrdiff_t>(lo),
                                   trace.begin() + static_cast<std::ptrdiff_t>(hi), 0.0) /
                   static_cast<double>(hi - lo);
  for (double& v : trace) v -= m;
}

EpochSet extract_epochs(const SignalBuffer& buffer, const StimTrain& train, std::string_view channel,
                        const TimeWindow& window, double extra_ms) {
  if (window.t_min_ms > -kBaselineMs) {
    throw Error(ErrorCode::InvalidSpec, "epoch window must include the 5 ms pre-stimulus baseline");
  }
  EpochSet set;
  set.window = window;
  set.grid = EpochGrid::make(window, buffer.fs());
  set.channel = std::string(channel);
  set.kind = train.kind();
  set.artifact_end_ms = train.pulse_width_ms() + extra_ms;

  const auto x = buffer.channel(channel);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::size_t onset : train.pulse_onsets()) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(onset) + set.grid.first_offset;
    if (start < 0 || start + static_cast<std::ptrdiff_t>(set.grid.length) > n) {
      ++set.dropped;
      continue;
    }
    std::vector<double> epoch(x.begin() + start, x.begin() + start + static_cast<std::ptrdiff_t>(set.grid.length));
    baseline_correct(epoch, set.grid);
    set.epochs.push_back(std::move(epoch));
  }
  if (set.epochs.empty()) throw Error(ErrorCode::NoValidEpochs, "no pulse has a complete epoch window");
  return set;
}

EvokedPotential average_epochs(const EpochSet& set) {
  if (set.epochs.empty()) throw Error(ErrorCode::Empty, "cannot average an empty epoch set");
  EvokedPotential ep;
  ep.trace = mean_of(set.epochs, set.grid.length);
  ep.window = set.window;
  ep.grid = set.grid;
  ep.n_averaged = set.epochs.size();
  ep.kind = set.kind;
  ep.channel = set.channel;
  ep.artifact_end_ms = set.artifact_end_ms;
  return ep;
}

GateResult amplitude_gate(const EvokedPotential& ep, double threshold_uv, GateMode mode) {
  if (ep.trace.empty()) throw Error(ErrorCode::Empty, "empty trace");
  GateResult r;
  if (mode == GateMode::any_deflection) {
    const std::size_t lo = first_after(ep.grid, ep.artifact_end_ms);
    const std::size_t hi = ep.grid.last_at_or_before(100.0);
    for (std::size_t i = lo; i <= hi && i < ep.trace.size(); ++i) {
      r.measured_uv = std::max(r.measured_uv, std::abs(ep.trace[i]));
    }
  } else {
    const std::size_t lo = ep.grid.first_at_or_after(8.0);
    const std::size_t hi = ep.grid.last_at_or_before(35.0);
    double depth = 0.0;
    for (std::size_t i = lo; i <= hi && i < ep.trace.size(); ++i) depth = std::max(depth, -ep.trace[i]);
    r.measured_uv = depth;
  }
  r.accept = r.measured_uv >= threshold_uv;
  return r;
}

StabilityReport stability_check(const EpochSet& set, double threshold) {
  if (set.epochs.size() < 4) {
    throw Error(ErrorCode::TooFewEpochs, "stability check needs at least 4 epochs");
  }
  const std::size_t half = set.epochs.size() / 2;
  std::span<const std::vector<double>> rows(set.epochs);
  const auto a = mean_of(rows.first(half), set.grid.length);
  const auto b = mean_of(rows.subspan(half), set.grid.length);

  const std::size_t lo = first_after(set.grid, set.artifact_end_ms);
  const std::size_t hi = set.grid.length;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    ma += a[i];
    mb += b[i];
  }
  const double count = static_cast<double>(hi - lo);
  ma /= count;
  mb /= count;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  StabilityReport r;
  r.first_half = half;
  r.second_half = set.epochs.size() - half;
  r.similarity = (saa > 0.0 && sbb > 0.0) ? std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0) : 0.0;
  r.stable = r.similarity >= threshold;
  return r;
}

}  // namespace epkit
