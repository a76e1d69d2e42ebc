#include "epkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "epkit/error.hpp"

namespace epkit {

namespace {

struct Trace {
  std::span<const double> x;
  const EpochGrid& grid;

  double t(std::size_t i) const { return grid.time_ms(i); }
  double dt() const { return grid.dt_ms(); }
};

// Crossing of `level` between samples i and i+1 by linear interpolation.
double crossing(const Trace& tr, std::size_t i, double level) {
  const double a = tr.x[i] - level;
  const double b = tr.x[i + 1] - level;
  if (a == b) return tr.t(i);
  return tr.t(i) + a / (a - b) * tr.dt();
}

// Last crossing to >= level strictly before `peak`, not earlier than `start`.
std::optional<double> crossing_before(const Trace& tr, std::size_t peak, std::size_t start, double level) {
  for (std::size_t i = peak; i-- > start;) {
    if (tr.x[i] >= level) return crossing(tr, i, level);
  }
  return std::nullopt;
}

std::optional<double> crossing_after(const Trace& tr, std::size_t peak, double level) {
  for (std::size_t j = peak + 1; j < tr.x.size(); ++j) {
    if (tr.x[j] >= level) return crossing(tr, j - 1, level);
  }
  return std::nullopt;
}

std::size_t argmin_in(std::span<const double> x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i <= hi && i < x.size(); ++i) {
    if (x[i] < x[best]) best = i;
  }
  return best;
}

double baseline_rms(const EvokedPotential& ep) {
  const std::size_t hi = ep.grid.first_at_or_after(0.0);
  if (hi == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < hi; ++i) s += ep.trace[i] * ep.trace[i];
  return std::sqrt(s / static_cast<double>(hi));
}

double value_at(const Trace& tr, double t_ms) {
  const double idx = tr.grid.index_of(t_ms);
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(idx), 0.0, static_cast<double>(tr.x.size() - 2)));
  const double frac = idx - static_cast<double>(i);
  return tr.x[i] + (tr.x[i + 1] - tr.x[i]) * frac;
}

}  // namespace

std::string_view to_string(RelaxationClass c) noexcept {
  return c == RelaxationClass::monotonic ? "monotonic" : "after-positivity";
}

N1Result locate_n1(const EvokedPotential& ep, const MetricsConfig& config) {
  const Trace tr{ep.trace, ep.grid};
  if (ep.trace.size() < 3) throw Error(ErrorCode::NoN1, "trace too short");
  const std::size_t lo = ep.grid.first_at_or_after(config.n1_window_lo_ms);
  const std::size_t hi = ep.grid.last_at_or_before(config.n1_window_hi_ms);
  if (lo >= ep.trace.size() || hi < lo) throw Error(ErrorCode::NoN1, "N1 window lies outside the epoch");

  const std::size_t peak = argmin_in(ep.trace, lo, hi);
  const double floor = config.noise_floor_factor * baseline_rms(ep);
  if (!(ep.trace[peak] < 0.0) || !(ep.trace[peak] < -floor)) {
    throw Error(ErrorCode::NoN1, "no negative extremum below the noise floor in the N1 window");
  }

  N1Result r;
  r.latency_ms = tr.t(peak);
  r.maxamp_uv = ep.trace[peak];
  const std::size_t start = ep.grid.first_at_or_after(ep.artifact_end_ms);
  r.t_zc1 = crossing_before(tr, peak, start, 0.0);
  r.t_zc2 = crossing_after(tr, peak, 0.0);
  if (r.t_zc1 && r.t_zc2) r.w_n1 = *r.t_zc2 - *r.t_zc1;

  const double quarter = r.maxamp_uv / 4.0;
  // The quarter level can be found below a sub-sample crossing, so search the whole trace.
  const auto left = crossing_before(tr, peak, 0, quarter);
  const auto right = crossing_after(tr, peak, quarter);
  if (left && right) r.whq_n1 = *right - *left;
  return r;
}

double signed_area(const EvokedPotential& ep, double t0_ms, double t1_ms) {
  const Trace tr{ep.trace, ep.grid};
  if (ep.trace.size() < 2) throw Error(ErrorCode::WindowOutOfRange, "trace too short");
  const double first = tr.t(0), last = tr.t(ep.trace.size() - 1);
  constexpr double eps = 1e-9;
  if (!(t0_ms <= t1_ms) || t0_ms < first - eps || t1_ms > last + eps) {
    throw Error(ErrorCode::WindowOutOfRange, "area window [" + std::to_string(t0_ms) + ", " +
                                                 std::to_string(t1_ms) + "] ms leaves the epoch");
  }
  const std::size_t a = ep.grid.first_at_or_after(t0_ms);
  const std::size_t b = ep.grid.last_at_or_before(t1_ms);
  if (a > b) {
    return 0.5 * (value_at(tr, t0_ms) + value_at(tr, t1_ms)) * (t1_ms - t0_ms);
  }
  double area = 0.5 * (value_at(tr, t0_ms) + ep.trace[a]) * (tr.t(a) - t0_ms);
  for (std::size_t i = a; i < b; ++i) area += 0.5 * (ep.trace[i] + ep.trace[i + 1]) * tr.dt();
  area += 0.5 * (ep.trace[b] + value_at(tr, t1_ms)) * (t1_ms - tr.t(b));
  return area;
}

SlopeResult relaxation_min_slope(const EvokedPotential& ep, double t0_ms, double t1_ms) {
  const Trace tr{ep.trace, ep.grid};
  const std::size_t n = ep.trace.size();
  if (n < 3 || !(t0_ms < t1_ms) || t0_ms < tr.t(1) - 1e-9 || t1_ms > tr.t(n - 2) + 1e-9) {
    throw Error(ErrorCode::WindowOutOfRange, "slope window leaves the epoch");
  }
  const std::size_t a = std::max<std::size_t>(ep.grid.first_at_or_after(t0_ms), 1);
  const std::size_t b = std::min(ep.grid.last_at_or_before(t1_ms), n - 2);
  SlopeResult r;
  r.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = a; i <= b; ++i) {
    r.min_slope = std::min(r.min_slope, (ep.trace[i + 1] - ep.trace[i - 1]) / (2.0 * tr.dt()));
  }
  r.relaxation_class = r.min_slope < 0.0 ? RelaxationClass::after_positivity : RelaxationClass::monotonic;
  return r;
}

EvokedPotential smooth_trace(const EvokedPotential& ep, const FilterSpec& spec) {
  EvokedPotential out = ep;
  out.trace = apply_filter(ep.trace, spec, ep.grid.fs);
  return out;
}

bool needs_inversion(const EvokedPotential& ep, const MetricsConfig& config) {
  const std::size_t lo = ep.grid.first_at_or_after(config.n1_window_lo_ms);
  const std::size_t hi = std::min(ep.grid.last_at_or_before(config.n1_window_hi_ms), ep.trace.size() - 1);
  double top = 0.0, bottom = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    top = std::max(top, ep.trace[i]);
    bottom = std::min(bottom, ep.trace[i]);
  }
  return top > -bottom;
}

WaveformMetrics compute_metrics(const EvokedPotential& ep, const MetricsConfig& config) {
  EvokedPotential work = ep;
  WaveformMetrics m;
  if (config.invert && needs_inversion(work, config)) {
    for (double& v : work.trace) v = -v;
    work.inverted = !work.inverted;
  }
  m.inverted = work.inverted;
  if (config.smooth) work = smooth_trace(work, config.smoothing);

  const N1Result n1 = locate_n1(work, config);
  m.n1_latency = n1.latency_ms;
  m.n1_maxamp = n1.maxamp_uv;
  m.t_zc1 = n1.t_zc1;
  m.t_zc2 = n1.t_zc2;
  m.w_n1 = n1.w_n1;
  m.whq_n1 = n1.whq_n1;
  m.area_40_100 = signed_area(work, config.area_t0_ms, config.area_t1_ms);
  const SlopeResult slope = relaxation_min_slope(work, config.slope_t0_ms, config.slope_t1_ms);
  m.min_slope_50_80 = slope.min_slope;
  m.relaxation_class = slope.relaxation_class;

  const std::size_t lo = work.grid.first_at_or_after(work.artifact_end_ms);
  const double p0_end = m.t_zc1 ? *m.t_zc1 : n1.latency_ms;
  const std::size_t hi = std::min(work.grid.last_at_or_before(p0_end), work.trace.size() - 1);
  std::optional<std::size_t> best;
  for (std::size_t i = lo; i <= hi && i < work.trace.size(); ++i) {
    if (work.trace[i] > 0.0 && (!best || work.trace[i] > work.trace[*best])) best = i;
  }
  if (best) m.p0 = P0Summary{work.grid.time_ms(*best), work.trace[*best]};
  return m;
}

TrainOnsets per_train_onsets(const EpochSet& set, const OnsetConfig& config) {
  if (set.epochs.size() < 5) throw Error(ErrorCode::TooFewEpochs, "per-train onsets need at least 5 epochs");
  const SosFilter lp = design_butterworth(config.smoothing, set.grid.fs);
  const double search_from = set.artifact_end_ms + config.start_after_artifact_ms;
  const std::size_t start = set.grid.first_at_or_after(search_from);
  const std::size_t lo = set.grid.first_at_or_after(std::max(search_from, config.n1_window_lo_ms));
  const std::size_t hi = set.grid.last_at_or_before(config.n1_window_hi_ms);

  TrainOnsets out;
  for (const auto& epoch : set.epochs) {
    const auto y = config.smoothing.zero_phase ? lp.filtfilt(epoch) : lp.filter(epoch);
    const Trace tr{y, set.grid};
    const std::size_t peak = argmin_in(y, lo, hi);
    std::optional<double> onset;
    if (y[peak] < 0.0) onset = crossing_before(tr, peak, start, 0.0);
    if (onset) out.onsets_ms.push_back(*onset);
    else ++out.missing;
  }
  return out;
}

}  // namespace epkit
