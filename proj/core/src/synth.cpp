#include "epkit/synth.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "epkit/error.hpp"

namespace epkit {

namespace {

constexpr double kScanStepMs = 0.05;
constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

double raised_cosine(const CosineLobe& lobe, double t) noexcept {
  const double x = t - lobe.latency_ms;
  if (std::abs(x) >= lobe.width_ms / 2.0) return 0.0;
  return lobe.amplitude_uv * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * x / lobe.width_ms));
}

double n1_shape(const N1Lobe& n1, double u) noexcept {
  if (u <= 0.0) return 0.0;
  const double ramp = n1.onset_ms > 0.0 ? -std::expm1(-(u / n1.onset_ms) * (u / n1.onset_ms)) : 1.0;
  return ramp * (std::exp(-u / n1.decay_ms) - std::exp(-u / n1.rise_ms)) * (1.0 - u / n1.return_ms);
}

bool finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// Walks from `from` (where f < 0) toward `to` and returns the boundary where
// f first becomes >= 0, located by bisection.
template <class F>
std::optional<double> crossing(F f, double from, double to) {
  const double dir = to > from ? 1.0 : -1.0;
  double prev = from;
  while (dir * (to - prev) > 0.0) {
    double t = prev + dir * kScanStepMs;
    if (dir * (t - to) > 0.0) t = to;
    if (f(t) >= 0.0) {
      double inside = prev, outside = t;
      for (int i = 0; i < 64 && std::abs(outside - inside) > 1e-12; ++i) {
        const double mid = 0.5 * (inside + outside);
        (f(mid) >= 0.0 ? outside : inside) = mid;
      }
      return 0.5 * (inside + outside);
    }
    prev = t;
  }
  return std::nullopt;
}

// Grid search then Brent refinement of the minimum of f on [lo, hi].
template <class F>
std::pair<double, double> minimize(F f, double lo, double hi) {
  double best_t = lo, best_v = f(lo);
  const auto steps = static_cast<int>(std::ceil((hi - lo) / kScanStepMs));
  for (int i = 1; i <= steps; ++i) {
    const double t = std::min(hi, lo + i * kScanStepMs);
    const double v = f(t);
    if (v < best_v) best_t = t, best_v = v;
  }
  const double a = std::max(lo, best_t - kScanStepMs);
  const double b = std::min(hi, best_t + kScanStepMs);
  auto r = boost::math::tools::brent_find_minima(f, a, b, kBrentBits);
  if (r.second < best_v) return r;
  return {best_t, best_v};
}

struct N1Core {
  double latency{0.0};
  double maxamp{0.0};
  std::optional<double> t_zc1;
  std::optional<double> t_zc2;
};

N1Core locate_core(const EpModel& model, const TruthWindows& w) {
  auto [lat, amp] = minimize([&](double t) { return model(t); }, w.n1_lo_ms, w.n1_hi_ms);
  N1Core c{lat, amp, {}, {}};
  if (!(amp < 0.0)) return c;
  const double end = model.spec().taper_start_ms + model.spec().conduction_delay_ms;
  c.t_zc1 = crossing([&](double t) { return model(t); }, lat, 0.0);
  c.t_zc2 = crossing([&](double t) { return model(t); }, lat, end);
  return c;
}

}  // namespace

EpKernelSpec EpKernelSpec::dcr_preset() {
  EpKernelSpec s;
  s.p0 = {5.0, 20.0, 8.0};
  s.n1 = {15.0, -150.0, 7.0, 30.0, 59.6, 5.0};
  s.kind = EpKind::dcr;
  return s;
}

EpKernelSpec EpKernelSpec::acep_preset() {
  EpKernelSpec s;
  s.p0 = {5.0, 20.0, 8.0};
  s.n1 = {17.0, -150.0, 9.0, 14.0, 35.4, 5.0};
  s.after_positivity = CosineLobe{65.0, 40.0, 40.0};
  s.kind = EpKind::acep;
  return s;
}

void EpKernelSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (!finite({p0.latency_ms, p0.amplitude_uv, p0.width_ms, n1.latency_ms, n1.amplitude_uv, n1.rise_ms,
               n1.decay_ms, n1.return_ms, n1.onset_ms, conduction_delay_ms, taper_start_ms, taper_end_ms})) {
    fail("kernel parameters must be finite");
  }
  if (!(p0.width_ms > 0.0)) fail("P0 width must be positive");
  if (p0.amplitude_uv < 0.0) fail("P0 amplitude must be non-negative");
  if (!(p0.latency_ms < n1.latency_ms)) fail("P0 must peak before N1");
  if (!(n1.amplitude_uv < 0.0)) fail("N1 amplitude must be negative");
  if (!(n1.rise_ms > 0.0) || !(n1.decay_ms > n1.rise_ms)) fail("N1 needs 0 < rise < decay");
  if (!(n1.return_ms > 0.0)) fail("N1 return time must be positive");
  if (n1.onset_ms < 0.0) fail("N1 onset time must be non-negative");
  if (after_positivity) {
    const auto& ap = *after_positivity;
    if (!finite({ap.latency_ms, ap.amplitude_uv, ap.width_ms})) fail("after-positivity must be finite");
    if (!(ap.width_ms > 0.0)) fail("after-positivity width must be positive");
    if (ap.amplitude_uv < 0.0) fail("after-positivity amplitude must be non-negative");
    if (!(ap.latency_ms > n1.latency_ms)) fail("after-positivity must follow N1");
  }
  if (!(taper_start_ms > 0.0) || !(taper_end_ms > taper_start_ms)) fail("taper must satisfy 0 < start < end");
}

EpKernelSpec EpKernelSpec::scaled(double k) const {
  EpKernelSpec s = *this;
  s.p0.amplitude_uv *= k;
  s.n1.amplitude_uv *= k;
  if (s.after_positivity) s.after_positivity->amplitude_uv *= k;
  return s;
}

EpKernelSpec EpKernelSpec::delayed(double delay_ms) const {
  EpKernelSpec s = *this;
  s.conduction_delay_ms = delay_ms;
  return s;
}

EpModel::EpModel(EpKernelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto& n1 = spec_.n1;
  auto r = boost::math::tools::brent_find_minima([&](double u) { return -n1_shape(n1, u); }, 0.0, n1.return_ms,
                                                  kBrentBits);
  peak_u_ = r.first;
  peak_g_ = -r.second;
  if (!(peak_g_ > 0.0)) throw Error(ErrorCode::InvalidSpec, "N1 shape has no extremum");
  if (peak_u_ > n1.latency_ms) throw Error(ErrorCode::InvalidSpec, "N1 would start before the pulse");
  n1_onset_ = n1.latency_ms - peak_u_ + spec_.conduction_delay_ms;
}

double EpModel::taper(double t) const noexcept {
  const double a = spec_.taper_start_ms + spec_.conduction_delay_ms;
  const double b = spec_.taper_end_ms + spec_.conduction_delay_ms;
  if (t <= a) return 1.0;
  if (t >= b) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (t - a) / (b - a)));
}

double EpModel::p0(double t) const noexcept { return raised_cosine(spec_.p0, t - spec_.conduction_delay_ms); }

double EpModel::n1(double t) const noexcept {
  return spec_.n1.amplitude_uv * n1_shape(spec_.n1, t - n1_onset_) / peak_g_;
}

double EpModel::after_positivity(double t) const noexcept {
  if (!spec_.after_positivity) return 0.0;
  return raised_cosine(*spec_.after_positivity, t - spec_.conduction_delay_ms);
}

double EpModel::operator()(double t) const noexcept {
  if (t <= 0.0) return 0.0;
  return (p0(t) + n1(t) + after_positivity(t)) * taper(t);
}

GroundTruth analytic_truth(const EpModel& model, const TruthWindows& w) {
  auto v = [&](double t) { return model(t); };
  GroundTruth g;
  g.kind = model.spec().kind;
  g.delay_ms = model.spec().conduction_delay_ms;
  g.n1_onset_ms = model.n1_onset_ms();

  const N1Core core = locate_core(model, w);
  g.n1_latency = core.latency;
  g.n1_maxamp = core.maxamp;
  g.t_zc1 = core.t_zc1;
  g.t_zc2 = core.t_zc2;
  if (g.t_zc1 && g.t_zc2) g.w_n1 = *g.t_zc2 - *g.t_zc1;

  if (g.n1_maxamp < 0.0) {
    const double level = g.n1_maxamp / 4.0;
    auto above = [&](double t) { return v(t) - level; };
    const double end = model.spec().taper_start_ms + model.spec().conduction_delay_ms;
    const auto lo = crossing(above, g.n1_latency, 0.0);
    const auto hi = crossing(above, g.n1_latency, end);
    if (lo && hi) g.whq_n1 = *hi - *lo;
  }

  g.area_40_100 = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(v, w.area_t0_ms, w.area_t1_ms, 15,
                                                                                 1e-12);

  constexpr double h = 1e-4;
  auto slope = [&](double t) { return (v(t + h) - v(t - h)) / (2.0 * h); };
  g.min_slope_50_80 = minimize(slope, w.slope_t0_ms, w.slope_t1_ms).second;
  g.relaxation_class = g.min_slope_50_80 < 0.0 ? RelaxationClass::after_positivity : RelaxationClass::monotonic;

  if (g.t_zc1 && *g.t_zc1 > w.artifact_end_ms) {
    auto [t, neg] = minimize([&](double t) { return -v(t); }, w.artifact_end_ms, *g.t_zc1);
    if (-neg > 0.0) g.p0 = P0Summary{t, -neg};
  }
  return g;
}

CanonicalEp synth_canonical_ep(const EpKernelSpec& spec, double fs_hz, const TimeWindow& window,
                               double artifact_end_ms) {
  const EpModel model(spec);
  const double delay = spec.conduction_delay_ms;
  auto out_of_window = [&](double t) { return t < 0.0 || t > window.t_max_ms; };
  bool bad = out_of_window(spec.p0.latency_ms - spec.p0.width_ms / 2.0 + delay) ||
             out_of_window(model.n1_onset_ms()) || out_of_window(model.n1_end_ms());
  if (spec.after_positivity) {
    const auto& ap = *spec.after_positivity;
    bad = bad || out_of_window(ap.latency_ms - ap.width_ms / 2.0 + delay) ||
          out_of_window(ap.latency_ms + ap.width_ms / 2.0 + delay);
  }
  if (bad) throw Error(ErrorCode::KernelOutOfWindow, "kernel lobes do not fit in the epoch window");

  CanonicalEp out;
  out.ep.grid = EpochGrid::make(window, fs_hz);
  out.ep.window = window;
  out.ep.trace.resize(out.ep.grid.length);
  for (std::size_t i = 0; i < out.ep.grid.length; ++i) out.ep.trace[i] = model(out.ep.grid.time_ms(i));
  out.ep.n_averaged = 1;
  out.ep.kind = spec.kind;
  out.ep.channel = "synthetic";
  out.ep.artifact_end_ms = artifact_end_ms;
  TruthWindows tw;
  tw.artifact_end_ms = artifact_end_ms;
  out.truth = analytic_truth(model, tw);
  return out;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double s = *spare_;
    spare_.reset();
    return s;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

SynthRecording synth_recording(const EpKernelSpec& spec, const StimTrain& train, const NoiseSpec& noise,
                               double fs_hz, double duration_s, const std::vector<SynthChannel>& channels) {
  if (!(fs_hz > 0.0) || !(duration_s > 0.0)) throw Error(ErrorCode::InvalidSpec, "fs and duration must be positive");
  if (channels.empty()) throw Error(ErrorCode::InvalidSpec, "at least one channel is required");
  if (!(noise.white_sigma_uv >= 0.0) || !(noise.line_amp_uv >= 0.0) || !(noise.artifact_amp_uv >= 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "noise amplitudes must be non-negative");
  }
  const EpModel model(spec);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs_hz));
  const auto pulse_len = static_cast<std::size_t>(std::max(1LL, std::llround(train.pulse_width_ms() * fs_hz / 1000.0)));
  for (std::size_t onset : train.pulse_onsets()) {
    if (onset + pulse_len >= n) throw Error(ErrorCode::TrainTooLong, "train does not fit in the recording");
  }

  const auto support = static_cast<std::size_t>(std::ceil(model.support_end_ms() * fs_hz / 1000.0));
  std::vector<double> clean(support);
  for (std::size_t k = 0; k < support; ++k) clean[k] = model(static_cast<double>(k) * 1000.0 / fs_hz);

  Rng rng(noise.seed);
  std::vector<std::vector<double>> data(channels.size(), std::vector<double>(n, 0.0));
  std::vector<std::string> ids;
  const std::size_t first_half = pulse_len / 2;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& ch = channels[c];
    ids.push_back(ch.id);
    auto& x = data[c];
    for (std::size_t p = 0; p < train.n_pulses(); ++p) {
      const std::size_t onset = train.pulse_onsets()[p];
      const std::size_t len = std::min(support, n - onset);
      for (std::size_t k = 0; k < len; ++k) x[onset + k] += ch.response_gain * clean[k];
      if (noise.artifact_amp_uv > 0.0) {
        const double a = noise.artifact_amp_uv * train.polarity(p);
        for (std::size_t k = 0; k < pulse_len; ++k) x[onset + k] += k < first_half ? a : -a;
      }
    }
    if (noise.line_amp_uv > 0.0) {
      const double w = 2.0 * std::numbers::pi * noise.line_hz / fs_hz;
      const double amp = noise.line_amp_uv * ch.line_gain;
      for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(w * static_cast<double>(i) + noise.line_phase_rad);
    }
    if (noise.white_sigma_uv > 0.0) {
      for (double& v : x) v += noise.white_sigma_uv * rng.normal();
    }
  }

  std::optional<ElectrodeGeometry> geometry;
  const auto with_pos = std::count_if(channels.begin(), channels.end(), [](const auto& ch) { return ch.position; });
  if (with_pos != 0) {
    if (static_cast<std::size_t>(with_pos) != channels.size()) {
      throw Error(ErrorCode::InvalidSpec, "either all or no channels carry a position");
    }
    ElectrodeGeometry g;
    for (const auto& ch : channels) g.positions[ch.id] = *ch.position;
    g.des_sites["train0"] = train.site();
    geometry = std::move(g);
  }

  SynthRecording rec{Session{SignalBuffer(std::move(data), fs_hz, std::move(ids)), {train}, std::move(geometry),
                             "synthetic", {}},
                     analytic_truth(model), spec, noise, std::move(clean)};
  validate(rec.session);
  return rec;
}

EpKernelSpec fit_n1_width(EpKernelSpec spec, double target_w_ms, const TruthWindows& windows) {
  auto width = [&](double l) -> std::optional<double> {
    spec.n1.return_ms = l;
    try {
      const EpModel model(spec);
      const N1Core c = locate_core(model, windows);
      if (c.t_zc1 && c.t_zc2) return *c.t_zc2 - *c.t_zc1;
    } catch (const Error&) {
    }
    return std::nullopt;
  };

  constexpr double step = 5.0;
  std::optional<double> prev_l, prev_w;
  for (double l = 10.0; l <= 200.0; l += step) {
    const auto w = width(l);
    if (w && prev_w && (*prev_w - target_w_ms) * (*w - target_w_ms) <= 0.0) {
      double lo = *prev_l, hi = l;
      const bool rising = *w >= *prev_w;
      for (int i = 0; i < 60 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto wm = width(mid);
        if (!wm) break;
        ((*wm < target_w_ms) == rising ? lo : hi) = mid;
      }
      spec.n1.return_ms = 0.5 * (lo + hi);
      return spec;
    }
    prev_l = l;
    prev_w = w;
  }
  throw Error(ErrorCode::InvalidSpec, "no N1 return time gives W_N1 = " + std::to_string(target_w_ms) + " ms");
}

}  // namespace epkit
