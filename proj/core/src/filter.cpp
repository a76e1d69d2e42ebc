#include "epkit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "epkit/error.hpp"

namespace epkit {

namespace {

using cplx = std::complex<double>;

struct Zpk {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double gain{1.0};
};

// Normalised analog Butterworth prototype: poles on the left unit half-circle.
std::vector<cplx> prototype_poles(int order) {
  std::vector<cplx> poles;
  for (int m = -order + 1; m < order; m += 2) {
    poles.push_back(-std::exp(cplx(0.0, std::numbers::pi * m / (2.0 * order))));
  }
  return poles;
}

double prewarp(double f_hz, double fs_hz) { return 2.0 * fs_hz * std::tan(std::numbers::pi * f_hz / fs_hz); }

Zpk analog_design(const FilterSpec& spec, double fs_hz) {
  const auto proto = prototype_poles(spec.order);
  Zpk out;
  switch (spec.kind) {
    case FilterKind::low_pass: {
      const double wo = prewarp(spec.high_hz, fs_hz);
      for (const auto& p : proto) out.poles.push_back(p * wo);
      out.gain = std::pow(wo, spec.order);
      break;
    }
    case FilterKind::high_pass: {
      const double wo = prewarp(spec.low_hz, fs_hz);
      for (const auto& p : proto) out.poles.push_back(wo / p);
      out.zeros.assign(proto.size(), cplx(0.0, 0.0));
      cplx prod(1.0, 0.0);
      for (const auto& p : proto) prod *= -p;
      out.gain = 1.0 / prod.real();
      break;
    }
    case FilterKind::band_pass: {
      const double w1 = prewarp(spec.low_hz, fs_hz);
      const double w2 = prewarp(spec.high_hz, fs_hz);
      const double bw = w2 - w1;
      const double wo = std::sqrt(w1 * w2);
      for (const auto& p : proto) {
        const cplx lp = p * (bw / 2.0);
        const cplx root = std::sqrt(lp * lp - wo * wo);
        out.poles.push_back(lp + root);
        out.poles.push_back(lp - root);
      }
      out.zeros.assign(proto.size(), cplx(0.0, 0.0));
      out.gain = std::pow(bw, spec.order);
      break;
    }
  }
  return out;
}

Zpk bilinear(const Zpk& analog, double fs_hz) {
  const double fs2 = 2.0 * fs_hz;
  Zpk out;
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (const auto& z : analog.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= fs2 - z;
  }
  for (const auto& p : analog.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  // Zeros at analog infinity land on Nyquist.
  out.zeros.resize(out.poles.size(), cplx(-1.0, 0.0));
  out.gain = analog.gain * (num / den).real();
  return out;
}

// Groups poles into conjugate pairs (real poles paired with each other) and
// gives each section up to two real zeros.
SosFilter to_sections(const Zpk& zpk, FilterKind kind) {
  constexpr double eps = 1e-12;
  std::vector<cplx> complex_poles, real_poles;
  for (const auto& p : zpk.poles) {
    if (p.imag() > eps) complex_poles.push_back(p);
    else if (std::abs(p.imag()) <= eps) real_poles.push_back(p);
  }
  std::sort(real_poles.begin(), real_poles.end(), [](cplx a, cplx b) { return a.real() < b.real(); });

  std::vector<std::vector<cplx>> pole_groups;
  for (const auto& p : complex_poles) pole_groups.push_back({p, std::conj(p)});
  for (std::size_t i = 0; i < real_poles.size(); i += 2) {
    if (i + 1 < real_poles.size()) pole_groups.push_back({real_poles[i], real_poles[i + 1]});
    else pole_groups.push_back({real_poles[i]});
  }

  // Zeros are +1 (from analog DC zeros) and -1 (from analog infinity).
  std::vector<double> plus, minus;
  for (const auto& z : zpk.zeros) (z.real() > 0.0 ? plus : minus).push_back(z.real());

  std::vector<Biquad> sections;
  const double per_section = std::pow(std::abs(zpk.gain), 1.0 / static_cast<double>(pole_groups.size()));
  for (std::size_t s = 0; s < pole_groups.size(); ++s) {
    const auto& g = pole_groups[s];
    std::vector<double> zs;
    const std::size_t want = g.size();
    if (kind == FilterKind::band_pass) {
      // One DC zero and one Nyquist zero per section keeps each biquad a band-pass.
      while (zs.size() < want && (!plus.empty() || !minus.empty())) {
        const bool take_plus = minus.empty() || (!plus.empty() && zs.size() % 2 == 0);
        auto& pool = take_plus ? plus : minus;
        zs.push_back(pool.back());
        pool.pop_back();
      }
    } else {
      auto& pool = plus.empty() ? minus : plus;
      while (zs.size() < want && !pool.empty()) {
        zs.push_back(pool.back());
        pool.pop_back();
      }
    }

    Biquad b;
    if (g.size() == 2) {
      b.a1 = -(g[0] + g[1]).real();
      b.a2 = (g[0] * g[1]).real();
    } else {
      b.a1 = -g[0].real();
      b.a2 = 0.0;
    }
    double n0 = 1.0, n1 = 0.0, n2 = 0.0;
    if (zs.size() == 2) {
      n1 = -(zs[0] + zs[1]);
      n2 = zs[0] * zs[1];
    } else if (zs.size() == 1) {
      n1 = -zs[0];
    }
    const double scale = (s == 0 && zpk.gain < 0.0) ? -per_section : per_section;
    b.b0 = n0 * scale;
    b.b1 = n1 * scale;
    b.b2 = n2 * scale;
    sections.push_back(b);
  }
  return SosFilter(std::move(sections));
}

}  // namespace

void validate(const FilterSpec& spec, double fs_hz) {
  const double nyquist = fs_hz / 2.0;
  if (spec.order < 1 || spec.order > 12) {
    throw Error(ErrorCode::InvalidSpec, "filter order must be in [1, 12]");
  }
  auto in_band = [&](double f) { return std::isfinite(f) && f > 0.0 && f < nyquist; };
  switch (spec.kind) {
    case FilterKind::low_pass:
      if (!in_band(spec.high_hz)) throw Error(ErrorCode::InvalidSpec, "low-pass cutoff must lie in (0, fs/2)");
      break;
    case FilterKind::high_pass:
      if (!in_band(spec.low_hz)) throw Error(ErrorCode::InvalidSpec, "high-pass cutoff must lie in (0, fs/2)");
      break;
    case FilterKind::band_pass:
      if (!in_band(spec.low_hz) || !in_band(spec.high_hz) || !(spec.low_hz < spec.high_hz)) {
        throw Error(ErrorCode::InvalidSpec, "band-pass needs 0 < low < high < fs/2");
      }
      break;
  }
}

SosFilter design_butterworth(const FilterSpec& spec, double fs_hz) {
  validate(spec, fs_hz);
  return to_sections(bilinear(analog_design(spec, fs_hz), fs_hz), spec.kind);
}

std::complex<double> SosFilter::response(double f_hz, double fs_hz) const {
  const double w = 2.0 * std::numbers::pi * f_hz / fs_hz;
  const cplx z1 = std::exp(cplx(0.0, -w));
  const cplx z2 = z1 * z1;
  cplx h(1.0, 0.0);
  for (const auto& s : sections_) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

std::vector<double> SosFilter::filter(std::span<const double> x, std::span<const double> state) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t k = 0; k < sections_.size(); ++k) {
    const Biquad& s = sections_[k];
    double s1 = state.empty() ? 0.0 : state[2 * k];
    double s2 = state.empty() ? 0.0 : state[2 * k + 1];
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + s1;
      s1 = s.b1 * in - s.a1 * out + s2;
      s2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> SosFilter::steady_state() const {
  std::vector<double> zi;
  zi.reserve(2 * sections_.size());
  double level = 1.0;  // steady input level reaching this section
  for (const auto& s : sections_) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y = gain * level;
    zi.push_back(y - s.b0 * level);
    zi.push_back(s.b2 * level - s.a2 * y);
    level = y;
  }
  return zi;
}

std::size_t SosFilter::decay_length(double tolerance) const {
  double radius = 0.0;
  for (const auto& s : sections_) {
    const cplx disc = std::sqrt(cplx(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    radius = std::max({radius, std::abs((-s.a1 + disc) / 2.0), std::abs((-s.a1 - disc) / 2.0)});
  }
  if (radius <= 0.0) return 0;
  if (radius >= 1.0) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(std::ceil(std::log(tolerance) / std::log(radius)));
}

std::vector<double> SosFilter::filtfilt(std::span<const double> x) const {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::size_t min_pad = 3 * (2 * sections_.size() + 1);
  const std::size_t pad = std::min(n - 1, std::max(min_pad, decay_length()));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto unit = steady_state();
  std::vector<double> state(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) state[i] = unit[i] * ext.front();
  auto forward = filter(ext, state);

  std::reverse(forward.begin(), forward.end());
  for (std::size_t i = 0; i < unit.size(); ++i) state[i] = unit[i] * forward.front();
  auto backward = filter(forward, state);
  std::reverse(backward.begin(), backward.end());

  return {backward.begin() + static_cast<std::ptrdiff_t>(pad),
          backward.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::vector<double> apply_filter(std::span<const double> x, const FilterSpec& spec, double fs_hz) {
  const SosFilter f = design_butterworth(spec, fs_hz);
  return spec.zero_phase ? f.filtfilt(x) : f.filter(x);
}

}  // namespace epkit
