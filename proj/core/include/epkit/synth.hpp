#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "epkit/epochs.hpp"
#include "epkit/metrics.hpp"
#include "epkit/signal.hpp"

namespace epkit {

// Raised-cosine lobe centred on `latency_ms`, `width_ms` wide at the base.
struct CosineLobe {
  double latency_ms{0.0};
  double amplitude_uv{0.0};
  double width_ms{1.0};
};

// Double-exponential negative lobe with a smooth start and a linear return
// factor:
//   g(u) = (1 - exp(-(u/onset)^2)) * (exp(-u/decay) - exp(-u/rise)) * (1 - u/return_ms)
// for u > 0, scaled so its extremum equals `amplitude_uv` at `latency_ms`.
// The lobe starts where this places u = 0 and is back at zero `return_ms`
// later, followed by a small slow positive tail. onset_ms = 0 gives a sharp
// start.
struct N1Lobe {
  double latency_ms{15.0};
  double amplitude_uv{-150.0};
  double rise_ms{7.0};
  double decay_ms{30.0};
  double return_ms{59.6};
  double onset_ms{5.0};
};

struct EpKernelSpec {
  CosineLobe p0{5.0, 20.0, 8.0};
  N1Lobe n1{};
  std::optional<CosineLobe> after_positivity;
  double conduction_delay_ms{0.0};
  EpKind kind{EpKind::dcr};
  // Cosine fade to zero so the response ends before the next pulse.
  double taper_start_ms{90.0};
  double taper_end_ms{105.0};

  static EpKernelSpec dcr_preset();
  static EpKernelSpec acep_preset();

  // Throws InvalidSpec on inconsistent parameters.
  void validate() const;
  // Copy with every amplitude multiplied by `k`.
  EpKernelSpec scaled(double k) const;
  EpKernelSpec delayed(double delay_ms) const;
};

// Continuous-time response of a kernel spec, t in ms from pulse onset.
class EpModel {
 public:
  explicit EpModel(EpKernelSpec spec);

  double operator()(double t_ms) const noexcept;
  double p0(double t_ms) const noexcept;
  double n1(double t_ms) const noexcept;
  double after_positivity(double t_ms) const noexcept;

  const EpKernelSpec& spec() const noexcept { return spec_; }
  // Time the N1 lobe leaves zero, delay included.
  double n1_onset_ms() const noexcept { return n1_onset_; }
  double n1_end_ms() const noexcept { return n1_onset_ + spec_.n1.return_ms; }
  // Nothing is produced at or after this time.
  double support_end_ms() const noexcept { return spec_.taper_end_ms + spec_.conduction_delay_ms; }

 private:
  double taper(double t_ms) const noexcept;

  EpKernelSpec spec_;
  double peak_u_{0.0};
  double peak_g_{1.0};
  double n1_onset_{0.0};
};

// Metric values of the continuous model, found by root finding,
// minimisation and quadrature rather than on samples.
struct GroundTruth {
  EpKind kind{EpKind::dcr};
  double delay_ms{0.0};
  double n1_onset_ms{0.0};
  std::optional<double> t_zc1;
  std::optional<double> t_zc2;
  std::optional<double> w_n1;
  std::optional<double> whq_n1;
  double n1_maxamp{0.0};
  double n1_latency{0.0};
  double area_40_100{0.0};
  double min_slope_50_80{0.0};
  RelaxationClass relaxation_class{RelaxationClass::monotonic};
  std::optional<P0Summary> p0;
};

struct TruthWindows {
  double artifact_end_ms{5.0};
  double n1_lo_ms{8.0};
  double n1_hi_ms{35.0};
  double area_t0_ms{40.0};
  double area_t1_ms{100.0};
  double slope_t0_ms{50.0};
  double slope_t1_ms{80.0};
};

GroundTruth analytic_truth(const EpModel& model, const TruthWindows& windows = {});

struct CanonicalEp {
  EvokedPotential ep;
  GroundTruth truth;
};

// Noise-free average sampled on the epoch grid. Throws KernelOutOfWindow when
// a lobe (after the delay) starts before the pulse or ends after the window.
CanonicalEp synth_canonical_ep(const EpKernelSpec& spec, double fs_hz, const TimeWindow& window = {},
                               double artifact_end_ms = 5.0);

struct NoiseSpec {
  double white_sigma_uv{0.0};
  double line_amp_uv{0.0};
  double line_hz{50.0};
  double line_phase_rad{0.0};
  // Height of the biphasic stub drawn during each pulse.
  double artifact_amp_uv{0.0};
  std::uint64_t seed{0};
};

struct SynthChannel {
  std::string id{"ch1"};
  double response_gain{1.0};
  double line_gain{1.0};
  std::optional<Point3> position;
};

struct SynthRecording {
  Session session;
  GroundTruth truth;
  EpKernelSpec kernel;
  NoiseSpec noise;
  // Clean response sampled from the pulse onset, one value per sample.
  std::vector<double> template_trace;
};

// Clean template added at every onset (scaled per channel), plus biphasic
// artifact stubs, a mains sinusoid phase-locked to sample 0 and white noise.
// Throws TrainTooLong when a pulse does not end inside the recording.
SynthRecording synth_recording(const EpKernelSpec& spec, const StimTrain& train, const NoiseSpec& noise,
                               double fs_hz, double duration_s,
                               const std::vector<SynthChannel>& channels = {SynthChannel{}});

// mt19937_64 with Box-Muller normals; the sequence depends only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();  // (0, 1)
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Adjusts n1.return_ms so the model's W_N1 equals `target_w_ms`. Throws
// InvalidSpec when the target cannot be reached.
EpKernelSpec fit_n1_width(EpKernelSpec spec, double target_w_ms, const TruthWindows& windows = {});

}  // namespace epkit
