#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epkit/metrics.hpp"

namespace epkit {

// Myelinated fibre obeying velocity (m/s) = 6 x diameter (um).
struct FiberModel {
  double diameter_um{0.7};
  double velocity_mps{4.2};

  // Throws NonPositiveDiameter outside (0, 20] um.
  static FiberModel from_diameter(double diameter_um);
};

inline constexpr double kHurshFactor = 6.0;

// ACEP onset minus DCR onset (ms, signed). Throws UndefinedOnset when either
// t_zc1 is missing.
double onset_delay(const WaveformMetrics& dcr, const WaveformMetrics& acep);

// distance / delay; mm/ms is m/s. Throws NonPositiveDelay or NonPositiveDistance.
double velocity_from_delay(double distance_mm, double delay_ms);

// Expected extra latency over `distance_mm` for a fibre of the given
// diameter. Throws NonPositiveDiameter; distance must be >= 0.
double hursh_predicted_delay(double diameter_um, double distance_mm);

struct ConductionEstimate {
  std::string patient;
  std::string dcr_id;
  std::string acep_id;
  double distance_mm{0.0};
  double delay_ms{0.0};
  // Present only for a positive delay.
  std::optional<double> velocity_mps;

  bool valid() const noexcept { return velocity_mps.has_value(); }
};

// Never throws on a non-positive delay; the estimate is flagged instead.
ConductionEstimate make_estimate(double distance_mm, double delay_ms, std::string patient = {},
                                 std::string dcr_id = {}, std::string acep_id = {});

struct VelocitySummary {
  std::size_t n_pairs{0};
  std::size_t n_invalid{0};
  // Over valid pairs only.
  std::optional<double> mean_valid_mps;
  std::optional<double> median_valid_mps;
  // distance / delay for every nonzero delay, negative velocities included.
  std::optional<double> mean_all_mps;
  std::optional<double> median_all_mps;
};

VelocitySummary summarize_velocities(std::span<const ConductionEstimate> estimates);

}  // namespace epkit
