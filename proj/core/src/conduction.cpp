#include "epkit/conduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epkit/error.hpp"

namespace epkit {

namespace {

std::optional<double> mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

FiberModel FiberModel::from_diameter(double diameter_um) {
  if (!(diameter_um > 0.0) || diameter_um > 20.0) {
    throw Error(ErrorCode::NonPositiveDiameter, "fibre diameter must lie in (0, 20] um");
  }
  return {diameter_um, kHurshFactor * diameter_um};
}

double onset_delay(const WaveformMetrics& dcr, const WaveformMetrics& acep) {
  if (!dcr.t_zc1 || !acep.t_zc1) throw Error(ErrorCode::UndefinedOnset, "t_zc1 missing on one response");
  return *acep.t_zc1 - *dcr.t_zc1;
}

double velocity_from_delay(double distance_mm, double delay_ms) {
  if (!(delay_ms > 0.0)) throw Error(ErrorCode::NonPositiveDelay, "delay must be positive to give a velocity");
  if (!(distance_mm > 0.0)) throw Error(ErrorCode::NonPositiveDistance, "distance must be positive");
  return distance_mm / delay_ms;
}

double hursh_predicted_delay(double diameter_um, double distance_mm) {
  if (!(diameter_um > 0.0)) throw Error(ErrorCode::NonPositiveDiameter, "fibre diameter must be positive");
  if (!(distance_mm >= 0.0)) throw Error(ErrorCode::NonPositiveDistance, "distance must be non-negative");
  return distance_mm / (kHurshFactor * diameter_um);
}

ConductionEstimate make_estimate(double distance_mm, double delay_ms, std::string patient, std::string dcr_id,
                                 std::string acep_id) {
  ConductionEstimate e{std::move(patient), std::move(dcr_id), std::move(acep_id), distance_mm, delay_ms, {}};
  if (delay_ms > 0.0 && distance_mm > 0.0) e.velocity_mps = distance_mm / delay_ms;
  return e;
}

VelocitySummary summarize_velocities(std::span<const ConductionEstimate> estimates) {
  VelocitySummary s;
  s.n_pairs = estimates.size();
  std::vector<double> valid, all;
  for (const auto& e : estimates) {
    if (e.valid()) valid.push_back(*e.velocity_mps);
    else ++s.n_invalid;
    if (e.delay_ms != 0.0 && e.distance_mm > 0.0) all.push_back(e.distance_mm / e.delay_ms);
  }
  s.mean_valid_mps = mean(valid);
  s.median_valid_mps = median(valid);
  s.mean_all_mps = mean(all);
  s.median_all_mps = median(std::move(all));
  return s;
}

}  // namespace epkit
