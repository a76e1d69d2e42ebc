#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epkit/epochs.hpp"
#include "epkit/metrics.hpp"
#include "epkit/preprocess.hpp"
#include "epkit/timefreq.hpp"

namespace epkit {

// Every tunable of the processing chain. Values come from the defaults,
// then a JSON config file, then command-line flags, later sources winning.
struct PipelineConfig {
  PreprocessConfig preprocess;
  TimeWindow epoch_window;
  double amplitude_threshold_uv{100.0};
  GateMode gate_mode{GateMode::any_deflection};
  double stability_threshold{0.8};
  MetricsConfig metrics;
  OnsetConfig onsets;
  StftConfig stft;
  std::vector<double> tf_centers_ms{20.0, 25.0, 30.0, 35.0, 40.0};
  double gamma_hz{50.0};
  std::string output_dir{"."};

  // Throws ConfigError when windows are inconsistent with each other.
  void validate() const;
};

std::string_view to_string(GateMode mode) noexcept;

// Canonical JSON text with every field present.
std::string config_to_json(const PipelineConfig& config);
// Overrides the fields present in `text` on top of `base`. Unknown keys,
// wrong types and inconsistent windows throw ConfigError.
PipelineConfig config_from_json(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

struct TrainAnalysis {
  std::size_t train_index{0};
  EpochSet epochs;
  EvokedPotential evoked;
  GateResult gate;
  std::optional<StabilityReport> stability;  // absent below 4 epochs
  // Present when the response passed the gate and an N1 was found.
  std::optional<WaveformMetrics> metrics;
  std::string note;
};

// Epochs, average, gate, stability and metrics of one train on one channel
// of an already preprocessed session.
TrainAnalysis analyze_train(const Session& cleaned, std::size_t train_index, std::string_view channel,
                            const PipelineConfig& config = {});

struct PipelineRun {
  PreprocessResult preprocessed;
  std::vector<TrainAnalysis> trains;
};

// preprocess_session followed by analyze_train on every train.
PipelineRun run_pipeline(const Session& session, std::string_view channel, const PipelineConfig& config = {});

}  // namespace epkit
