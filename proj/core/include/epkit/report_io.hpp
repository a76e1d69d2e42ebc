#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epkit/conduction.hpp"
#include "epkit/epochs.hpp"
#include "epkit/metrics.hpp"
#include "epkit/stats.hpp"
#include "epkit/synth.hpp"
#include "epkit/timefreq.hpp"

namespace epkit {

// All writers produce plain text with a fixed number format, so equal
// inputs give byte-identical files. Missing values are written as "NA".

// "# key: value" metadata lines, then time_ms / amplitude_uv columns.
std::string evoked_text(const EvokedPotential& ep);
EvokedPotential parse_evoked(std::string_view text);

// One row of a metrics table.
struct MetricsRow {
  std::string patient;
  std::string channel;
  EpKind kind{EpKind::dcr};
  std::size_t train{0};
  std::size_t n_averaged{0};
  WaveformMetrics metrics;
};

// Tab-separated, header row with unit-suffixed column names.
std::string metrics_table_text(std::span<const MetricsRow> rows);
std::vector<MetricsRow> parse_metrics_table(std::string_view text);
const std::vector<std::string>& metrics_columns();
// Numeric column by header name, NA as empty. Throws ConfigError for an
// unknown or non-numeric column.
std::vector<std::optional<double>> metrics_column(std::span<const MetricsRow> rows, std::string_view column);

// First row: "center_ms" then the frequencies; then one dB row per centre.
std::string tf_map_text(const TimeFrequencyMap& map);

// "key<TAB>value" lines.
std::string test_result_text(const TestResult& result, std::string_view field = {});

std::string velocity_report_text(std::span<const ConductionEstimate> estimates);

// JSON sidecar describing a synthetic recording's kernel, noise and truth.
std::string truth_json(const SynthRecording& recording);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace epkit
