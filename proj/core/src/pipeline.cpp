#include "epkit/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "epkit/error.hpp"
#include "json.hpp"

namespace epkit {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

json pair_json(double a, double b) { return json::array({a, b}); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) config_error(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) config_error("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) config_error(std::string(key) + " must be true or false");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) config_error(std::string(key) + " must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0) config_error(std::string(key) + " must be a non-negative integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) config_error(std::string(key) + " must be a number");
    out = v.get<double>();
  }
}

void read_pair(const json& obj, const char* key, double& lo, double& hi) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    config_error(std::string(key) + " must be [from, to]");
  }
  lo = v[0].get<double>();
  hi = v[1].get<double>();
}

GateMode parse_gate(const std::string& s) {
  if (s == "any-deflection") return GateMode::any_deflection;
  if (s == "n1-amplitude") return GateMode::n1_amplitude;
  config_error("gate_mode must be any-deflection or n1-amplitude");
}

void check_window(const char* what, double lo, double hi, const TimeWindow& epoch) {
  if (!(lo < hi)) config_error(std::string(what) + " must satisfy from < to");
  if (lo < epoch.t_min_ms || hi > epoch.t_max_ms) config_error(std::string(what) + " leaves the epoch window");
}

}  // namespace

std::string_view to_string(GateMode mode) noexcept {
  return mode == GateMode::any_deflection ? "any-deflection" : "n1-amplitude";
}

void PipelineConfig::validate() const {
  const TimeWindow& w = epoch_window;
  if (!(w.t_min_ms <= -kBaselineMs) || !(w.t_max_ms > 0.0)) {
    config_error("epoch window must start at or before -5 ms and end after 0 ms");
  }
  if (!(preprocess.extra_ms >= 0.0)) config_error("excision extra_ms must be non-negative");
  if (!(amplitude_threshold_uv >= 0.0)) config_error("amplitude threshold must be non-negative");
  if (!(stability_threshold >= -1.0 && stability_threshold <= 1.0)) config_error("stability threshold must lie in [-1, 1]");
  check_window("n1_window_ms", metrics.n1_window_lo_ms, metrics.n1_window_hi_ms, w);
  check_window("area_window_ms", metrics.area_t0_ms, metrics.area_t1_ms, w);
  check_window("slope_window_ms", metrics.slope_t0_ms, metrics.slope_t1_ms, w);
  if (!(stft.window_ms > 0.0) || !(stft.step_ms > 0.0)) config_error("stft window and step must be positive");
  if (stft.baseline_center_lo_ms > stft.baseline_center_hi_ms) config_error("stft baseline centres out of order");
  if (stft.baseline_center_lo_ms - stft.window_ms / 2.0 < w.t_min_ms ||
      stft.baseline_center_hi_ms + stft.window_ms / 2.0 > 0.0) {
    config_error("stft baseline windows must lie inside the pre-stimulus part of the epoch");
  }
  for (double c : tf_centers_ms) {
    if (c - stft.window_ms / 2.0 < w.t_min_ms || c + stft.window_ms / 2.0 > w.t_max_ms) {
      config_error("tf centre " + std::to_string(c) + " ms leaves the epoch window");
    }
  }
  if (!(gamma_hz > 0.0)) config_error("gamma_hz must be positive");
}

std::string config_to_json(const PipelineConfig& c) {
  const auto& bp = c.preprocess.filter;
  json j;
  j["excision_extra_ms"] = c.preprocess.extra_ms;
  j["line_noise"] = {{"enabled", c.preprocess.remove_line_noise}, {"line_hz", c.preprocess.line_hz}};
  j["band_pass"] = {{"enabled", c.preprocess.band_pass}, {"low_hz", bp.low_hz}, {"high_hz", bp.high_hz},
                    {"order", bp.order}, {"zero_phase", bp.zero_phase}};
  j["epoch_window_ms"] = pair_json(c.epoch_window.t_min_ms, c.epoch_window.t_max_ms);
  j["amplitude_threshold_uv"] = c.amplitude_threshold_uv;
  j["gate_mode"] = std::string(to_string(c.gate_mode));
  j["stability_threshold"] = c.stability_threshold;
  j["n1_window_ms"] = pair_json(c.metrics.n1_window_lo_ms, c.metrics.n1_window_hi_ms);
  j["smoothing"] = {{"enabled", c.metrics.smooth}, {"cutoff_hz", c.metrics.smoothing.high_hz},
                    {"order", c.metrics.smoothing.order}};
  j["area_window_ms"] = pair_json(c.metrics.area_t0_ms, c.metrics.area_t1_ms);
  j["slope_window_ms"] = pair_json(c.metrics.slope_t0_ms, c.metrics.slope_t1_ms);
  j["invert"] = c.metrics.invert;
  j["noise_floor_factor"] = c.metrics.noise_floor_factor;
  j["onsets"] = {{"cutoff_hz", c.onsets.smoothing.high_hz},
                 {"order", c.onsets.smoothing.order},
                 {"start_after_artifact_ms", c.onsets.start_after_artifact_ms}};
  j["stft"] = {{"window_ms", c.stft.window_ms},
               {"step_ms", c.stft.step_ms},
               {"nfft", c.stft.nfft},
               {"baseline_centers_ms", pair_json(c.stft.baseline_center_lo_ms, c.stft.baseline_center_hi_ms)},
               {"subtract_evoked", c.stft.subtract_evoked}};
  j["tf_centers_ms"] = c.tf_centers_ms;
  j["gamma_hz"] = c.gamma_hz;
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(std::string_view text, PipelineConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  check_keys(j, "config",
             {"excision_extra_ms", "line_noise", "band_pass", "epoch_window_ms", "amplitude_threshold_uv", "gate_mode",
              "stability_threshold", "n1_window_ms", "smoothing", "area_window_ms", "slope_window_ms", "invert",
              "noise_floor_factor", "onsets", "stft", "tf_centers_ms", "gamma_hz", "output_dir"});
  read(j, "excision_extra_ms", c.preprocess.extra_ms);
  if (j.contains("line_noise")) {
    const json& l = j["line_noise"];
    check_keys(l, "line_noise", {"enabled", "line_hz"});
    read(l, "enabled", c.preprocess.remove_line_noise);
    read(l, "line_hz", c.preprocess.line_hz);
  }
  if (j.contains("band_pass")) {
    const json& b = j["band_pass"];
    check_keys(b, "band_pass", {"enabled", "low_hz", "high_hz", "order", "zero_phase"});
    read(b, "enabled", c.preprocess.band_pass);
    read(b, "low_hz", c.preprocess.filter.low_hz);
    read(b, "high_hz", c.preprocess.filter.high_hz);
    read(b, "order", c.preprocess.filter.order);
    read(b, "zero_phase", c.preprocess.filter.zero_phase);
  }
  read_pair(j, "epoch_window_ms", c.epoch_window.t_min_ms, c.epoch_window.t_max_ms);
  read(j, "amplitude_threshold_uv", c.amplitude_threshold_uv);
  if (j.contains("gate_mode")) {
    std::string g;
    read(j, "gate_mode", g);
    c.gate_mode = parse_gate(g);
  }
  read(j, "stability_threshold", c.stability_threshold);
  read_pair(j, "n1_window_ms", c.metrics.n1_window_lo_ms, c.metrics.n1_window_hi_ms);
  if (j.contains("smoothing")) {
    const json& s = j["smoothing"];
    check_keys(s, "smoothing", {"enabled", "cutoff_hz", "order"});
    read(s, "enabled", c.metrics.smooth);
    read(s, "cutoff_hz", c.metrics.smoothing.high_hz);
    read(s, "order", c.metrics.smoothing.order);
  }
  read_pair(j, "area_window_ms", c.metrics.area_t0_ms, c.metrics.area_t1_ms);
  read_pair(j, "slope_window_ms", c.metrics.slope_t0_ms, c.metrics.slope_t1_ms);
  read(j, "invert", c.metrics.invert);
  read(j, "noise_floor_factor", c.metrics.noise_floor_factor);
  if (j.contains("onsets")) {
    const json& o = j["onsets"];
    check_keys(o, "onsets", {"cutoff_hz", "order", "start_after_artifact_ms"});
    read(o, "cutoff_hz", c.onsets.smoothing.high_hz);
    read(o, "order", c.onsets.smoothing.order);
    read(o, "start_after_artifact_ms", c.onsets.start_after_artifact_ms);
  }
  if (j.contains("stft")) {
    const json& s = j["stft"];
    check_keys(s, "stft", {"window_ms", "step_ms", "nfft", "baseline_centers_ms", "subtract_evoked"});
    read(s, "window_ms", c.stft.window_ms);
    read(s, "step_ms", c.stft.step_ms);
    read(s, "nfft", c.stft.nfft);
    read_pair(s, "baseline_centers_ms", c.stft.baseline_center_lo_ms, c.stft.baseline_center_hi_ms);
    read(s, "subtract_evoked", c.stft.subtract_evoked);
  }
  if (j.contains("tf_centers_ms")) {
    const json& t = j["tf_centers_ms"];
    if (!t.is_array() || t.empty()) config_error("tf_centers_ms must be a non-empty array");
    c.tf_centers_ms.clear();
    for (const auto& v : t) {
      if (!v.is_number()) config_error("tf_centers_ms must hold numbers");
      c.tf_centers_ms.push_back(v.get<double>());
    }
  }
  read(j, "gamma_hz", c.gamma_hz);
  read(j, "output_dir", c.output_dir);
  c.onsets.n1_window_lo_ms = c.metrics.n1_window_lo_ms;
  c.onsets.n1_window_hi_ms = c.metrics.n1_window_hi_ms;
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str(), std::move(base));
}

TrainAnalysis analyze_train(const Session& cleaned, std::size_t train_index, std::string_view channel,
                            const PipelineConfig& config) {
  if (train_index >= cleaned.trains.size()) {
    throw Error(ErrorCode::InvalidSpec, "train index " + std::to_string(train_index) + " out of range");
  }
  const StimTrain& train = cleaned.trains[train_index];
  TrainAnalysis out{train_index,
                    extract_epochs(cleaned.buffer, train, channel, config.epoch_window, config.preprocess.extra_ms),
                    {}, {}, {}, {}, {}};
  out.evoked = average_epochs(out.epochs);
  out.gate = amplitude_gate(out.evoked, config.amplitude_threshold_uv, config.gate_mode);
  if (out.epochs.size() >= 4) out.stability = stability_check(out.epochs, config.stability_threshold);
  if (!out.gate.accept) {
    out.note = "rejected by amplitude gate";
    return out;
  }
  try {
    out.metrics = compute_metrics(out.evoked, config.metrics);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoN1) throw;
    out.note = "no N1 above the noise floor";
  }
  return out;
}

PipelineRun run_pipeline(const Session& session, std::string_view channel, const PipelineConfig& config) {
  PipelineRun run{preprocess_session(session, config.preprocess), {}};
  for (std::size_t i = 0; i < run.preprocessed.session.trains.size(); ++i) {
    run.trains.push_back(analyze_train(run.preprocessed.session, i, channel, config));
  }
  return run;
}

}  // namespace epkit
