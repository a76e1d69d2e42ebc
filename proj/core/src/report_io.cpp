#include "epkit/report_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "epkit/error.hpp"
#include "json.hpp"

namespace epkit {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kNa = "NA";

[[noreturn]] void bad_table(const std::string& what) { throw Error(ErrorCode::InvalidManifest, what); }

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(kNa); }

std::string clean_field(std::string s) {
  for (char& ch : s) {
    if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
  }
  return s.empty() ? "-" : s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_table("cannot parse '" + std::string(s) + "' as " + what);
  return v;
}

std::optional<double> parse_opt(std::string_view s, const std::string& what) {
  if (s == kNa) return std::nullopt;
  return parse_double(s, what);
}

std::size_t parse_count(std::string_view s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_table("cannot parse '" + std::string(s) + "' as " + what);
  return v;
}

bool parse_bool(std::string_view s, const std::string& what) {
  if (s == "true") return true;
  if (s == "false") return false;
  bad_table(what + " must be true or false");
}

RelaxationClass parse_class(std::string_view s) {
  if (s == to_string(RelaxationClass::monotonic)) return RelaxationClass::monotonic;
  if (s == to_string(RelaxationClass::after_positivity)) return RelaxationClass::after_positivity;
  bad_table("unknown relaxation class '" + std::string(s) + "'");
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json lobe_json(const CosineLobe& l) {
  return {{"latency_ms", l.latency_ms}, {"amplitude_uv", l.amplitude_uv}, {"width_ms", l.width_ms}};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string evoked_text(const EvokedPotential& ep) {
  std::ostringstream out;
  out << "# kind: " << to_string(ep.kind) << "\n";
  out << "# channel: " << clean_field(ep.channel) << "\n";
  out << "# n_averaged: " << ep.n_averaged << "\n";
  out << "# fs_hz: " << format_number(ep.grid.fs) << "\n";
  out << "# first_offset: " << ep.grid.first_offset << "\n";
  out << "# window_ms: " << format_number(ep.window.t_min_ms) << " " << format_number(ep.window.t_max_ms) << "\n";
  out << "# artifact_end_ms: " << format_number(ep.artifact_end_ms) << "\n";
  out << "# inverted: " << (ep.inverted ? "true" : "false") << "\n";
  out << "time_ms\tamplitude_uv\n";
  for (std::size_t i = 0; i < ep.trace.size(); ++i) {
    out << format_number(ep.grid.time_ms(i)) << "\t" << format_number(ep.trace[i]) << "\n";
  }
  return out.str();
}

EvokedPotential parse_evoked(std::string_view text) {
  EvokedPotential ep;
  std::map<std::string, std::string> meta;
  bool header_seen = false;
  for (std::string_view line : lines_of(text)) {
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const auto colon = line.find(": ");
      if (colon == std::string_view::npos) bad_table("malformed metadata line");
      meta[std::string(line.substr(2, colon - 2))] = std::string(line.substr(colon + 2));
      continue;
    }
    if (!header_seen) {
      if (line != "time_ms\tamplitude_uv") bad_table("missing evoked column header");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 2) bad_table("evoked rows need two columns");
    ep.trace.push_back(parse_double(cols[1], "amplitude"));
  }
  for (const char* key : {"kind", "channel", "n_averaged", "fs_hz", "first_offset", "window_ms", "artifact_end_ms",
                          "inverted"}) {
    if (!meta.count(key)) bad_table(std::string("missing metadata '") + key + "'");
  }
  if (ep.trace.empty()) bad_table("evoked file has no samples");
  try {
    ep.kind = parse_kind(meta["kind"]);
  } catch (const Error&) {
    bad_table("unknown kind '" + meta["kind"] + "'");
  }
  ep.channel = meta["channel"] == "-" ? "" : meta["channel"];
  ep.n_averaged = parse_count(meta["n_averaged"], "n_averaged");
  ep.grid.fs = parse_double(meta["fs_hz"], "fs_hz");
  {
    const std::string& s = meta["first_offset"];
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) bad_table("bad first_offset");
    ep.grid.first_offset = static_cast<std::ptrdiff_t>(v);
  }
  const auto w = split(meta["window_ms"], ' ');
  if (w.size() != 2) bad_table("window_ms needs two values");
  ep.window = {parse_double(w[0], "window"), parse_double(w[1], "window")};
  ep.artifact_end_ms = parse_double(meta["artifact_end_ms"], "artifact_end_ms");
  ep.inverted = parse_bool(meta["inverted"], "inverted");
  ep.grid.length = ep.trace.size();
  if (!(ep.grid.fs > 0.0)) bad_table("fs_hz must be positive");
  return ep;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "patient",          "channel",           "kind",          "train",        "n_averaged",
      "t_zc1_ms",         "t_zc2_ms",          "w_n1_ms",       "whq_n1_ms",    "n1_maxamp_uv",
      "n1_latency_ms",    "area_40_100_uv_ms", "min_slope_50_80_uv_per_ms",     "relaxation_class",
      "p0_latency_ms",    "p0_amplitude_uv",   "inverted"};
  return cols;
}

std::string metrics_table_text(std::span<const MetricsRow> rows) {
  std::ostringstream out;
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
  out << "\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << clean_field(r.patient) << "\t" << clean_field(r.channel) << "\t" << to_string(r.kind) << "\t" << r.train
        << "\t" << r.n_averaged << "\t" << opt(m.t_zc1) << "\t" << opt(m.t_zc2) << "\t" << opt(m.w_n1) << "\t"
        << opt(m.whq_n1) << "\t" << format_number(m.n1_maxamp) << "\t" << format_number(m.n1_latency) << "\t"
        << format_number(m.area_40_100) << "\t" << format_number(m.min_slope_50_80) << "\t"
        << to_string(m.relaxation_class) << "\t" << (m.p0 ? format_number(m.p0->latency_ms) : std::string(kNa))
        << "\t" << (m.p0 ? format_number(m.p0->amplitude_uv) : std::string(kNa)) << "\t"
        << (m.inverted ? "true" : "false") << "\n";
  }
  return out.str();
}

std::vector<MetricsRow> parse_metrics_table(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) bad_table("empty metrics table");
  if (split(lines[0], '\t') != metrics_columns()) bad_table("metrics table header does not match");
  std::vector<MetricsRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto c = split(lines[li], '\t');
    if (c.size() != metrics_columns().size()) bad_table("metrics row " + std::to_string(li) + " has wrong width");
    MetricsRow r;
    r.patient = c[0] == "-" ? "" : c[0];
    r.channel = c[1] == "-" ? "" : c[1];
    try {
      r.kind = parse_kind(c[2]);
    } catch (const Error&) {
      bad_table("unknown kind '" + c[2] + "'");
    }
    r.train = parse_count(c[3], "train");
    r.n_averaged = parse_count(c[4], "n_averaged");
    auto& m = r.metrics;
    m.t_zc1 = parse_opt(c[5], "t_zc1_ms");
    m.t_zc2 = parse_opt(c[6], "t_zc2_ms");
    m.w_n1 = parse_opt(c[7], "w_n1_ms");
    m.whq_n1 = parse_opt(c[8], "whq_n1_ms");
    m.n1_maxamp = parse_double(c[9], "n1_maxamp_uv");
    m.n1_latency = parse_double(c[10], "n1_latency_ms");
    m.area_40_100 = parse_double(c[11], "area_40_100_uv_ms");
    m.min_slope_50_80 = parse_double(c[12], "min_slope_50_80_uv_per_ms");
    m.relaxation_class = parse_class(c[13]);
    const auto p0_lat = parse_opt(c[14], "p0_latency_ms");
    const auto p0_amp = parse_opt(c[15], "p0_amplitude_uv");
    if (p0_lat.has_value() != p0_amp.has_value()) bad_table("P0 latency and amplitude must both be present or NA");
    if (p0_lat) m.p0 = P0Summary{*p0_lat, *p0_amp};
    m.inverted = parse_bool(c[16], "inverted");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::optional<double>> metrics_column(std::span<const MetricsRow> rows, std::string_view column) {
  using Getter = std::optional<double> (*)(const MetricsRow&);
  static const std::map<std::string, Getter, std::less<>> getters = {
      {"t_zc1_ms", [](const MetricsRow& r) { return r.metrics.t_zc1; }},
      {"t_zc2_ms", [](const MetricsRow& r) { return r.metrics.t_zc2; }},
      {"w_n1_ms", [](const MetricsRow& r) { return r.metrics.w_n1; }},
      {"whq_n1_ms", [](const MetricsRow& r) { return r.metrics.whq_n1; }},
      {"n1_maxamp_uv", [](const MetricsRow& r) { return std::optional<double>(r.metrics.n1_maxamp); }},
      {"n1_latency_ms", [](const MetricsRow& r) { return std::optional<double>(r.metrics.n1_latency); }},
      {"area_40_100_uv_ms", [](const MetricsRow& r) { return std::optional<double>(r.metrics.area_40_100); }},
      {"min_slope_50_80_uv_per_ms",
       [](const MetricsRow& r) { return std::optional<double>(r.metrics.min_slope_50_80); }},
      {"p0_latency_ms",
       [](const MetricsRow& r) { return r.metrics.p0 ? std::optional<double>(r.metrics.p0->latency_ms) : std::nullopt; }},
      {"p0_amplitude_uv",
       [](const MetricsRow& r) {
         return r.metrics.p0 ? std::optional<double>(r.metrics.p0->amplitude_uv) : std::nullopt;
       }},
  };
  const auto it = getters.find(column);
  if (it == getters.end()) throw Error(ErrorCode::ConfigError, "no numeric metrics column '" + std::string(column) + "'");
  std::vector<std::optional<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(it->second(r));
  return out;
}

std::string tf_map_text(const TimeFrequencyMap& map) {
  std::ostringstream out;
  out << "# n_epochs: " << map.n_epochs << "\n";
  out << "# window_samples: " << map.window_samples << "\n";
  out << "# nfft: " << map.nfft << "\n";
  out << "# baseline_centers_ms: " << format_number(map.baseline_center_lo_ms) << " "
      << format_number(map.baseline_center_hi_ms) << "\n";
  out << "# unit: dB\n";
  out << "center_ms";
  for (double f : map.freqs_hz) out << "\t" << format_number(f);
  out << "\n";
  for (std::size_t c = 0; c < map.centers_ms.size(); ++c) {
    out << format_number(map.centers_ms[c]);
    for (double v : map.power_db[c]) out << "\t" << format_number(v);
    out << "\n";
  }
  return out.str();
}

std::string test_result_text(const TestResult& r, std::string_view field) {
  std::ostringstream out;
  out << "test\t" << r.test_name << "\n";
  if (!field.empty()) out << "field\t" << field << "\n";
  out << "n\t" << r.n << "\n";
  out << "statistic\t" << format_number(r.statistic) << "\n";
  out << "df\t" << opt(r.df) << "\n";
  out << "tails\t" << r.tails() << "\n";
  out << "alternative\t" << to_string(r.alternative) << "\n";
  out << "p_value\t" << format_number(r.p_value) << "\n";
  return out.str();
}

std::string velocity_report_text(std::span<const ConductionEstimate> estimates) {
  std::ostringstream out;
  out << "patient\tdcr\tacep\tdistance_mm\tdelay_ms\tvelocity_mps\tvalid\n";
  for (const auto& e : estimates) {
    out << clean_field(e.patient) << "\t" << clean_field(e.dcr_id) << "\t" << clean_field(e.acep_id) << "\t"
        << format_number(e.distance_mm) << "\t" << format_number(e.delay_ms) << "\t" << opt(e.velocity_mps) << "\t"
        << (e.valid() ? "true" : "false") << "\n";
  }

  std::map<std::string, std::vector<ConductionEstimate>> by_patient;
  for (const auto& e : estimates) by_patient[e.patient].push_back(e);
  auto summary = [&](const std::string& label, std::span<const ConductionEstimate> group) {
    const VelocitySummary s = summarize_velocities(group);
    out << "# " << label << ": n_pairs=" << s.n_pairs << " n_invalid=" << s.n_invalid
        << " mean_valid_mps=" << opt(s.mean_valid_mps) << " median_valid_mps=" << opt(s.median_valid_mps)
        << " mean_all_mps=" << opt(s.mean_all_mps) << " median_all_mps=" << opt(s.median_all_mps) << "\n";
  };
  for (const auto& [patient, group] : by_patient) summary("patient " + clean_field(patient), group);
  summary("all", estimates);
  return out.str();
}

std::string truth_json(const SynthRecording& rec) {
  const auto& k = rec.kernel;
  const auto& t = rec.truth;
  json j;
  j["format"] = "epkit-truth/1";
  j["kind"] = std::string(to_string(k.kind));
  j["delay_ms"] = k.conduction_delay_ms;
  j["kernel"] = {{"p0", lobe_json(k.p0)},
                 {"n1",
                  {{"latency_ms", k.n1.latency_ms},
                   {"amplitude_uv", k.n1.amplitude_uv},
                   {"rise_ms", k.n1.rise_ms},
                   {"decay_ms", k.n1.decay_ms},
                   {"return_ms", k.n1.return_ms},
                   {"onset_ms", k.n1.onset_ms}}},
                 {"after_positivity", k.after_positivity ? lobe_json(*k.after_positivity) : json(nullptr)},
                 {"taper_ms", json::array({k.taper_start_ms, k.taper_end_ms})}};
  j["noise"] = {{"white_sigma_uv", rec.noise.white_sigma_uv}, {"line_amp_uv", rec.noise.line_amp_uv},
                {"line_hz", rec.noise.line_hz},               {"line_phase_rad", rec.noise.line_phase_rad},
                {"artifact_amp_uv", rec.noise.artifact_amp_uv}, {"seed", rec.noise.seed}};
  j["truth"] = {{"n1_onset_ms", t.n1_onset_ms},
                {"t_zc1_ms", optional_json(t.t_zc1)},
                {"t_zc2_ms", optional_json(t.t_zc2)},
                {"w_n1_ms", optional_json(t.w_n1)},
                {"whq_n1_ms", optional_json(t.whq_n1)},
                {"n1_maxamp_uv", t.n1_maxamp},
                {"n1_latency_ms", t.n1_latency},
                {"area_40_100_uv_ms", t.area_40_100},
                {"min_slope_50_80_uv_per_ms", t.min_slope_50_80},
                {"relaxation_class", std::string(to_string(t.relaxation_class))},
                {"p0_latency_ms", t.p0 ? json(t.p0->latency_ms) : json(nullptr)},
                {"p0_amplitude_uv", t.p0 ? json(t.p0->amplitude_uv) : json(nullptr)}};
  j["template_fs_hz"] = rec.session.buffer.fs();
  j["template_uv"] = rec.template_trace;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::MissingFile, "write failed for " + path.string());
}

}  // namespace epkit
