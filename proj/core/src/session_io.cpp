#include "epkit/session_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "epkit/error.hpp"
#include "json.hpp"

namespace epkit {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

double finite_number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidManifest, std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidManifest, std::string(what) + " not finite");
  return v;
}

std::uint64_t count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::InvalidManifest, std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

Point3 point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::InvalidManifest, std::string(what) + " must be [x, y, z]");
  }
  return {finite_number(j[0], what), finite_number(j[1], what), finite_number(j[2], what)};
}

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::InvalidManifest, std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

std::vector<std::vector<double>> read_raw(const fs::path& path, std::size_t channels,
                                          std::size_t samples) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, "raw data file not found: " + path.string());
  }
  const auto size = fs::file_size(path, ec);
  if (ec) throw Error(ErrorCode::MissingFile, "cannot stat " + path.string());
  if (samples > std::numeric_limits<std::uint64_t>::max() / 4 / std::max<std::size_t>(channels, 1)) {
    throw Error(ErrorCode::InvalidManifest, "declared size overflows");
  }
  const std::uint64_t expected = static_cast<std::uint64_t>(channels) * samples * 4u;
  if (size < expected) {
    throw Error(ErrorCode::TruncatedData, path.string() + " holds " + std::to_string(size) +
                                              " bytes, manifest requires " + std::to_string(expected));
  }
  if (size > expected) {
    throw Error(ErrorCode::InvalidManifest, path.string() + " is longer than the manifest declares");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());

  std::vector<std::vector<double>> out(channels, std::vector<double>(samples));
  std::vector<unsigned char> bytes(samples * 4);
  for (auto& ch : out) {
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw Error(ErrorCode::TruncatedData, "short read from " + path.string());
    for (std::size_t i = 0; i < samples; ++i) {
      std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                        static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8 |
                        static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16 |
                        static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24;
      ch[i] = static_cast<double>(std::bit_cast<float>(u));
    }
  }
  return out;
}

void write_raw(const fs::path& path, const SignalBuffer& buffer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  std::vector<unsigned char> bytes(buffer.n_samples() * 4);
  for (std::size_t c = 0; c < buffer.n_channels(); ++c) {
    auto ch = buffer.channel(c);
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(ch[i]));
      bytes[4 * i] = static_cast<unsigned char>(u & 0xffu);
      bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xffu);
      bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xffu);
      bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xffu);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw Error(ErrorCode::MissingFile, "write failed for " + path.string());
}

Session parse_manifest(const json& m, const fs::path& base_dir) {
  const double fs_hz = finite_number(field(m, "fs_hz"), "fs_hz");
  if (!(fs_hz > 0.0)) throw Error(ErrorCode::InvalidManifest, "fs_hz must be positive");
  const auto n_samples = count(field(m, "n_samples"), "n_samples");
  if (n_samples == 0) throw Error(ErrorCode::InvalidManifest, "n_samples must be positive");

  const json& fmt = field(m, "sample_format");
  if (!fmt.is_string() || fmt.get<std::string>() != "f32le") {
    throw Error(ErrorCode::InvalidManifest, "sample_format must be f32le");
  }
  const json& raw = field(m, "raw_file");
  if (!raw.is_string() || raw.get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidManifest, "raw_file must be a non-empty string");
  }

  const json& channels = field(m, "channels");
  if (!channels.is_array() || channels.empty()) {
    throw Error(ErrorCode::InvalidManifest, "channels must be a non-empty list");
  }
  std::vector<std::string> ids;
  ElectrodeGeometry geometry;
  std::size_t with_position = 0;
  for (const auto& ch : channels) {
    const json& id = field(ch, "id");
    if (!id.is_string() || id.get<std::string>().empty()) {
      throw Error(ErrorCode::InvalidManifest, "channel id must be a non-empty string");
    }
    ids.push_back(id.get<std::string>());
    if (ch.contains("xyz_mm")) {
      geometry.positions[ids.back()] = point(ch.at("xyz_mm"), "xyz_mm");
      ++with_position;
    }
  }
  if (with_position != 0 && with_position != ids.size()) {
    throw Error(ErrorCode::InvalidManifest, "either all channels or none carry xyz_mm");
  }

  auto samples = read_raw(base_dir / raw.get<std::string>(), ids.size(), n_samples);
  SignalBuffer buffer(std::move(samples), fs_hz, std::move(ids));

  std::vector<StimTrain> trains;
  const json& train_list = field(m, "trains");
  if (!train_list.is_array()) throw Error(ErrorCode::InvalidManifest, "trains must be a list");
  for (const auto& t : train_list) {
    const json& kind = field(t, "kind");
    if (!kind.is_string()) throw Error(ErrorCode::InvalidManifest, "kind must be a string");
    const json& onsets_json = field(t, "pulse_onsets_samples");
    if (!onsets_json.is_array()) throw Error(ErrorCode::InvalidManifest, "pulse_onsets_samples must be a list");
    std::vector<std::size_t> onsets;
    for (const auto& o : onsets_json) onsets.push_back(count(o, "pulse onset"));
    const json& pol_json = field(t, "polarity_pattern");
    if (!pol_json.is_array()) throw Error(ErrorCode::InvalidManifest, "polarity_pattern must be a list");
    std::vector<int> polarity;
    for (const auto& p : pol_json) {
      if (!p.is_number_integer()) throw Error(ErrorCode::InvalidManifest, "polarity must be +1/-1");
      const auto v = p.get<std::int64_t>();
      if (v != 1 && v != -1) throw Error(ErrorCode::InvalidManifest, "polarity must be +1/-1");
      polarity.push_back(static_cast<int>(v));
    }
    if (polarity.empty()) throw Error(ErrorCode::InvalidManifest, "polarity_pattern is empty");
    const Point3 site = point(field(t, "site_xyz_mm"), "site_xyz_mm");
    geometry.des_sites["train" + std::to_string(trains.size())] = site;
    trains.emplace_back(parse_kind(kind.get<std::string>()),
                        finite_number(field(t, "f_des_hz"), "f_des_hz"),
                        finite_number(field(t, "pulse_width_ms"), "pulse_width_ms"), std::move(onsets),
                        std::move(polarity), site, fs_hz);
  }

  std::string label;
  if (m.contains("patient_label")) {
    if (!m.at("patient_label").is_string()) throw Error(ErrorCode::InvalidManifest, "patient_label must be text");
    label = m.at("patient_label").get<std::string>();
  }
  std::vector<std::string> processing;
  if (m.contains("processing")) {
    const json& steps = m.at("processing");
    if (!steps.is_array()) throw Error(ErrorCode::InvalidManifest, "processing must be a list");
    for (const auto& s : steps) {
      if (!s.is_string()) throw Error(ErrorCode::InvalidManifest, "processing entries must be text");
      processing.push_back(s.get<std::string>());
    }
  }

  std::optional<ElectrodeGeometry> geo;
  if (with_position != 0) geo = std::move(geometry);
  Session session{std::move(buffer), std::move(trains), std::move(geo), std::move(label),
                  std::move(processing)};
  validate(session);
  return session;
}

}  // namespace

Session load_session(const fs::path& manifest_or_dir) {
  std::error_code ec;
  fs::path manifest = manifest_or_dir;
  if (fs::is_directory(manifest, ec)) manifest /= kManifestName;
  if (!fs::is_regular_file(manifest, ec)) {
    throw Error(ErrorCode::MissingFile, "manifest not found: " + manifest.string());
  }
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + manifest.string());
  std::stringstream text;
  text << in.rdbuf();

  json m;
  try {
    m = json::parse(text.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, std::string("parse error: ") + e.what());
  }
  try {
    return parse_manifest(m, manifest.parent_path());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, e.what());
  }
}

std::string manifest_text(const Session& session, const std::string& raw_file) {
  json m;
  m["format"] = "epkit-session/1";
  m["patient_label"] = session.patient_label;
  m["fs_hz"] = session.buffer.fs();
  m["n_samples"] = session.buffer.n_samples();
  m["sample_format"] = "f32le";
  m["raw_file"] = raw_file;
  json channels = json::array();
  for (const auto& id : session.buffer.channel_ids()) {
    json ch;
    ch["id"] = id;
    if (session.geometry) ch["xyz_mm"] = point_json(session.geometry->positions.at(id));
    channels.push_back(std::move(ch));
  }
  m["channels"] = std::move(channels);
  json trains = json::array();
  for (const auto& t : session.trains) {
    json tj;
    tj["kind"] = std::string(to_string(t.kind()));
    tj["f_des_hz"] = t.f_des_hz();
    tj["pulse_width_ms"] = t.pulse_width_ms();
    tj["pulse_onsets_samples"] = t.pulse_onsets();
    tj["polarity_pattern"] = t.polarity_pattern();
    tj["site_xyz_mm"] = point_json(t.site());
    trains.push_back(std::move(tj));
  }
  m["trains"] = std::move(trains);
  m["processing"] = session.processing;
  return m.dump(2) + "\n";
}

fs::path save_session(const Session& session, const fs::path& dir, const std::string& raw_file) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::MissingFile, "cannot create directory " + dir.string());
  write_raw(dir / raw_file, session.buffer);
  const fs::path manifest = dir / kManifestName;
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + manifest.string());
  out << manifest_text(session, raw_file);
  if (!out) throw Error(ErrorCode::MissingFile, "write failed for " + manifest.string());
  return manifest;
}

}  // namespace epkit
