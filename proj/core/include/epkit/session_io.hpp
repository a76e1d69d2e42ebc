#pragma once

#include <filesystem>
#include <string>

#include "epkit/signal.hpp"

namespace epkit {

inline constexpr const char* kManifestName = "session.json";
inline constexpr const char* kDefaultRawName = "signal.f32";

// Loads a session from a manifest file, or from a directory containing
// session.json. The raw file path is resolved relative to the manifest.
//
// Errors: MissingFile, TruncatedData (raw file shorter than the manifest
// claims), InvalidManifest (malformed or invariant-violating content).
Session load_session(const std::filesystem::path& manifest_or_dir);

// Canonical manifest text for a session whose samples live in `raw_file`.
// Field order is fixed, so load_session -> manifest_text reproduces a
// manifest written by save_session byte for byte.
std::string manifest_text(const Session& session, const std::string& raw_file = kDefaultRawName);

// Writes session.json and the float32 little-endian channel-major raw file
// into `dir` (created if needed). Returns the manifest path.
std::filesystem::path save_session(const Session& session, const std::filesystem::path& dir,
                                   const std::string& raw_file = kDefaultRawName);

}  // namespace epkit
