#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "epkit/error.hpp"

#define CHECK_EPKIT_ERROR(expr, expected_code)                                   \
  do {                                                                           \
    bool thrown_ = false;                                                        \
    try {                                                                        \
      (void)(expr);                                                              \
    } catch (const epkit::Error& e_) {                                           \
      thrown_ = true;                                                            \
      CHECK_MESSAGE(e_.code() == (expected_code), "got " << e_.what());          \
    }                                                                            \
    CHECK_MESSAGE(thrown_, "expected " << epkit::to_string(expected_code));      \
  } while (false)

namespace testutil {

// Fresh scratch directory under EPKIT_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("EPKIT_TEST_TMP");
  std::filesystem::path dir =
      (root != nullptr ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "epkit_tests") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
