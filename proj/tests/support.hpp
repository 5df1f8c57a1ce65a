#pragma once

#include "elyte/error.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace support {

/// Fresh directory removed on destruction.
class TempDir {
public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "elyte-test-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path sample_dir() { return std::filesystem::path(ELYTE_SOURCE_DIR) / "data" / "fdc_sample"; }

}  // namespace support

/// Evaluates `expr` and checks that it throws elyte::Error with code `ecode`.
#define CHECK_THROWS_CODE(expr, ecode)                         \
  do {                                                         \
    bool thrown_ = false;                                      \
    try {                                                      \
      (void)(expr);                                            \
    } catch (const elyte::Error& e_) {                         \
      thrown_ = true;                                          \
      CHECK_MESSAGE(e_.code() == (ecode), e_.what());          \
    }                                                          \
    CHECK_MESSAGE(thrown_, "expected " #ecode " from " #expr); \
  } while (0)
