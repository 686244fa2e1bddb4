#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace testsupport {

// Fresh scratch directory under TOPICPREF_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  static std::atomic<int> counter{0};
  const char* root = std::getenv("TOPICPREF_TEST_TMP");
  std::filesystem::path base = root ? root : std::filesystem::temp_directory_path() / "topicpref-tests";
  auto dir = base / (name + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport
