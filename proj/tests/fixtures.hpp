#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "limner/types.hpp"

namespace limner::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("limner-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
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

inline AnnotationDocument blank_document(const std::string& id = "p", std::int64_t w = 800, std::int64_t h = 600) {
  AnnotationDocument doc;
  doc.meta.id = id;
  doc.meta.title = "Test " + id;
  doc.meta.width_px = w;
  doc.meta.height_px = h;
  return doc;
}

}  // namespace limner::testing
