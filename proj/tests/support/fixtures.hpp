#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "zeroed/core/dataset.hpp"
#include "zeroed/core/rng.hpp"

namespace zeroed::testing {

inline Dataset table(std::vector<std::string> attrs, const std::vector<std::vector<std::string>>& rows,
                     std::string name = "fixture") {
  return Dataset(std::move(name), std::move(attrs), rows);
}

inline Dataset single_column(const std::string& attr, const std::vector<std::string>& values) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& v : values) rows.push_back({v});
  return table({attr}, rows);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("zeroed-test-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace zeroed::testing
