#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace zeroed {

/// Dense row-major float32 matrix, one row per cell of an attribute.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  float& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  float operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<float> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<float>& data() noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  /// Appends one row; the first append on an empty 0-column matrix fixes the width.
  void append_row(std::span<const float> values);

  /// Rows selected by index, in the given order.
  FeatureMatrix gather(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

/// Writes `<base>.f32` (raw little-endian float32, row-major) and
/// `<base>.json` (rows, cols, plus caller metadata as a JSON object string).
void save_matrix(const std::filesystem::path& base, const FeatureMatrix& m, const std::string& meta_json = "{}");
FeatureMatrix load_matrix(const std::filesystem::path& base, std::string* meta_json = nullptr);

}  // namespace zeroed
