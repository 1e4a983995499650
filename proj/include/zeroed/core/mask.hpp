#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zeroed/core/dataset.hpp"

namespace zeroed {

/// N x M grid of booleans; true marks an erroneous (positive) cell.
class CellMask {
 public:
  CellMask() = default;
  CellMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t i, std::size_t j) const { return bits_[i * cols_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v = true) { bits_[i * cols_ + j] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  std::size_t count_in_column(std::size_t j) const;
  bool same_shape(const CellMask& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const CellMask&, const CellMask&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// bit(i,j) = dirty(i,j) != truth(i,j), exact string comparison.
/// Throws ShapeError if the datasets differ in shape or attribute names.
CellMask diff_mask(const Dataset& dirty, const Dataset& truth);

/// Mask CSV: same header as the dataset, one row of 0/1 per tuple.
void write_mask_csv(std::ostream& out, const CellMask& mask, const std::vector<std::string>& attributes);
void save_mask_csv(const std::filesystem::path& path, const CellMask& mask,
                   const std::vector<std::string>& attributes);
CellMask load_mask_csv(const std::filesystem::path& path, std::vector<std::string>* attributes = nullptr);

}  // namespace zeroed
