#include "zeroed/core/mask.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "zeroed/core/csv.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"

namespace zeroed {

std::size_t CellMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t CellMask::count_in_column(std::size_t j) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < rows_; ++i) n += bits_[i * cols_ + j];
  return n;
}

CellMask diff_mask(const Dataset& dirty, const Dataset& truth) {
  if (!dirty.same_shape(truth)) {
    throw ShapeError("dirty and ground-truth datasets differ in shape or attribute names");
  }
  CellMask mask(dirty.num_rows(), dirty.num_attributes());
  for (std::size_t j = 0; j < dirty.num_attributes(); ++j) {
    const auto a = dirty.column(j);
    const auto b = truth.column(j);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) mask.set(i, j);
    }
  }
  return mask;
}

void write_mask_csv(std::ostream& out, const CellMask& mask, const std::vector<std::string>& attributes) {
  if (attributes.size() != mask.cols()) throw ShapeError("mask width does not match header");
  write_csv_row(out, attributes);
  for (std::size_t i = 0; i < mask.rows(); ++i) {
    for (std::size_t j = 0; j < mask.cols(); ++j) {
      if (j) out << ',';
      out << (mask.get(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

void save_mask_csv(const std::filesystem::path& path, const CellMask& mask,
                   const std::vector<std::string>& attributes) {
  std::ostringstream out;
  write_mask_csv(out, mask, attributes);
  write_file_atomic(path, out.str());
}

CellMask load_mask_csv(const std::filesystem::path& path, std::vector<std::string>* attributes) {
  const Dataset ds = load_csv(path, true);
  CellMask mask(ds.num_rows(), ds.num_attributes());
  for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
    for (std::size_t i = 0; i < ds.num_rows(); ++i) {
      const auto& v = ds.cell(i, j);
      if (v == "1") {
        mask.set(i, j);
      } else if (v != "0") {
        throw CsvError("mask cell (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0/1");
      }
    }
  }
  if (attributes) *attributes = ds.attributes();
  return mask;
}

}  // namespace zeroed
