#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zeroed {

/// In-memory table of raw string cells. Missing values are empty strings.
///
/// Storage is column-major because every stage of the pipeline walks one
/// attribute at a time. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  /// Builds from row-major cells. Throws CsvError on ragged rows or
  /// InvalidArgument on empty/duplicate attribute names or an empty table.
  Dataset(std::string name, std::vector<std::string> attributes,
          const std::vector<std::vector<std::string>>& rows);

  static Dataset from_columns(std::string name, std::vector<std::string> attributes,
                              std::vector<std::vector<std::string>> columns);

  const std::string& name() const noexcept { return name_; }
  std::size_t num_rows() const noexcept { return rows_; }
  std::size_t num_attributes() const noexcept { return attributes_.size(); }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::string& attribute(std::size_t j) const { return attributes_.at(j); }

  std::optional<std::size_t> find_attribute(std::string_view name) const noexcept;
  /// Like find_attribute but throws InvalidArgument for unknown names.
  std::size_t attribute_index(std::string_view name) const;

  const std::string& cell(std::size_t i, std::size_t j) const { return columns_[j][i]; }
  std::span<const std::string> column(std::size_t j) const { return columns_.at(j); }
  const std::vector<std::vector<std::string>>& columns() const noexcept { return columns_; }

  std::vector<std::string> row(std::size_t i) const;

  bool same_shape(const Dataset& other) const noexcept;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.attributes_ == b.attributes_ && a.columns_ == b.columns_;
  }

 private:
  void validate() const;

  std::string name_;
  std::vector<std::string> attributes_;
  std::vector<std::vector<std::string>> columns_;
  std::size_t rows_ = 0;
};

/// Reference to one cell by (row, attribute index).
struct CellRef {
  std::size_t row = 0;
  std::size_t attr = 0;
  friend bool operator==(const CellRef&, const CellRef&) = default;
  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

}  // namespace zeroed
