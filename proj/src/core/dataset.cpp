#include "zeroed/core/dataset.hpp"

#include <unordered_set>

#include "zeroed/core/error.hpp"

namespace zeroed {

Dataset::Dataset(std::string name, std::vector<std::string> attributes,
                 const std::vector<std::vector<std::string>>& rows)
    : name_(std::move(name)), attributes_(std::move(attributes)), rows_(rows.size()) {
  columns_.assign(attributes_.size(), {});
  for (auto& col : columns_) col.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != attributes_.size()) {
      throw CsvError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                     " cells, expected " + std::to_string(attributes_.size()));
    }
    for (std::size_t j = 0; j < attributes_.size(); ++j) columns_[j].push_back(rows[i][j]);
  }
  validate();
}

Dataset Dataset::from_columns(std::string name, std::vector<std::string> attributes,
                              std::vector<std::vector<std::string>> columns) {
  Dataset ds;
  ds.name_ = std::move(name);
  ds.attributes_ = std::move(attributes);
  ds.columns_ = std::move(columns);
  if (ds.columns_.size() != ds.attributes_.size()) {
    throw ShapeError("column count does not match attribute count");
  }
  ds.rows_ = ds.columns_.empty() ? 0 : ds.columns_.front().size();
  for (const auto& col : ds.columns_) {
    if (col.size() != ds.rows_) throw CsvError("columns have different lengths");
  }
  ds.validate();
  return ds;
}

void Dataset::validate() const {
  if (attributes_.empty()) throw InvalidArgument("dataset needs at least one attribute");
  if (rows_ == 0) throw InvalidArgument("dataset needs at least one row");
  std::unordered_set<std::string_view> seen;
  for (const auto& a : attributes_) {
    if (a.empty()) throw InvalidArgument("attribute names must be non-empty");
    if (!seen.insert(a).second) throw CsvError("duplicate attribute name '" + a + "'");
  }
}

std::optional<std::size_t> Dataset::find_attribute(std::string_view name) const noexcept {
  for (std::size_t j = 0; j < attributes_.size(); ++j) {
    if (attributes_[j] == name) return j;
  }
  return std::nullopt;
}

std::size_t Dataset::attribute_index(std::string_view name) const {
  if (auto j = find_attribute(name)) return *j;
  throw InvalidArgument("unknown attribute '" + std::string(name) + "'");
}

std::vector<std::string> Dataset::row(std::size_t i) const {
  std::vector<std::string> out;
  out.reserve(attributes_.size());
  for (const auto& col : columns_) out.push_back(col.at(i));
  return out;
}

bool Dataset::same_shape(const Dataset& other) const noexcept {
  return rows_ == other.rows_ && attributes_ == other.attributes_;
}

}  // namespace zeroed
