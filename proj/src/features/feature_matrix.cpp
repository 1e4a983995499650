#include "zeroed/features/feature_matrix.hpp"

#include <fstream>

#include "json.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"

namespace zeroed {

void FeatureMatrix::append_row(std::span<const float> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw ShapeError("appended row width does not match matrix");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

FeatureMatrix FeatureMatrix::gather(std::span<const std::size_t> rows) const {
  FeatureMatrix out(rows.size(), cols_);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = row(rows[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

void save_matrix(const std::filesystem::path& base, const FeatureMatrix& m, const std::string& meta_json) {
  write_bytes_atomic(with_suffix(base, ".f32"),
                     std::span<const char>(reinterpret_cast<const char*>(m.data().data()),
                                           m.data().size() * sizeof(float)));
  nlohmann::ordered_json side;
  side["rows"] = m.rows();
  side["cols"] = m.cols();
  side["dtype"] = "float32";
  side["order"] = "row-major";
  side["meta"] = nlohmann::ordered_json::parse(meta_json);
  write_file_atomic(with_suffix(base, ".json"), side.dump(2) + "\n");
}

FeatureMatrix load_matrix(const std::filesystem::path& base, std::string* meta_json) {
  std::ifstream side_in(with_suffix(base, ".json"), std::ios::binary);
  if (!side_in) throw IoError("cannot open " + with_suffix(base, ".json").string());
  const auto side = nlohmann::json::parse(side_in);
  FeatureMatrix m(side.at("rows").get<std::size_t>(), side.at("cols").get<std::size_t>());
  std::ifstream in(with_suffix(base, ".f32"), std::ios::binary);
  if (!in) throw IoError("cannot open " + with_suffix(base, ".f32").string());
  in.read(reinterpret_cast<char*>(m.data().data()), static_cast<std::streamsize>(m.data().size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != m.data().size() * sizeof(float)) {
    throw IoError("truncated matrix file " + with_suffix(base, ".f32").string());
  }
  if (meta_json) *meta_json = side.value("meta", nlohmann::json::object()).dump();
  return m;
}

}  // namespace zeroed
