#include "zeroed/core/serialize.hpp"

#include "zeroed/core/error.hpp"

namespace zeroed {

std::string serialize_tuple(const Dataset& ds, std::size_t i, std::span<const std::size_t> attrs) {
  if (i >= ds.num_rows()) throw InvalidArgument("row index out of range");
  std::string out;
  for (std::size_t k = 0; k < attrs.size(); ++k) {
    if (k) out += ", ";
    out += ds.attribute(attrs[k]);
    out += ": ";
    out += ds.cell(i, attrs[k]);
  }
  return out;
}

std::string serialize_tuple(const Dataset& ds, std::size_t i) {
  std::vector<std::size_t> all(ds.num_attributes());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return serialize_tuple(ds, i, all);
}

std::vector<std::pair<std::string, std::string>> parse_serialized_tuple(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(", ", start);
    const std::string_view part = text.substr(start, end == std::string_view::npos ? end : end - start);
    const std::size_t colon = part.find(": ");
    if (colon == std::string_view::npos) {
      // Trailing empty value: "name:" followed by nothing.
      if (!part.empty() && part.back() == ':') {
        out.emplace_back(std::string(part.substr(0, part.size() - 1)), std::string());
      } else {
        throw InvalidArgument("malformed serialized pair '" + std::string(part) + "'");
      }
    } else {
      out.emplace_back(std::string(part.substr(0, colon)), std::string(part.substr(colon + 2)));
    }
    if (end == std::string_view::npos) break;
    start = end + 2;
  }
  return out;
}

}  // namespace zeroed
