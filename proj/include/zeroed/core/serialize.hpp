#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zeroed/core/dataset.hpp"

namespace zeroed {

/// Renders tuple i as `a1: v1, a2: v2, ...` over the given attribute indices,
/// in the order given. Empty cells render as nothing after the colon.
std::string serialize_tuple(const Dataset& ds, std::size_t i, std::span<const std::size_t> attrs);

/// All attributes, schema order.
std::string serialize_tuple(const Dataset& ds, std::size_t i);

/// Inverse of serialize_tuple for values that contain no ", " sequence.
std::vector<std::pair<std::string, std::string>> parse_serialized_tuple(std::string_view text);

}  // namespace zeroed
