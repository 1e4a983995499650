#pragma once

#include <string_view>

#include "json.hpp"
#include "zeroed/core/error.hpp"

namespace zeroed::llm {

enum class Shape { Array, Object };

/// The response held no JSON value of the expected form. Recoverable: the
/// caller may run a repair round.
class StructuredOutputError : public Error {
 public:
  using Error::Error;
};

/// Strips Markdown code fences, takes the first parseable JSON array or
/// object and checks its top-level form. An object wrapping exactly one
/// array is unwrapped when an array is expected.
nlohmann::json extract_structured(std::string_view text, Shape shape);

}  // namespace zeroed::llm
