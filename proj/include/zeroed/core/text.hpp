#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace zeroed {

/// Parses the whole string as a finite decimal number (no surrounding
/// whitespace, optional sign, optional exponent).
std::optional<double> parse_number(std::string_view text) noexcept;

/// Optional sign followed by one or more ASCII digits.
bool is_integer_text(std::string_view text) noexcept;

std::string to_lower_ascii(std::string_view text);
std::string to_upper_ascii(std::string_view text);

/// Shortest round-trip decimal representation; integral values print
/// without a fractional part.
std::string format_number(double value);

/// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view text) noexcept;

}  // namespace zeroed
