#include "zeroed/features/pattern.hpp"

#include "zeroed/core/error.hpp"

namespace zeroed {

namespace {

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Class symbol for one byte; '\0' means "emit literally" (L1 symbols).
char class_of(unsigned char c, PatternLevel level) {
  switch (level) {
    case PatternLevel::L1:
      return (is_upper(c) || is_lower(c) || is_digit(c)) ? 'A' : '\0';
    case PatternLevel::L2:
      if (is_upper(c) || is_lower(c)) return 'L';
      return is_digit(c) ? 'D' : 'S';
    case PatternLevel::L3:
      if (is_upper(c)) return 'U';
      if (is_lower(c)) return 'u';
      return is_digit(c) ? 'D' : 'S';
  }
  return 'S';
}

}  // namespace

std::string generalize_pattern(std::string_view value, PatternLevel level) {
  if (level != PatternLevel::L1 && level != PatternLevel::L2 && level != PatternLevel::L3) {
    throw InvalidArgument("pattern level must be 1, 2 or 3");
  }
  std::string out;
  std::size_t i = 0;
  while (i < value.size()) {
    const auto c = static_cast<unsigned char>(value[i]);
    const char cls = class_of(c, level);
    if (cls == '\0') {
      out.push_back(value[i]);
      ++i;
      continue;
    }
    std::size_t run = 1;
    while (i + run < value.size() && class_of(static_cast<unsigned char>(value[i + run]), level) == cls) ++run;
    out.push_back(cls);
    out.push_back('[');
    out += std::to_string(run);
    out.push_back(']');
    i += run;
  }
  return out;
}

}  // namespace zeroed
