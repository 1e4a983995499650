#include "zeroed/llm/structured.hpp"

#include <optional>
#include <string>

namespace zeroed::llm {

namespace {

// Contents of the first ``` fenced block, or the whole text when unfenced.
std::string_view strip_fences(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return text;
  ++body_start;
  const auto close = text.find("```", body_start);
  if (close == std::string_view::npos) return text.substr(body_start);
  return text.substr(body_start, close - body_start);
}

// End (exclusive) of the bracketed value starting at `start`, honouring strings.
std::optional<std::size_t> match_brackets(std::string_view s, std::size_t start) {
  std::string stack;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      stack.push_back(c == '[' ? ']' : '}');
    } else if (c == ']' || c == '}') {
      if (stack.empty() || stack.back() != c) return std::nullopt;
      stack.pop_back();
      if (stack.empty()) return i + 1;
    }
  }
  return std::nullopt;
}

std::optional<nlohmann::json> first_value(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '[' && s[i] != '{') continue;
    const auto end = match_brackets(s, i);
    if (!end) continue;
    auto parsed = nlohmann::json::parse(s.substr(i, *end - i), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return std::nullopt;
}

}  // namespace

nlohmann::json extract_structured(std::string_view text, Shape shape) {
  auto value = first_value(strip_fences(text));
  if (!value) value = first_value(text);
  if (!value) throw StructuredOutputError("no JSON value found in response");
  if (shape == Shape::Array) {
    if (value->is_array()) return *value;
    if (value->is_object() && value->size() == 1 && value->begin()->is_array()) return value->begin().value();
    throw StructuredOutputError("expected a JSON array");
  }
  if (!value->is_object()) throw StructuredOutputError("expected a JSON object");
  return *value;
}

}  // namespace zeroed::llm
