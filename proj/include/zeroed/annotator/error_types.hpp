#pragma once

#include <array>
#include <string_view>

namespace zeroed::annotator {

/// Fixed descriptions of the five error types, embedded in guideline and
/// labeling prompts. Bump the version whenever the wording changes, since it
/// changes every prompt and therefore every cache key.
inline constexpr std::string_view kErrorTypesVersion = "1";

struct ErrorTypeDescription {
  std::string_view name;
  std::string_view description;
};

inline constexpr std::array<ErrorTypeDescription, 5> kErrorTypes = {{
    {"missing value", "The cell is empty or holds a placeholder where a real value is expected."},
    {"typo", "A misspelling of a valid value, usually within three character edits of it."},
    {"pattern violation", "The value breaks the format the rest of the column follows (case, separators, "
                          "digit grouping, length)."},
    {"outlier", "The value is far outside the usual range or domain of the attribute, such as a number scaled "
                "by ten or a token that does not belong to the domain."},
    {"rule violation", "The value contradicts a dependency with another attribute of the same tuple, such as "
                       "a state that does not match the city."},
}};

}  // namespace zeroed::annotator
