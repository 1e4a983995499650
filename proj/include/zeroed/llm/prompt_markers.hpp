#pragma once

#include <string_view>

// Line markers that prompts are built with and that the offline oracle
// provider parses back. Keep the two sides in sync through these constants.

namespace zeroed::llm::markers {

/// "Attribute: <name>" names the target attribute of a prompt.
inline constexpr std::string_view kAttribute = "Attribute: ";

/// "[row <id>] <payload>" introduces one sampled row or value.
inline constexpr std::string_view kRowOpen = "[row ";
inline constexpr std::string_view kRowClose = "] ";

/// Heading of the distribution-summary block in guideline prompts.
inline constexpr std::string_view kProbeSection = "## Distribution summaries";

/// Prefix of every Markdown section heading in prompts.
inline constexpr std::string_view kSectionPrefix = "## ";

}  // namespace zeroed::llm::markers
