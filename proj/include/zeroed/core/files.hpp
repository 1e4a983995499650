#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace zeroed {

/// `<base><suffix>` without treating dots in base as an extension.
std::filesystem::path with_suffix(const std::filesystem::path& base, std::string_view suffix);

/// Writes through a sibling temp file and renames it into place, creating
/// parent directories. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void write_bytes_atomic(const std::filesystem::path& path, std::span<const char> bytes);

/// Whole file as a string. Throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace zeroed
