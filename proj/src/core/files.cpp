#include "zeroed/core/files.hpp"

#include <fstream>
#include <sstream>

#include "zeroed/core/error.hpp"

namespace zeroed {

std::filesystem::path with_suffix(const std::filesystem::path& base, std::string_view suffix) {
  std::filesystem::path p = base;
  p += std::string(suffix);
  return p;
}

void write_bytes_atomic(const std::filesystem::path& path, std::span<const char> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = with_suffix(path, ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  write_bytes_atomic(path, std::span<const char>(content.data(), content.size()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace zeroed
