#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zeroed/core/dataset.hpp"

namespace zeroed {

/// Parses RFC 4180 records. Quoted fields may contain commas, doubled quotes
/// and line breaks; CRLF and LF terminators are both accepted.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

/// Loads a CSV file verbatim into a Dataset. Without a header, attributes are
/// named c1..cM. Throws IoError, CsvError.
Dataset load_csv(const std::filesystem::path& path, bool has_header = true);

Dataset read_csv(std::istream& in, std::string name, bool has_header = true);

/// Quotes a field only when it needs it (comma, quote, CR/LF, leading space).
std::string csv_escape(const std::string& field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
void write_csv(std::ostream& out, const Dataset& ds);
void save_csv(const std::filesystem::path& path, const Dataset& ds);

}  // namespace zeroed
