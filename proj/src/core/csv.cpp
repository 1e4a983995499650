#include "zeroed/core/csv.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"

namespace zeroed {

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" (empty quoted field) from end of input
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw CsvError("unexpected quote inside unquoted field at line " + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

Dataset read_csv(std::istream& in, std::string name, bool has_header) {
  auto records = parse_csv(in);
  if (records.empty()) throw CsvError("empty CSV input");
  std::vector<std::string> header;
  std::size_t first = 0;
  if (has_header) {
    header = std::move(records.front());
    first = 1;
  } else {
    for (std::size_t j = 0; j < records.front().size(); ++j) header.push_back("c" + std::to_string(j + 1));
  }
  std::vector<std::vector<std::string>> rows(std::make_move_iterator(records.begin() + first),
                                             std::make_move_iterator(records.end()));
  return Dataset(std::move(name), std::move(header), rows);
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in, path.stem().string(), has_header);
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos ||
                            (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (j) out << ',';
    out << csv_escape(fields[j]);
  }
  // A single empty field must still produce a visible record.
  if (fields.size() == 1 && fields.front().empty()) out << "\"\"";
  out << '\n';
}

void write_csv(std::ostream& out, const Dataset& ds) {
  write_csv_row(out, ds.attributes());
  for (std::size_t i = 0; i < ds.num_rows(); ++i) write_csv_row(out, ds.row(i));
}

void save_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ostringstream out;
  write_csv(out, ds);
  write_file_atomic(path, out.str());
}

}  // namespace zeroed
