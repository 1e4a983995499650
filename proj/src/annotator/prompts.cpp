#include "zeroed/annotator/prompts.hpp"

#include "zeroed/annotator/error_types.hpp"
#include "zeroed/core/serialize.hpp"
#include "zeroed/criteria/parser.hpp"
#include "zeroed/llm/prompt_markers.hpp"

namespace zeroed::annotator::prompts {

namespace {

namespace mk = llm::markers;

std::string header(const Dataset& ds, std::size_t attr) {
  std::string out(mk::kAttribute);
  out += ds.attribute(attr);
  out += "\nDataset: " + ds.name() + " (" + std::to_string(ds.num_rows()) + " rows)\nColumns: ";
  for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
    if (j) out += ", ";
    out += ds.attribute(j);
  }
  out += "\n\n";
  return out;
}

std::string section(std::string_view title) {
  std::string out(mk::kSectionPrefix);
  out += title;
  out += "\n";
  return out;
}

std::vector<std::size_t> with_correlates(std::size_t attr, std::span<const std::size_t> correlates) {
  std::vector<std::size_t> attrs{attr};
  attrs.insert(attrs.end(), correlates.begin(), correlates.end());
  return attrs;
}

std::string error_types_block() {
  std::string out = section("Error types");
  for (const auto& t : kErrorTypes) {
    out += "- ";
    out += t.name;
    out += ": ";
    out += t.description;
    out += "\n";
  }
  return out;
}

}  // namespace

std::string_view system_message() {
  return "You are a meticulous data-quality analyst. You inspect values of tabular datasets and decide whether "
         "they are erroneous. Follow the requested output format exactly.";
}

std::string row_line(std::size_t row, std::string_view payload) {
  std::string out(mk::kRowOpen);
  out += std::to_string(row);
  out += mk::kRowClose;
  out += payload;
  out += "\n";
  return out;
}

std::string probes(const Dataset& ds, std::size_t attr, std::span<const std::size_t> sample_rows) {
  std::string out = header(ds, attr);
  out += "Before writing error-detection guidelines for this attribute, choose between 2 and 6 summaries of the "
         "full column that would reveal its errors. Available summaries:\n"
         "- top_values (limit): most frequent values with counts\n"
         "- rare_values (limit): least frequent values with counts\n"
         "- pattern_histogram (level 1-3, limit): counts of generalized character patterns\n"
         "- numeric_summary: count of numeric and non-numeric values, min, median, mean, max\n"
         "- null_rate: fraction of empty values\n"
         "- co_occurrence (attr_b, limit): most frequent value pairs with another column\n"
         "Limits are at most 50.\n\n";
  out += section("Sample tuples");
  for (const auto i : sample_rows) out += row_line(i, serialize_tuple(ds, i));
  out += "\nAnswer with a JSON array such as "
         R"([{"kind": "top_values", "limit": 20}, {"kind": "pattern_histogram", "level": 3}])"
         ".\n";
  return out;
}

std::string guideline(const Dataset& ds, std::size_t attr, std::span<const ProbeResult> results,
                      std::span<const std::size_t> sample_rows, std::span<const std::size_t> correlates) {
  std::string out = header(ds, attr);
  out += "Write a detection guideline for the values of this attribute. For each error type below, describe what "
         "an error looks like in this data, give concrete examples from the summaries or samples, its likely "
         "cause, and how to recognise it.\n\n";
  out += std::string(mk::kProbeSection) + "\n";
  for (const auto& r : results) out += format_probe_result(r, ds);
  out += "\n" + section("Sample tuples");
  const auto attrs = with_correlates(attr, correlates);
  for (const auto i : sample_rows) out += row_line(i, serialize_tuple(ds, i, attrs));
  out += "\n" + error_types_block();
  out += "\nAnswer with the guideline as plain text.\n";
  return out;
}

std::string criteria(const Dataset& ds, std::size_t attr, std::span<const std::size_t> sample_rows,
                     std::size_t max_criteria) {
  std::string out = header(ds, attr);
  out += "Write up to " + std::to_string(max_criteria) +
         " checks that a correct value of this attribute satisfies. Each check is a boolean expression in the "
         "criteria language below; it must be true for correct values and false for erroneous ones. `value` is "
         "the cell being checked and attr(\"Column\") reads another column of the same tuple.\n\n";
  out += section("Criteria language");
  out += criteria::kGrammar;
  out += "\nExamples: not_empty, matches(\"[A-Z][a-z]+\"), num(value) >= 0 and num(value) < 200, "
         "in_set(\"M\", \"F\"), not (attr(\"City\") == \"Boston\") or value == \"MA\"\n\n";
  out += section("Sample tuples");
  for (const auto i : sample_rows) out += row_line(i, serialize_tuple(ds, i));
  out += "\nAnswer with a JSON array of objects {\"name\": ..., \"description\": ..., \"expr\": ...}.\n";
  return out;
}

std::string criteria_repair(const Dataset& ds, std::size_t attr,
                            std::span<const std::pair<std::string, std::string>> failures) {
  std::string out = header(ds, attr);
  out += "These checks could not be parsed. Rewrite each one so it follows the criteria language.\n\n";
  out += section("Criteria language");
  out += criteria::kGrammar;
  out += "\n\n" + section("Malformed checks");
  for (const auto& [expr, error] : failures) out += "- " + expr + "\n  error: " + error + "\n";
  out += "\nAnswer with a JSON array of objects {\"name\": ..., \"description\": ..., \"expr\": ...}.\n";
  return out;
}

std::string labeling(const Dataset& ds, std::size_t attr, std::string_view guideline,
                     std::span<const std::size_t> rows, std::span<const std::size_t> correlates) {
  std::string out = header(ds, attr);
  out += "Decide for every row below whether its " + ds.attribute(attr) +
         " value is erroneous. Values of related columns are shown for context only.\n\n";
  if (!guideline.empty()) {
    out += section("Guideline");
    out += guideline;
    if (guideline.back() != '\n') out += "\n";
    out += "\n";
  }
  out += section("Rows");
  const auto attrs = with_correlates(attr, correlates);
  for (const auto i : rows) out += row_line(i, serialize_tuple(ds, i, attrs));
  out += "\nAnswer with a JSON array holding exactly one object per row: "
         "{\"row\": <id>, \"label\": \"error\" or \"right\", \"reason\": <short text>}.\n";
  return out;
}

std::string contrastive(const Dataset& ds, std::size_t attr, std::span<const std::size_t> right_rows,
                        std::span<const std::size_t> error_rows, std::span<const std::size_t> correlates,
                        std::size_t max_criteria) {
  std::string out = header(ds, attr);
  out += "Below are values of this attribute judged correct and values judged erroneous. Write up to " +
         std::to_string(max_criteria) +
         " checks that hold for the correct values and fail for the erroneous ones, in the criteria language "
         "below.\n\n";
  out += section("Criteria language");
  out += criteria::kGrammar;
  out += "\n\n" + section("Correct values");
  const auto attrs = with_correlates(attr, correlates);
  for (const auto i : right_rows) out += row_line(i, serialize_tuple(ds, i, attrs));
  out += "\n" + section("Erroneous values");
  for (const auto i : error_rows) out += row_line(i, serialize_tuple(ds, i, attrs));
  out += "\nAnswer with a JSON array of objects {\"name\": ..., \"description\": ..., \"expr\": ...}.\n";
  return out;
}

std::string augment(const Dataset& ds, std::size_t attr, std::span<const std::size_t> rows) {
  std::string out = header(ds, attr);
  out += "For each correct value below, write up to three erroneous versions of it as they could appear in real "
         "data: typos, missing values, broken formats, implausible magnitudes or values that belong to another "
         "record. Each version must differ from the original.\n\n";
  out += error_types_block();
  out += "\n" + section("Values");
  for (const auto i : rows) out += row_line(i, ds.cell(i, attr));
  out += "\nAnswer with a JSON array of objects {\"row\": <id>, \"variants\": [<text>, ...]}.\n";
  return out;
}

std::string retry_suffix(std::string_view problem) {
  std::string out = "\nYour previous answer could not be used (";
  out += problem;
  out += "). Answer again, following the requested format exactly.\n";
  return out;
}

}  // namespace zeroed::annotator::prompts
