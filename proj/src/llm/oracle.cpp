#include "zeroed/llm/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "zeroed/core/inject.hpp"
#include "zeroed/core/rng.hpp"
#include "zeroed/core/text.hpp"
#include "zeroed/criteria/ast.hpp"
#include "zeroed/criteria/parser.hpp"
#include "zeroed/features/pattern.hpp"
#include "zeroed/llm/prompt_markers.hpp"

namespace zeroed::llm {

namespace {

constexpr std::size_t kMaxCriteria = 8;
constexpr std::size_t kMaxSetSize = 40;
constexpr std::size_t kMaxShapes = 8;
constexpr std::size_t kMaxDependents = 3;

std::string regex_escape(char c) {
  static constexpr std::string_view kSpecial = "\\^$.|?*+()[]{}/-";
  std::string out;
  if (kSpecial.find(c) != std::string_view::npos) out.push_back('\\');
  out.push_back(c);
  return out;
}

const char* char_class(char c) {
  if (c >= 'A' && c <= 'Z') return "[A-Z]";
  if (c >= 'a' && c <= 'z') return "[a-z]";
  if (c >= '0' && c <= '9') return "[0-9]";
  return nullptr;
}

// Character-class shape of a value as a regex; `exact` keeps run lengths.
std::string shape_regex(std::string_view value, bool exact) {
  std::string out;
  std::size_t i = 0;
  while (i < value.size()) {
    const char* cls = char_class(value[i]);
    if (cls == nullptr) {
      out += regex_escape(value[i]);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < value.size() && char_class(value[j]) == cls) ++j;
    out += cls;
    const std::size_t run = j - i;
    if (run > 1) out += exact ? "{" + std::to_string(run) + "}" : std::string("+");
    i = j;
  }
  return out;
}

std::optional<std::string> shape_criterion(std::span<const std::string> column, bool has_empty) {
  for (const bool exact : {true, false}) {
    std::set<std::string> shapes;
    for (const auto& v : column) {
      if (!v.empty()) shapes.insert(shape_regex(v, exact));
      if (shapes.size() > kMaxShapes) break;
    }
    if (shapes.empty() || shapes.size() > kMaxShapes) continue;
    std::string re;
    for (const auto& s : shapes) re += (re.empty() ? "" : "|") + std::string("(?:") + s + ")";
    if (has_empty) re += "|";
    return "matches(" + criteria::quote_literal(re) + ")";
  }
  return std::nullopt;
}

std::string in_set_text(const std::set<std::string>& values) {
  std::string out = "in_set(";
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += ", ";
    out += criteria::quote_literal(v);
    first = false;
  }
  return out + ")";
}

double unit_hash(std::uint64_t seed, std::size_t i, std::size_t j) {
  const std::uint64_t h = mix64(hash_combine(seed, hash_combine(i, j)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<RowLine> parse_row_lines(const std::string& prompt) {
  std::vector<RowLine> out;
  std::istringstream in(prompt);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(markers::kRowOpen, 0) != 0) continue;
    const auto close = line.find(']', markers::kRowOpen.size());
    if (close == std::string::npos) continue;
    const std::string id = line.substr(markers::kRowOpen.size(), close - markers::kRowOpen.size());
    if (!is_integer_text(id) || id[0] == '-' || id[0] == '+') continue;
    RowLine r;
    r.row = std::stoull(id);
    if (line.compare(close, markers::kRowClose.size(), markers::kRowClose) == 0) {
      r.payload = line.substr(close + markers::kRowClose.size());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string parse_attribute_line(const std::string& prompt) {
  std::istringstream in(prompt);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(markers::kAttribute, 0) == 0) return line.substr(markers::kAttribute.size());
  }
  return {};
}

OracleProvider::OracleProvider(Dataset dirty, Dataset clean, double noise, std::uint64_t seed)
    : dirty_(std::move(dirty)), clean_(std::move(clean)), mask_(diff_mask(dirty_, clean_)), noise_(noise),
      seed_(seed) {
  clean_patterns_.resize(clean_.num_attributes());
  for (std::size_t j = 0; j < clean_.num_attributes(); ++j) {
    for (const auto& v : clean_.column(j)) clean_patterns_[j].insert(generalize_pattern(v, PatternLevel::L3));
  }
}

bool OracleProvider::says_error(std::size_t i, std::size_t j) const {
  const bool truth = mask_.get(i, j);
  const bool flip = noise_ > 0.0 && unit_hash(seed_, i, j) < noise_;
  return truth != flip;
}

std::size_t OracleProvider::attribute_of(const std::string& prompt) const {
  const std::string name = parse_attribute_line(prompt);
  const auto j = dirty_.find_attribute(name);
  if (!j) throw LlmError("oracle: prompt names unknown attribute '" + name + "'");
  return *j;
}

std::vector<std::string> OracleProvider::criteria_for(std::size_t j) const {
  const auto column = clean_.column(j);
  std::vector<std::string> out;
  const bool has_empty = std::any_of(column.begin(), column.end(), [](const auto& v) { return v.empty(); });
  std::set<std::string> distinct(column.begin(), column.end());
  if (!has_empty) out.emplace_back("not_empty");

  bool all_numeric = !distinct.empty();
  bool all_integer = true;
  double lo = 0.0;
  double hi = 0.0;
  bool seen = false;
  for (const auto& v : distinct) {
    if (v.empty()) continue;
    const auto x = parse_number(v);
    if (!x) {
      all_numeric = false;
      break;
    }
    all_integer = all_integer && is_integer_text(v);
    lo = seen ? std::min(lo, *x) : *x;
    hi = seen ? std::max(hi, *x) : *x;
    seen = true;
  }
  if (all_numeric && seen) {
    const std::string range = "num_between(" + format_number(lo) + ", " + format_number(hi) + ")";
    const std::string type = all_integer ? "is_integer" : "is_number";
    out.push_back(has_empty ? "value == \"\" or (" + type + " and " + range + ")" : type);
    if (!has_empty) out.push_back(range);
  }
  if (distinct.size() <= kMaxSetSize) out.push_back(in_set_text(distinct));
  if (auto shape = shape_criterion(column, has_empty)) out.push_back(std::move(*shape));

  std::size_t min_len = SIZE_MAX;
  std::size_t max_len = 0;
  for (const auto& v : distinct) {
    min_len = std::min(min_len, utf8_length(v));
    max_len = std::max(max_len, utf8_length(v));
  }
  out.push_back("len_between(" + std::to_string(min_len) + ", " + std::to_string(max_len) + ")");

  // Value dependencies: a low-cardinality attribute whose every value
  // co-occurs with at most a few values of this one.
  if (distinct.size() >= 2) {
    for (std::size_t d = 0; d < clean_.num_attributes() && out.size() < kMaxCriteria; ++d) {
      if (d == j) continue;
      std::map<std::string, std::set<std::string>> deps;
      for (std::size_t i = 0; i < clean_.num_rows(); ++i) deps[clean_.cell(i, d)].insert(clean_.cell(i, j));
      if (deps.size() > kMaxSetSize || deps.size() * 2 > clean_.num_rows()) continue;
      const bool narrow = std::all_of(deps.begin(), deps.end(), [](const auto& kv) {
        return kv.second.size() <= kMaxDependents;
      });
      if (!narrow) continue;
      std::string expr;
      const std::string det = "attr(" + criteria::quote_literal(clean_.attribute(d)) + ")";
      for (const auto& [key, values] : deps) {
        if (!expr.empty()) expr += " and ";
        const std::string consequent = values.size() == 1 ? "value == " + criteria::quote_literal(*values.begin())
                                                          : in_set_text(values);
        expr += "(not (" + det + " == " + criteria::quote_literal(key) + ") or " + consequent + ")";
      }
      out.push_back(std::move(expr));
    }
  }
  if (out.size() > kMaxCriteria) out.resize(kMaxCriteria);
  // Only hand out expressions the engine accepts.
  std::erase_if(out, [&](const std::string& e) {
    try {
      criteria::parse_expression(e, clean_.attributes());
      return false;
    } catch (const criteria::ParseError&) {
      return true;
    }
  });
  return out;
}

std::string OracleProvider::answer_criteria(std::size_t j) const {
  auto arr = nlohmann::ordered_json::array();
  std::size_t k = 0;
  for (const auto& expr : criteria_for(j)) {
    ++k;
    arr.push_back({{"name", clean_.attribute(j) + "_check_" + std::to_string(k)},
                   {"description", "Derived from the clean distribution of " + clean_.attribute(j)},
                   {"expr", expr}});
  }
  return "```json\n" + arr.dump(2) + "\n```\n";
}

std::string OracleProvider::answer_labeling(const std::string& prompt, std::size_t j) const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : parse_row_lines(prompt)) {
    if (r.row >= dirty_.num_rows()) continue;
    const bool err = says_error(r.row, j);
    arr.push_back({{"row", r.row},
                   {"label", err ? "error" : "right"},
                   {"reason", err ? "value deviates from the expected clean value" : "value is consistent"}});
  }
  return arr.dump();
}

std::string OracleProvider::answer_guideline(const std::string& prompt, std::size_t j) const {
  std::string probes;
  const auto start = prompt.find(markers::kProbeSection);
  if (start != std::string::npos) {
    auto end = prompt.find("\n" + std::string(markers::kSectionPrefix), start + markers::kProbeSection.size());
    probes = prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
  }
  std::string out = "Detection guideline for " + dirty_.attribute(j) + ".\n";
  out += "Check every value for missing values, typos, pattern violations, outliers and rule violations.\n";
  out += "Values should follow the dominant formats and frequent values summarized below; rare spellings, "
         "unseen formats, out-of-range numbers and values that contradict related attributes are errors.\n\n";
  out += probes;
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  return out;
}

std::string OracleProvider::answer_augment(const std::string& prompt, std::size_t j) const {
  const auto column = clean_.column(j);
  std::vector<std::string> domain;
  {
    std::set<std::string> d(column.begin(), column.end());
    domain.assign(d.begin(), d.end());
  }
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : parse_row_lines(prompt)) {
    const std::string& value = r.payload;
    Rng rng(hash_combine(seed_, hash_combine(r.row, j)));
    std::vector<std::string> variants;
    auto add = [&](std::string v) {
      if (v != value && std::find(variants.begin(), variants.end(), v) == variants.end()) {
        variants.push_back(std::move(v));
      }
    };
    if (!value.empty()) add(corrupt::typo(value, rng));
    if (auto p = corrupt::pattern_mangle(value, clean_patterns_[j], rng)) add(std::move(*p));
    if (auto s = corrupt::scale_numeric(value, rng)) {
      add(std::move(*s));
    } else if (domain.size() > 1) {
      // Another clean value of the column, as in a swapped-value error.
      const auto self = std::lower_bound(domain.begin(), domain.end(), value) - domain.begin();
      auto pick = static_cast<std::ptrdiff_t>(rng.below(domain.size() - 1));
      if (pick >= self && self < static_cast<std::ptrdiff_t>(domain.size()) && domain[self] == value) ++pick;
      add(domain[static_cast<std::size_t>(pick)]);
    }
    if (variants.size() > 3) variants.resize(3);
    arr.push_back({{"row", r.row}, {"variants", variants}});
  }
  return arr.dump();
}

CompletionResponse OracleProvider::complete(const PromptRequest& req) {
  const std::size_t j = attribute_of(req.user);
  std::string text;
  switch (req.tag) {
    case Stage::Labeling: text = answer_labeling(req.user, j); break;
    case Stage::Criteria:
    case Stage::Refine: text = answer_criteria(j); break;
    case Stage::Guideline: text = answer_guideline(req.user, j); break;
    case Stage::Augment: text = answer_augment(req.user, j); break;
    case Stage::Probes:
      text = R"([{"kind":"top_values","limit":20},{"kind":"rare_values","limit":10},)"
             R"({"kind":"pattern_histogram","level":3,"limit":10},{"kind":"numeric_summary"},{"kind":"null_rate"}])";
      break;
  }
  return offline_response(req, std::move(text));
}

}  // namespace zeroed::llm
