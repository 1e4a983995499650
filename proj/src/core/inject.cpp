#include "zeroed/core/inject.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "zeroed/core/error.hpp"
#include "zeroed/core/text.hpp"
#include "zeroed/features/pattern.hpp"

namespace zeroed {

std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::None: return "none";
    case ErrorType::Missing: return "missing";
    case ErrorType::Typo: return "typo";
    case ErrorType::Pattern: return "pattern";
    case ErrorType::Outlier: return "outlier";
    case ErrorType::Rule: return "rule";
  }
  return "none";
}

namespace corrupt {

namespace {

constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";

char random_letter(Rng& rng, char avoid = '\0') {
  char c = kLetters[rng.below(kLetters.size())];
  while (c == avoid) c = kLetters[rng.below(kLetters.size())];
  return c;
}

constexpr std::array<std::string_view, 24> kRareTokens = {
    "Zyzzyva",   "Quokka",   "Xanthic",  "Bumfuzzle", "Cattywampus", "Gubbins",
    "Lollygag",  "Snollygoster", "Taradiddle", "Wabbit", "Kerfuffle", "Flibbertigibbet",
    "Brouhaha",  "Gobbledygook", "Hullabaloo", "Nincompoop", "Skedaddle", "Widdershins",
    "Collywobbles", "Fuddy-duddy", "Hornswoggle", "Malarkey", "Rigmarole", "Shenanigan"};

}  // namespace

std::string typo(std::string_view value, Rng& rng) {
  const std::string source(value);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string out = source;
    const std::size_t edits = 1 + rng.below(3);
    for (std::size_t e = 0; e < edits; ++e) {
      const std::uint64_t op = out.size() > 1 ? rng.below(3) : rng.below(2);
      if (op == 0 && !out.empty()) {
        const std::size_t pos = rng.below(out.size());
        out[pos] = random_letter(rng, out[pos]);
      } else if (op == 1 || out.empty()) {
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(rng.below(out.size() + 1)), random_letter(rng));
      } else {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(rng.below(out.size())));
      }
    }
    if (out != source && !out.empty()) return out;
  }
  return source + random_letter(rng);
}

std::optional<std::string> pattern_mangle(std::string_view value,
                                          const std::unordered_set<std::string>& known_patterns, Rng& rng) {
  if (value.empty()) return std::nullopt;
  const std::string v(value);
  std::vector<std::string> candidates;
  candidates.push_back(to_upper_ascii(v));
  candidates.push_back(to_lower_ascii(v));
  {
    std::string s = v;
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), '-');
    candidates.push_back(std::move(s));
  }
  {
    std::string s = v;
    const auto pos = s.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789");
    if (pos != std::string::npos) {
      s[pos] = s[pos] == '/' ? '.' : '/';
      candidates.push_back(std::move(s));
    }
  }
  {
    std::string s = v;
    for (auto& c : s) {
      if (c >= 'a' && c <= 'z') {
        c = static_cast<char>(c - 'a' + 'A');
      } else if (c >= 'A' && c <= 'Z') {
        c = static_cast<char>(c - 'A' + 'a');
      }
    }
    candidates.push_back(std::move(s));
  }
  candidates.push_back(v + ".");
  candidates.push_back("#" + v);
  candidates.push_back(v.substr(0, v.size() / 2) + " " + v.substr(v.size() / 2));
  rng.shuffle(std::span<std::string>(candidates));
  for (auto& c : candidates) {
    if (c == v) continue;
    if (!known_patterns.contains(generalize_pattern(c, PatternLevel::L3))) return std::move(c);
  }
  return std::nullopt;
}

std::optional<std::string> scale_numeric(std::string_view value, Rng& rng) {
  const auto number = parse_number(value);
  if (!number) return std::nullopt;
  const bool up = rng.below(2) == 0;
  if (is_integer_text(value)) {
    std::string s(value);
    if (*number == 0.0) return std::nullopt;
    if (up) return s + "0";
    if (s.back() == '0') return s.substr(0, s.size() - 1);
    std::string out = s.substr(0, s.size() - 1) + "." + s.back();
    if (out.front() == '.' ) out.insert(out.begin(), '0');
    if (out.size() >= 2 && out[0] == '-' && out[1] == '.') out.insert(out.begin() + 1, '0');
    return out;
  }
  const double scaled = up ? *number * 10.0 : *number / 10.0;
  std::string out = format_number(scaled);
  if (out == value) return std::nullopt;
  return out;
}

std::string rare_token(std::span<const std::string> column, Rng& rng) {
  const std::size_t start = rng.below(kRareTokens.size());
  for (std::size_t k = 0; k < kRareTokens.size(); ++k) {
    const std::string_view token = kRareTokens[(start + k) % kRareTokens.size()];
    if (std::find(column.begin(), column.end(), token) == column.end()) return std::string(token);
  }
  return std::string(kRareTokens[start]) + "x";
}

}  // namespace corrupt

namespace {

void validate(const Dataset& clean, const InjectionSpec& spec) {
  const std::array<double, 5> rates = {spec.missing, spec.typo, spec.pattern, spec.outlier, spec.rule};
  double sum = 0.0;
  for (const double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("injection rates must lie in [0, 1]");
    sum += r;
  }
  if (sum > 1.0 + 1e-12) throw InvalidArgument("injection rates sum to more than 1");
  if (spec.rule > 0.0 && spec.rule_pairs.empty()) {
    throw InvalidArgument("rule-violation injection requested without rule pairs");
  }
  for (const auto& [det, dep] : spec.rule_pairs) {
    clean.attribute_index(det);
    clean.attribute_index(dep);
    if (det == dep) throw InvalidArgument("rule pair must name two different attributes");
  }
}

}  // namespace

InjectionResult inject_errors(const Dataset& clean, const InjectionSpec& spec) {
  validate(clean, spec);
  const std::size_t n = clean.num_rows();
  const std::size_t m = clean.num_attributes();
  const std::size_t total = n * m;

  Rng rng(spec.seed);
  std::vector<std::size_t> order(total);
  for (std::size_t c = 0; c < total; ++c) order[c] = c;
  rng.shuffle(std::span<std::size_t>(order));

  auto columns = clean.columns();
  std::vector<ErrorType> types(total, ErrorType::None);
  std::array<std::size_t, kErrorTypeCount> counts{};

  std::vector<std::unordered_set<std::string>> clean_patterns(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& v : clean.column(j)) clean_patterns[j].insert(generalize_pattern(v, PatternLevel::L3));
  }

  // determinant attributes per dependent attribute
  std::vector<std::vector<std::size_t>> determinants(m);
  for (const auto& [det, dep] : spec.rule_pairs) {
    determinants[clean.attribute_index(dep)].push_back(clean.attribute_index(det));
  }

  auto target = [&](double rate) { return static_cast<std::size_t>(std::llround(rate * static_cast<double>(total))); };

  auto run_type = [&](ErrorType type, double rate, auto&& generate) {
    const std::size_t want = target(rate);
    std::size_t done = 0;
    for (std::size_t k = 0; k < total && done < want; ++k) {
      const std::size_t c = order[k];
      if (types[c] != ErrorType::None) continue;
      const std::size_t i = c / m;
      const std::size_t j = c % m;
      std::optional<std::string> v = generate(i, j);
      if (!v || *v == clean.cell(i, j)) continue;
      columns[j][i] = std::move(*v);
      types[c] = type;
      ++done;
    }
    counts[static_cast<std::size_t>(type)] = done;
  };

  // Rule violations first: they are restricted to dependent columns.
  run_type(ErrorType::Rule, spec.rule, [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
    if (determinants[j].empty()) return std::nullopt;
    const std::size_t det = determinants[j][rng.below(determinants[j].size())];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const std::size_t r = rng.below(n);
      if (clean.cell(r, det) != clean.cell(i, det) && clean.cell(r, j) != clean.cell(i, j) &&
          !clean.cell(r, j).empty()) {
        return clean.cell(r, j);
      }
    }
    return std::nullopt;
  });
  run_type(ErrorType::Missing, spec.missing, [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
    if (clean.cell(i, j).empty()) return std::nullopt;
    return std::string();
  });
  run_type(ErrorType::Typo, spec.typo, [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
    if (clean.cell(i, j).empty()) return std::nullopt;
    return corrupt::typo(clean.cell(i, j), rng);
  });
  run_type(ErrorType::Pattern, spec.pattern, [&](std::size_t i, std::size_t j) {
    return corrupt::pattern_mangle(clean.cell(i, j), clean_patterns[j], rng);
  });
  run_type(ErrorType::Outlier, spec.outlier, [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
    const auto& v = clean.cell(i, j);
    if (v.empty()) return std::nullopt;
    if (auto scaled = corrupt::scale_numeric(v, rng)) return scaled;
    return corrupt::rare_token(clean.column(j), rng);
  });

  InjectionResult result{
      .dirty = Dataset::from_columns(clean.name(), clean.attributes(), std::move(columns)),
      .mask = CellMask(n, m),
      .types = std::move(types),
      .counts = counts,
  };
  for (std::size_t c = 0; c < total; ++c) {
    if (result.types[c] != ErrorType::None) result.mask.set(c / m, c % m);
  }
  return result;
}

}  // namespace zeroed
