#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "zeroed/core/dataset.hpp"
#include "zeroed/criteria/ast.hpp"

namespace zeroed::criteria {

/// The cell a criterion is evaluated on. `value_override` substitutes a
/// hypothetical value for cell (row, attr), which also affects attr("X")
/// when X is the target attribute.
struct CellContext {
  const Dataset& ds;
  std::size_t row = 0;
  std::size_t attr = 0;
  std::optional<std::string_view> value_override;

  std::string_view cell(std::size_t j) const {
    return (j == attr && value_override) ? *value_override : std::string_view(ds.cell(row, j));
  }
};

/// True when the value passes the check. Never throws: coercion failures
/// (e.g. num() of non-numeric text) make the enclosing comparison false.
bool evaluate(const Expr& e, const CellContext& ctx);

enum class Origin { Initial, Refined };

const char* to_string(Origin o) noexcept;

struct CriterionSource {
  std::string attr;
  std::string name;
  std::string description;
  std::string expr;
  Origin origin = Origin::Initial;
};

struct Criterion {
  CriterionSource source;
  ExprPtr ast;
};

/// Ordered criteria for one attribute; order fixes the feature bit layout.
struct CriterionSet {
  std::string attr;
  std::vector<Criterion> criteria;

  std::size_t size() const noexcept { return criteria.size(); }
  bool empty() const noexcept { return criteria.empty(); }
};

/// Parses source.expr against the dataset schema. Throws ParseError.
Criterion compile(CriterionSource source, std::span<const std::string> schema);

/// One bit per criterion, in set order.
std::vector<std::uint8_t> feature_vector(const CriterionSet& set, const CellContext& ctx);
std::vector<std::uint8_t> feature_vector(const CriterionSet& set, const Dataset& ds, std::size_t i, std::size_t j);

struct VerificationStats {
  std::string name;
  double accuracy_on_right = 0.0;
  std::size_t evaluated_count = 0;
};

/// Fraction of `right_rows` (cells of attribute j) on which the criterion holds.
/// Throws InvalidArgument when right_rows is empty.
VerificationStats criterion_accuracy(const Criterion& c, const Dataset& ds, std::size_t j,
                                     std::span<const std::size_t> right_rows);

/// Fraction of the set's criteria that hold on cell (i, j). Throws on an empty set.
double pass_rate(const CriterionSet& set, const Dataset& ds, std::size_t i, std::size_t j);

nlohmann::json to_json(const CriterionSource& s);
CriterionSource source_from_json(const nlohmann::json& j);

/// JSON array of {attr, name, description, expr, origin} over all sets.
nlohmann::json to_json(std::span<const CriterionSet> sets);

/// Rebuilds per-attribute sets (one per schema attribute, schema order).
std::vector<CriterionSet> sets_from_json(const nlohmann::json& j, std::span<const std::string> schema);

}  // namespace zeroed::criteria
