#include "zeroed/criteria/criterion.hpp"

#include <algorithm>
#include <variant>

#include "zeroed/core/error.hpp"
#include "zeroed/core/text.hpp"
#include "zeroed/criteria/parser.hpp"

namespace zeroed::criteria {

namespace {

using Val = std::variant<std::string, double>;

std::optional<Val> eval_term(const Term& t, const CellContext& ctx) {
  switch (t.kind) {
    case Term::Kind::Value: return Val{std::string(ctx.cell(ctx.attr))};
    case Term::Kind::Attr: return Val{std::string(ctx.cell(t.attr_index))};
    case Term::Kind::String: return Val{t.text};
    case Term::Kind::Number: return Val{t.number};
    case Term::Kind::Num: {
      auto inner = eval_term(*t.arg, ctx);
      if (!inner) return std::nullopt;
      if (const auto* d = std::get_if<double>(&*inner)) return Val{*d};
      const auto parsed = parse_number(std::get<std::string>(*inner));
      if (!parsed) return std::nullopt;
      return Val{*parsed};
    }
    case Term::Kind::Len: {
      auto inner = eval_term(*t.arg, ctx);
      if (!inner) return std::nullopt;
      const std::string s = std::holds_alternative<double>(*inner) ? format_number(std::get<double>(*inner))
                                                                    : std::get<std::string>(*inner);
      return Val{static_cast<double>(utf8_length(s))};
    }
    case Term::Kind::Lower: {
      auto inner = eval_term(*t.arg, ctx);
      if (!inner) return std::nullopt;
      if (const auto* d = std::get_if<double>(&*inner)) return Val{format_number(*d)};
      return Val{to_lower_ascii(std::get<std::string>(*inner))};
    }
  }
  return std::nullopt;
}

template <typename T>
bool apply(CompareOp op, const T& a, const T& b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

std::optional<double> as_number(const Val& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return parse_number(std::get<std::string>(v));
}

bool compare(const Expr& e, const CellContext& ctx) {
  const auto lhs = eval_term(*e.lhs, ctx);
  const auto rhs = eval_term(*e.rhs, ctx);
  if (!lhs || !rhs) return false;
  if (std::holds_alternative<std::string>(*lhs) && std::holds_alternative<std::string>(*rhs)) {
    return apply(e.op, std::get<std::string>(*lhs), std::get<std::string>(*rhs));
  }
  // Mixed or numeric operands compare numerically; unparseable text fails.
  const auto a = as_number(*lhs);
  const auto b = as_number(*rhs);
  if (!a || !b) return false;
  return apply(e.op, *a, *b);
}

}  // namespace

bool evaluate(const Expr& e, const CellContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::And:
      return std::all_of(e.children.begin(), e.children.end(), [&](const ExprPtr& c) { return evaluate(*c, ctx); });
    case Expr::Kind::Or:
      return std::any_of(e.children.begin(), e.children.end(), [&](const ExprPtr& c) { return evaluate(*c, ctx); });
    case Expr::Kind::Not: return !evaluate(*e.children.front(), ctx);
    case Expr::Kind::Compare: return compare(e, ctx);
    case Expr::Kind::Matches: {
      const std::string_view v = ctx.cell(ctx.attr);
      try {
        return std::regex_match(v.begin(), v.end(), *e.regex);
      } catch (const std::regex_error&) {
        return false;  // complexity/stack limits on pathological input
      }
    }
    case Expr::Kind::LenBetween: {
      const double len = static_cast<double>(utf8_length(ctx.cell(ctx.attr)));
      return e.lo <= len && len <= e.hi;
    }
    case Expr::Kind::NumBetween: {
      const auto x = parse_number(ctx.cell(ctx.attr));
      return x && e.lo <= *x && *x <= e.hi;
    }
    case Expr::Kind::IsNumber: return parse_number(ctx.cell(ctx.attr)).has_value();
    case Expr::Kind::IsInteger: return is_integer_text(ctx.cell(ctx.attr));
    case Expr::Kind::InSet: {
      const std::string_view v = ctx.cell(ctx.attr);
      return std::find(e.members.begin(), e.members.end(), v) != e.members.end();
    }
    case Expr::Kind::NotEmpty: return !ctx.cell(ctx.attr).empty();
  }
  return false;
}

const char* to_string(Origin o) noexcept { return o == Origin::Initial ? "initial" : "refined"; }

Criterion compile(CriterionSource source, std::span<const std::string> schema) {
  if (source.expr.empty()) throw ParseError("empty criterion expression", 0);
  auto ast = parse_expression(source.expr, schema);
  return Criterion{std::move(source), std::move(ast)};
}

std::vector<std::uint8_t> feature_vector(const CriterionSet& set, const CellContext& ctx) {
  std::vector<std::uint8_t> bits(set.size());
  for (std::size_t t = 0; t < set.size(); ++t) bits[t] = evaluate(*set.criteria[t].ast, ctx) ? 1 : 0;
  return bits;
}

std::vector<std::uint8_t> feature_vector(const CriterionSet& set, const Dataset& ds, std::size_t i, std::size_t j) {
  return feature_vector(set, CellContext{ds, i, j, std::nullopt});
}

VerificationStats criterion_accuracy(const Criterion& c, const Dataset& ds, std::size_t j,
                                     std::span<const std::size_t> right_rows) {
  if (right_rows.empty()) throw InvalidArgument("criterion accuracy needs at least one right-labeled cell");
  std::size_t pass = 0;
  for (const auto i : right_rows) {
    if (evaluate(*c.ast, CellContext{ds, i, j, std::nullopt})) ++pass;
  }
  return VerificationStats{c.source.name, static_cast<double>(pass) / static_cast<double>(right_rows.size()),
                           right_rows.size()};
}

double pass_rate(const CriterionSet& set, const Dataset& ds, std::size_t i, std::size_t j) {
  if (set.empty()) throw InvalidArgument("pass rate over an empty criterion set");
  const auto bits = feature_vector(set, ds, i, j);
  const auto pass = std::count(bits.begin(), bits.end(), std::uint8_t{1});
  return static_cast<double>(pass) / static_cast<double>(bits.size());
}

nlohmann::json to_json(const CriterionSource& s) {
  nlohmann::json j;
  j["attr"] = s.attr;
  j["name"] = s.name;
  j["description"] = s.description;
  j["expr"] = s.expr;
  j["origin"] = to_string(s.origin);
  return j;
}

CriterionSource source_from_json(const nlohmann::json& j) {
  CriterionSource s;
  s.attr = j.at("attr").get<std::string>();
  s.name = j.value("name", std::string{});
  s.description = j.value("description", std::string{});
  s.expr = j.at("expr").get<std::string>();
  const std::string origin = j.value("origin", std::string{"initial"});
  if (origin != "initial" && origin != "refined") throw InvalidArgument("unknown criterion origin " + origin);
  s.origin = origin == "refined" ? Origin::Refined : Origin::Initial;
  return s;
}

nlohmann::json to_json(std::span<const CriterionSet> sets) {
  auto arr = nlohmann::json::array();
  for (const auto& set : sets) {
    for (const auto& c : set.criteria) arr.push_back(to_json(c.source));
  }
  return arr;
}

std::vector<CriterionSet> sets_from_json(const nlohmann::json& j, std::span<const std::string> schema) {
  if (!j.is_array()) throw InvalidArgument("criteria JSON must be an array");
  std::vector<CriterionSet> sets(schema.size());
  for (std::size_t a = 0; a < schema.size(); ++a) sets[a].attr = schema[a];
  for (const auto& item : j) {
    auto src = source_from_json(item);
    const auto it = std::find(schema.begin(), schema.end(), src.attr);
    if (it == schema.end()) throw InvalidArgument("criterion for unknown attribute " + src.attr);
    sets[static_cast<std::size_t>(it - schema.begin())].criteria.push_back(compile(std::move(src), schema));
  }
  return sets;
}

}  // namespace zeroed::criteria
