#pragma once

#include <cstddef>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace zeroed::criteria {

struct Term;
struct Expr;
using TermPtr = std::shared_ptr<const Term>;
using ExprPtr = std::shared_ptr<const Expr>;

struct Term {
  enum class Kind { Value, Attr, String, Number, Num, Len, Lower };

  Kind kind = Kind::Value;
  std::string text;  // attribute name (Attr) or literal (String)
  std::size_t attr_index = 0;
  double number = 0.0;
  TermPtr arg;  // Num, Len, Lower
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr {
  enum class Kind { And, Or, Not, Compare, Matches, LenBetween, NumBetween, IsNumber, IsInteger, InSet, NotEmpty };

  Kind kind = Kind::NotEmpty;
  std::vector<ExprPtr> children;  // And/Or: two or more; Not: one
  CompareOp op = CompareOp::Eq;
  TermPtr lhs;
  TermPtr rhs;
  std::string pattern;
  std::shared_ptr<const std::regex> regex;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> members;  // InSet, in source order
};

/// Canonical DSL text. Nested and/or groups are parenthesized, so
/// parse(to_string(e)) is structurally identical to e.
std::string to_string(const Expr& e);
std::string to_string(const Term& t);

bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Term& a, const Term& b);

const char* to_string(CompareOp op) noexcept;

/// Double-quoted DSL string literal for arbitrary text.
std::string quote_literal(std::string_view text);

}  // namespace zeroed::criteria
