#include "zeroed/criteria/ast.hpp"

#include "zeroed/core/text.hpp"

namespace zeroed::criteria {

namespace {

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, std::string& out) {
  const bool group = child.kind == Expr::Kind::And || child.kind == Expr::Kind::Or;
  if (group) out.push_back('(');
  print(child, out);
  if (group) out.push_back(')');
}

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const char* sep = e.kind == Expr::Kind::And ? " and " : " or ";
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        if (k > 0) out += sep;
        print_child(*e.children[k], out);
      }
      break;
    }
    case Expr::Kind::Not:
      out += "not ";
      print_child(*e.children.front(), out);
      break;
    case Expr::Kind::Compare:
      out += to_string(*e.lhs);
      out += ' ';
      out += to_string(e.op);
      out += ' ';
      out += to_string(*e.rhs);
      break;
    case Expr::Kind::Matches:
      out += "matches(" + quote_literal(e.pattern) + ")";
      break;
    case Expr::Kind::LenBetween:
      out += "len_between(" + format_number(e.lo) + ", " + format_number(e.hi) + ")";
      break;
    case Expr::Kind::NumBetween:
      out += "num_between(" + format_number(e.lo) + ", " + format_number(e.hi) + ")";
      break;
    case Expr::Kind::IsNumber:
      out += "is_number";
      break;
    case Expr::Kind::IsInteger:
      out += "is_integer";
      break;
    case Expr::Kind::NotEmpty:
      out += "not_empty";
      break;
    case Expr::Kind::InSet:
      out += "in_set(";
      for (std::size_t k = 0; k < e.members.size(); ++k) {
        if (k > 0) out += ", ";
        out += quote_literal(e.members[k]);
      }
      out += ")";
      break;
  }
}

}  // namespace

std::string quote_literal(std::string_view text) {
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

const char* to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Value: return "value";
    case Term::Kind::Attr: return "attr(" + quote_literal(t.text) + ")";
    case Term::Kind::String: return quote_literal(t.text);
    case Term::Kind::Number: return format_number(t.number);
    case Term::Kind::Num: return "num(" + to_string(*t.arg) + ")";
    case Term::Kind::Len: return "len(" + to_string(*t.arg) + ")";
    case Term::Kind::Lower: return "lower(" + to_string(*t.arg) + ")";
  }
  return {};
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Value: return true;
    case Term::Kind::Attr: return a.text == b.text && a.attr_index == b.attr_index;
    case Term::Kind::String: return a.text == b.text;
    case Term::Kind::Number: return a.number == b.number;
    case Term::Kind::Num:
    case Term::Kind::Len:
    case Term::Kind::Lower: return structurally_equal(*a.arg, *b.arg);
  }
  return false;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::And:
    case Expr::Kind::Or:
    case Expr::Kind::Not:
      if (a.children.size() != b.children.size()) return false;
      for (std::size_t k = 0; k < a.children.size(); ++k) {
        if (!structurally_equal(*a.children[k], *b.children[k])) return false;
      }
      return true;
    case Expr::Kind::Compare:
      return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    case Expr::Kind::Matches: return a.pattern == b.pattern;
    case Expr::Kind::LenBetween:
    case Expr::Kind::NumBetween: return a.lo == b.lo && a.hi == b.hi;
    case Expr::Kind::InSet: return a.members == b.members;
    case Expr::Kind::IsNumber:
    case Expr::Kind::IsInteger:
    case Expr::Kind::NotEmpty: return true;
  }
  return false;
}

}  // namespace zeroed::criteria
