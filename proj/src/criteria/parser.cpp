#include "zeroed/criteria/parser.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "zeroed/core/text.hpp"

namespace zeroed::criteria {

namespace {

enum class Tok { Ident, String, Number, LParen, RParen, Comma, Op, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      t.type = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '"' || c == '\'') {
      const char quote = c;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < src.size()) {
        const char d = src[j];
        if (d == quote) {
          closed = true;
          ++j;
          break;
        }
        if (d == '\\' && j + 1 < src.size()) {
          const char e = src[j + 1];
          if (e == '"' || e == '\'' || e == '\\') {
            t.text.push_back(e);
          } else {
            t.text.push_back(d);
            t.text.push_back(e);
          }
          j += 2;
          continue;
        }
        t.text.push_back(d);
        ++j;
      }
      if (!closed) throw ParseError("unterminated string", i);
      t.type = Tok::String;
      i = j;
    } else if (is_digit(c) || (c == '-' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      std::size_t j = i + 1;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j + 1 < src.size() && src[j] == '.' && is_digit(src[j + 1])) {
        j += 2;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          while (k < src.size() && is_digit(src[k])) ++k;
          j = k;
        }
      }
      t.type = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      const auto value = parse_number(t.text);
      if (!value) throw ParseError("number out of range", i);
      t.number = *value;
      i = j;
    } else if (c == '(') {
      t.type = Tok::LParen;
      ++i;
    } else if (c == ')') {
      t.type = Tok::RParen;
      ++i;
    } else if (c == ',') {
      t.type = Tok::Comma;
      ++i;
    } else if (c == '=' || c == '!' || c == '<' || c == '>') {
      const bool has_eq = i + 1 < src.size() && src[i + 1] == '=';
      if ((c == '=' || c == '!') && !has_eq) throw ParseError(std::string("unexpected '") + c + "'", i);
      t.type = Tok::Op;
      t.text = has_eq ? std::string{c, '='} : std::string{c};
      i += has_eq ? 2 : 1;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = src.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::span<const std::string> schema)
      : tokens_(std::move(tokens)), schema_(schema) {}

  ExprPtr parse() {
    auto e = parse_or();
    if (peek().type != Tok::End) fail("unexpected trailing input");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, peek().pos); }

  bool at_keyword(std::string_view kw) const { return peek().type == Tok::Ident && peek().text == kw; }

  void expect(Tok type, const char* what) {
    if (peek().type != type) fail(std::string("expected ") + what);
    ++pos_;
  }

  ExprPtr parse_or() {
    auto first = parse_and();
    if (!at_keyword("or")) return first;
    auto node = std::make_shared<Expr>();
    node->kind = Expr::Kind::Or;
    node->children.push_back(std::move(first));
    while (at_keyword("or")) {
      ++pos_;
      node->children.push_back(parse_and());
    }
    return node;
  }

  ExprPtr parse_and() {
    auto first = parse_not();
    if (!at_keyword("and")) return first;
    auto node = std::make_shared<Expr>();
    node->kind = Expr::Kind::And;
    node->children.push_back(std::move(first));
    while (at_keyword("and")) {
      ++pos_;
      node->children.push_back(parse_not());
    }
    return node;
  }

  ExprPtr parse_not() {
    if (at_keyword("not")) {
      ++pos_;
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Not;
      node->children.push_back(parse_not());
      return node;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (peek().type == Tok::LParen) {
      ++pos_;
      auto inner = parse_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (peek().type == Tok::Ident) {
      if (auto pred = try_predicate()) return pred;
    }
    return parse_comparison();
  }

  // Zero-arity predicates may be written with or without "()".
  void optional_empty_parens() {
    if (peek().type == Tok::LParen && tokens_[pos_ + 1].type == Tok::RParen) pos_ += 2;
  }

  double expect_number() {
    if (peek().type != Tok::Number) fail("expected number");
    return next().number;
  }

  ExprPtr try_predicate() {
    const std::string& name = peek().text;
    auto node = std::make_shared<Expr>();
    if (name == "matches") {
      ++pos_;
      expect(Tok::LParen, "'('");
      if (peek().type != Tok::String) fail("matches() takes a string regex");
      const Token& re = next();
      node->kind = Expr::Kind::Matches;
      node->pattern = re.text;
      try {
        node->regex = std::make_shared<const std::regex>(re.text, std::regex::ECMAScript);
      } catch (const std::regex_error& ex) {
        throw ParseError(std::string("invalid regex: ") + ex.what(), re.pos);
      }
      expect(Tok::RParen, "')'");
    } else if (name == "len_between" || name == "num_between") {
      ++pos_;
      node->kind = name == "len_between" ? Expr::Kind::LenBetween : Expr::Kind::NumBetween;
      expect(Tok::LParen, "'('");
      node->lo = expect_number();
      expect(Tok::Comma, "','");
      node->hi = expect_number();
      expect(Tok::RParen, "')'");
    } else if (name == "in_set") {
      ++pos_;
      node->kind = Expr::Kind::InSet;
      expect(Tok::LParen, "'('");
      do {
        if (peek().type == Tok::String || peek().type == Tok::Number) {
          node->members.push_back(next().text);
        } else {
          fail("in_set() takes string or number literals");
        }
      } while (peek().type == Tok::Comma && (++pos_, true));
      expect(Tok::RParen, "')'");
    } else if (name == "is_number" || name == "is_integer" || name == "not_empty") {
      ++pos_;
      node->kind = name == "is_number"    ? Expr::Kind::IsNumber
                   : name == "is_integer" ? Expr::Kind::IsInteger
                                          : Expr::Kind::NotEmpty;
      optional_empty_parens();
    } else {
      return nullptr;
    }
    return node;
  }

  ExprPtr parse_comparison() {
    auto lhs = parse_term();
    if (peek().type != Tok::Op) fail("expected comparison operator");
    const std::string op = next().text;
    auto rhs = parse_term();
    auto node = std::make_shared<Expr>();
    node->kind = Expr::Kind::Compare;
    node->op = op == "==" ? CompareOp::Eq
               : op == "!=" ? CompareOp::Ne
               : op == "<"  ? CompareOp::Lt
               : op == "<=" ? CompareOp::Le
               : op == ">"  ? CompareOp::Gt
                            : CompareOp::Ge;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  TermPtr parse_term() {
    auto t = std::make_shared<Term>();
    const Token& tok = peek();
    if (tok.type == Tok::String) {
      t->kind = Term::Kind::String;
      t->text = next().text;
      return t;
    }
    if (tok.type == Tok::Number) {
      t->kind = Term::Kind::Number;
      t->number = next().number;
      return t;
    }
    if (tok.type != Tok::Ident) fail("expected term");
    const std::string name = tok.text;
    if (name == "value") {
      ++pos_;
      t->kind = Term::Kind::Value;
      return t;
    }
    if (name == "attr") {
      ++pos_;
      expect(Tok::LParen, "'('");
      if (peek().type != Tok::String) fail("attr() takes an attribute name string");
      const Token& arg = next();
      const auto it = std::find(schema_.begin(), schema_.end(), arg.text);
      if (it == schema_.end()) throw ParseError("unknown attribute \"" + arg.text + "\"", arg.pos);
      t->kind = Term::Kind::Attr;
      t->text = arg.text;
      t->attr_index = static_cast<std::size_t>(it - schema_.begin());
      expect(Tok::RParen, "')'");
      return t;
    }
    if (name == "num" || name == "len" || name == "lower") {
      ++pos_;
      t->kind = name == "num" ? Term::Kind::Num : name == "len" ? Term::Kind::Len : Term::Kind::Lower;
      expect(Tok::LParen, "'('");
      t->arg = parse_term();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("unknown identifier \"" + name + "\"");
  }

  std::vector<Token> tokens_;
  std::span<const std::string> schema_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(std::string_view source, std::span<const std::string> schema) {
  Parser p(lex(source), schema);
  return p.parse();
}

}  // namespace zeroed::criteria
