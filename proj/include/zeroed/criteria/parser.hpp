#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "zeroed/core/error.hpp"
#include "zeroed/criteria/ast.hpp"

namespace zeroed::criteria {

/// Syntax error, unknown attribute or invalid regex. `position` is the byte
/// offset into the source where the problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// EBNF of the criteria language. Embedded in criteria prompts and mirrored
/// in docs/criteria-dsl.md.
inline constexpr std::string_view kGrammar = R"ebnf(expr       = or_expr ;
or_expr    = and_expr , { "or" , and_expr } ;
and_expr   = not_expr , { "and" , not_expr } ;
not_expr   = "not" , not_expr | primary ;
primary    = "(" , expr , ")" | predicate | comparison ;
predicate  = "matches" , "(" , string , ")"
           | "len_between" , "(" , number , "," , number , ")"
           | "num_between" , "(" , number , "," , number , ")"
           | "in_set" , "(" , literal , { "," , literal } , ")"
           | "is_number" | "is_integer" | "not_empty" ;
comparison = term , cmp_op , term ;
cmp_op     = "==" | "!=" | "<" | "<=" | ">" | ">=" ;
term       = "value" | "attr" , "(" , string , ")" | literal
           | "num" , "(" , term , ")" | "len" , "(" , term , ")"
           | "lower" , "(" , term , ")" ;
literal    = string | number ;
string     = '"' , { character } , '"' | "'" , { character } , "'" ;
number     = [ "-" ] , digit , { digit } , [ "." , digit , { digit } ] ,
             [ ( "e" | "E" ) , [ "+" | "-" ] , digit , { digit } ] ;)ebnf";

/// Parses one criterion expression. Attribute references are resolved
/// against `schema`; regexes are compiled here.
ExprPtr parse_expression(std::string_view source, std::span<const std::string> schema);

}  // namespace zeroed::criteria
