#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "zeroed/core/synthetic.hpp"
#include "zeroed/criteria/criterion.hpp"
#include "zeroed/criteria/parser.hpp"
#include "zeroed/features/unified.hpp"

using namespace zeroed;
using namespace zeroed::criteria;
using zeroed::testing::table;

namespace {

const std::vector<std::string> kSchema = {"City", "State", "Hour"};

bool holds(std::string_view expr, const Dataset& ds, std::size_t i, std::size_t j) {
  return evaluate(*parse_expression(expr, ds.attributes()), CellContext{ds, i, j, std::nullopt});
}

Criterion make(std::string expr, const std::string& attr = "Hour") {
  return compile({attr, "c", "", std::move(expr)}, kSchema);
}

// Random well-formed expressions over the whole grammar.
std::string random_term(Rng& rng, int depth) {
  switch (rng.below(depth > 0 ? 7 : 4)) {
    case 0: return "value";
    case 1: return "attr(\"" + kSchema[rng.below(kSchema.size())] + "\")";
    case 2: return "\"s" + std::to_string(rng.below(10)) + "\"";
    case 3: return std::to_string(int(rng.below(200)) - 100);
    case 4: return "num(" + random_term(rng, depth - 1) + ")";
    case 5: return "len(" + random_term(rng, depth - 1) + ")";
    default: return "lower(" + random_term(rng, depth - 1) + ")";
  }
}

std::string random_expr(Rng& rng, int depth) {
  static const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
  switch (rng.below(depth > 0 ? 11 : 8)) {
    case 0: return "is_number";
    case 1: return "is_integer";
    case 2: return "not_empty";
    case 3: return "matches(\"^[A-Z][a-z]+$\")";
    case 4: return "len_between(1, " + std::to_string(rng.below(20)) + ")";
    case 5: return "num_between(-1.5, 24)";
    case 6: return "in_set(\"a\", 'b', 3)";
    case 7: return random_term(rng, 2) + " " + ops[rng.below(6)] + " " + random_term(rng, 2);
    case 8: return "not " + random_expr(rng, depth - 1);
    case 9: return "(" + random_expr(rng, depth - 1) + " and " + random_expr(rng, depth - 1) + ")";
    default: return random_expr(rng, depth - 1) + " or " + random_expr(rng, depth - 1);
  }
}

}  // namespace

TEST_SUITE("criteria") {

TEST_CASE("parse single predicate and conjunction") {
  const auto e = parse_expression("matches(\"^[0-9]{5}$\")", kSchema);
  CHECK(e->kind == Expr::Kind::Matches);
  CHECK(e->pattern == "^[0-9]{5}$");
  CHECK(e->regex != nullptr);
  const auto c = parse_expression("is_number and num_between(0, 24)", kSchema);
  REQUIRE(c->kind == Expr::Kind::And);
  REQUIRE(c->children.size() == 2);
  CHECK(c->children[0]->kind == Expr::Kind::IsNumber);
  CHECK(c->children[1]->kind == Expr::Kind::NumBetween);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_expression("attr(\"Nope\") == value", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("matches(\"([\")", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("is_number and", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("value ==", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("in_set()", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("len_between(1)", kSchema), ParseError);
  CHECK_THROWS_AS(parse_expression("not_empty extra", kSchema), ParseError);
  try {
    parse_expression("is_number @", kSchema);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 10);
  }
}

TEST_CASE("evaluation examples") {
  const auto ds = table({"City", "Hour"}, {{"", "7"}, {"boston", "70"}, {"Boston", "x"}});
  CHECK_FALSE(holds("not_empty", ds, 0, 0));
  CHECK(holds("is_number and num_between(0,24)", ds, 0, 1));
  CHECK_FALSE(holds("is_number and num_between(0,24)", ds, 1, 1));
  const auto pair = table({"City", "Alias"}, {{"Boston", "BOSTON"}});
  CHECK(holds("lower(value) == lower(attr(\"City\"))", pair, 0, 1));
  CHECK_FALSE(holds("value == attr(\"City\")", pair, 0, 1));
  CHECK(holds("len(value) == 6", pair, 0, 0));
  CHECK(holds("in_set(\"Boston\", \"Paris\")", pair, 0, 0));
}

TEST_CASE("coercion failures make comparisons false") {
  const auto ds = table({"Hour"}, {{"abc"}, {""}, {"1e400"}});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK_FALSE(holds("num(value) > 0", ds, i, 0));
    CHECK_FALSE(holds("num(value) <= 0", ds, i, 0));
    CHECK_FALSE(holds("num_between(-1e9, 1e9)", ds, i, 0));
  }
}

TEST_CASE("value override substitutes the target cell") {
  const auto ds = table({"City", "State"}, {{"Boston", "MA"}});
  const auto c = compile({"State", "x", "", "value == \"MA\" and attr(\"State\") == \"MA\""}, ds.attributes());
  CHECK(evaluate(*c.ast, CellContext{ds, 0, 1, std::nullopt}));
  CHECK_FALSE(evaluate(*c.ast, CellContext{ds, 0, 1, std::string_view("NY")}));
}

TEST_CASE("evaluation is total over arbitrary values (property)") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto expr = random_expr(rng, 3);
    CAPTURE(expr);
    const auto ast = parse_expression(expr, kSchema);
    std::vector<std::string> row;
    for (std::size_t k = 0; k < 3; ++k) row.push_back(testing::random_value(rng, 8));
    const auto ds = table(kSchema, {row});
    bool first = false;
    CHECK_NOTHROW(first = evaluate(*ast, CellContext{ds, 0, rng.below(3), std::nullopt}));
    (void)first;
  }
}

TEST_CASE("pretty-print then parse gives the same tree (property)") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const auto expr = random_expr(rng, 4);
    CAPTURE(expr);
    const auto ast = parse_expression(expr, kSchema);
    const auto printed = to_string(*ast);
    CAPTURE(printed);
    const auto again = parse_expression(printed, kSchema);
    CHECK(structurally_equal(*ast, *again));
    CHECK(to_string(*again) == printed);
  }
}

TEST_CASE("string literal escapes round-trip") {
  for (const std::string s : {"a\"b", "back\\slash", "it's", "", "\\\""}) {
    const auto e = parse_expression("value == " + quote_literal(s), kSchema);
    CHECK(e->rhs->text == s);
  }
  CHECK(parse_expression("value == 'single \"quoted\"'", kSchema)->rhs->text == "single \"quoted\"");
}

TEST_CASE("feature vector follows set order") {
  const auto ds = table(kSchema, {{"Boston", "MA", "7"}, {"", "MA", "70"}});
  CriterionSet empty{"Hour", {}};
  CHECK(feature_vector(empty, ds, 0, 2).empty());
  CriterionSet set{"Hour", {make("is_number"), make("num_between(0, 24)"), make("not_empty")}};
  CHECK(feature_vector(set, ds, 0, 2) == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(feature_vector(set, ds, 1, 2) == std::vector<std::uint8_t>{1, 0, 1});
  CriterionSet mixed{"City", {make("not_empty", "City"), make("len(value) > 3", "City"), make("is_number", "City")}};
  // Row 1 City is empty: not_empty 0, len 0 > 3 false, is_number false.
  CHECK(feature_vector(mixed, ds, 0, 0) == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(feature_vector(mixed, ds, 1, 0) == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("criterion accuracy hand counts") {
  const auto ds = zeroed::testing::single_column("Hour", {"1", "2", "30", "40", "5", "60"});
  const std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
  const auto mk = [&](std::string e) { return compile({"Hour", "c", "", std::move(e)}, ds.attributes()); };
  CHECK(criterion_accuracy(mk("is_number"), ds, 0, all).accuracy_on_right == 1.0);
  CHECK(criterion_accuracy(mk("num_between(0, 24)"), ds, 0, all).accuracy_on_right == 0.5);
  CHECK(criterion_accuracy(mk("not is_number"), ds, 0, all).accuracy_on_right == 0.0);
  CHECK(criterion_accuracy(mk("is_number"), ds, 0, all).evaluated_count == 6);
  CHECK_THROWS(criterion_accuracy(mk("is_number"), ds, 0, {}));
}

TEST_CASE("pass rate hand counts") {
  const auto ds = zeroed::testing::single_column("Hour", {"70"});
  const auto mk = [&](std::string e) { return compile({"Hour", "c", "", std::move(e)}, ds.attributes()); };
  CriterionSet all{"Hour", {mk("is_number"), mk("not_empty")}};
  CHECK(pass_rate(all, ds, 0, 0) == 1.0);
  CriterionSet one{"Hour", {mk("is_number"), mk("num_between(0,24)"), mk("len(value) == 1"), mk("matches(\"x\")")}};
  CHECK(pass_rate(one, ds, 0, 0) == 0.25);
  CriterionSet none{"Hour", {mk("num_between(0,24)"), mk("value == \"7\"")}};
  CHECK(pass_rate(none, ds, 0, 0) == 0.0);
}

TEST_CASE("criteria features serial and parallel agree and match the set size") {
  const auto ds = make_synthetic_people(300, 1);
  const std::size_t j = ds.attribute_index("Zip");
  CriterionSet set{"Zip",
                   {compile({"Zip", "a", "", "matches(\"^[0-9]{5}$\")"}, ds.attributes()),
                    compile({"Zip", "b", "", "len_between(5, 5)"}, ds.attributes()),
                    compile({"Zip", "c", "", "attr(\"City\") != \"\""}, ds.attributes())}};
  const auto s = criteria_features(set, ds, j, Exec::Serial);
  const auto p = criteria_features(set, ds, j, Exec::Parallel);
  CHECK(s == p);
  CHECK(s.cols() == set.size());
  for (std::size_t i = 0; i < ds.num_rows(); i += 37) {
    const auto fv = feature_vector(set, ds, i, j);
    for (std::size_t k = 0; k < set.size(); ++k) CHECK(s(i, k) == float(fv[k]));
  }
}

TEST_CASE("criterion sets round-trip through JSON") {
  CriterionSet a{"Hour", {make("is_number"), make("num_between(0, 24)")}};
  CriterionSet b{"City", {make("not_empty", "City")}};
  b.criteria[0].source.origin = Origin::Refined;
  const std::vector<CriterionSet> sets{b, CriterionSet{"State", {}}, a};
  const auto back = sets_from_json(to_json(std::span<const CriterionSet>(sets)), kSchema);
  REQUIRE(back.size() == 3);
  CHECK(back[0].attr == "City");
  CHECK(back[0].criteria[0].source.origin == Origin::Refined);
  CHECK(back[1].empty());
  REQUIRE(back[2].size() == 2);
  CHECK(back[2].criteria[1].source.expr == "num_between(0, 24)");
}

TEST_CASE("grammar documentation matches the parser's grammar") {
  std::ifstream in(std::string(ZEROED_SOURCE_DIR) + "/docs/criteria-dsl.md");
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().find(std::string(kGrammar)) != std::string::npos);
}

}  // TEST_SUITE
