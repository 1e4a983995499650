#include <algorithm>
#include <fstream>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles/brute_force.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/synthetic.hpp"
#include "zeroed/criteria/criterion.hpp"
#include "zeroed/features/embedding.hpp"
#include "zeroed/features/frequency.hpp"
#include "zeroed/features/nmi.hpp"
#include "zeroed/features/pattern.hpp"
#include "zeroed/features/unified.hpp"

using namespace zeroed;
using zeroed::testing::table;

namespace {

// (class, run length) sequence of a value at a level, computed directly.
// Literal L1 bytes appear as class = the byte itself with length 1.
std::vector<std::pair<char, std::size_t>> runs_of(std::string_view v, int level) {
  auto cls = [level](unsigned char c) -> char {
    const bool up = c >= 'A' && c <= 'Z', lo = c >= 'a' && c <= 'z', dg = c >= '0' && c <= '9';
    if (level == 1) return (up || lo || dg) ? 'A' : 0;
    if (level == 2) return (up || lo) ? 'L' : dg ? 'D' : 'S';
    return up ? 'U' : lo ? 'u' : dg ? 'D' : 'S';
  };
  std::vector<std::pair<char, std::size_t>> out;
  for (const char ch : v) {
    const char c = cls(static_cast<unsigned char>(ch));
    if (c == 0) {
      out.push_back({ch, 0});
    } else if (!out.empty() && out.back().first == c && out.back().second > 0) {
      ++out.back().second;
    } else {
      out.push_back({c, 1});
    }
  }
  return out;
}

// Reads a pattern string back into the same sequence.
std::vector<std::pair<char, std::size_t>> decode_pattern(std::string_view p, int level) {
  const std::string classes = level == 1 ? "A" : level == 2 ? "LDS" : "UuDS";
  std::vector<std::pair<char, std::size_t>> out;
  std::size_t i = 0;
  while (i < p.size()) {
    if (classes.find(p[i]) != std::string::npos && i + 1 < p.size() && p[i + 1] == '[') {
      const auto close = p.find(']', i + 2);
      REQUIRE(close != std::string_view::npos);
      out.push_back({p[i], std::stoul(std::string(p.substr(i + 2, close - i - 2)))});
      i = close + 1;
    } else {
      REQUIRE(level == 1);
      out.push_back({p[i], 0});
      ++i;
    }
  }
  return out;
}

double max_abs_diff(const FeatureMatrix& a, const FeatureMatrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, double(std::abs(a.data()[k] - b.data()[k])));
  return d;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("pattern generalization worked example") {
  CHECK(generalize_pattern("DOe123.", PatternLevel::L1) == "A[6].");
  CHECK(generalize_pattern("DOe123.", PatternLevel::L2) == "L[3]D[3]S[1]");
  CHECK(generalize_pattern("DOe123.", PatternLevel::L3) == "U[2]u[1]D[3]S[1]");
  CHECK(generalize_pattern("", PatternLevel::L3).empty());
}

TEST_CASE("pattern string encodes the class/run sequence one-to-one (property)") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const auto v = testing::random_value(rng, 10);
    for (int level = 1; level <= 3; ++level) {
      CAPTURE(v);
      CAPTURE(level);
      const auto p = generalize_pattern(v, level);
      CHECK(decode_pattern(p, level) == runs_of(v, level));
      CHECK(generalize_pattern(std::string(v), level) == p);
    }
  }
}

TEST_CASE("value frequency hand count") {
  const auto ds = zeroed::testing::single_column("c", {"A", "A", "B"});
  CHECK(stat_frequencies(ds, 0, 0).freqs[0] == doctest::Approx(2.0 / 3.0));
  CHECK(stat_frequencies(ds, 2, 0).freqs[0] == doctest::Approx(1.0 / 3.0));
  const auto uniform = zeroed::testing::single_column("c", {"q", "q", "q", "q"});
  CHECK(stat_frequencies(uniform, 2, 0).freqs[0] == 1.0);
}

TEST_CASE("vicinity frequency under a functional dependency") {
  // Zip -> City on a 5-row fixture; every row consistent with the dependency.
  const auto ds = table({"Zip", "City"},
                        {{"10001", "NYC"}, {"10001", "NYC"}, {"94105", "SF"}, {"60601", "Chicago"}, {"94105", "SF"}});
  for (std::size_t i = 0; i < 5; ++i) {
    const auto f = stat_frequencies(ds, i, 1);
    CHECK(f.freqs[0] == 1.0);
    CHECK(f.freqs[0] == oracle::stat_entry(ds, i, 1, 0));
  }
}

TEST_CASE("pattern frequency: 50 of 1000 share the L3 pattern") {
  std::vector<std::string> values;
  for (int i = 0; i < 50; ++i) values.push_back("AB-" + std::to_string(100 + i));  // U[2]S[1]D[3]
  for (int i = 0; i < 950; ++i) values.push_back(std::to_string(10000 + i));      // D[5]
  const auto ds = zeroed::testing::single_column("code", values);
  const auto f = pattern_frequencies(ds, 7, 0);
  CHECK(f.freqs[2] == 0.05);
  const auto other = pattern_frequencies(ds, 500, 0);
  CHECK(other.freqs[2] == 0.95);
}

TEST_CASE("pattern frequency extremes") {
  const auto same = zeroed::testing::single_column("c", {"x1", "x1", "x1"});
  const auto f = pattern_frequencies(same, 1, 0);
  CHECK(f.freqs == std::array<double, 3>{1.0, 1.0, 1.0});
  const auto unique = zeroed::testing::single_column("c", {"a", "1.", "--", "Q9 z"});
  for (std::size_t i = 0; i < 4; ++i) {
    const auto g = pattern_frequencies(unique, i, 0);
    CHECK(g.freqs[0] == 0.25);
    CHECK(g.freqs[1] == 0.25);
    CHECK(g.freqs[2] == 0.25);
  }
}

TEST_CASE("frequency features lie in [0,1] and value frequency >= 1/N (property)") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = testing::draw_between(rng, 1, 30);
    const auto ds = testing::random_categorical(rng, n, 3, 4);
    const FrequencyIndex index(ds);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        const auto s = stat_frequencies(index, i, j);
        for (const double v : s.freqs) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
        CHECK(s.freqs[j] >= 1.0 / double(n));
        for (const double v : pattern_frequencies(index, i, j).freqs) {
          CHECK(v > 0.0);
          CHECK(v <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("exhaustive small tables match the counting oracles") {
  // Every 2-column table with up to 4 rows over {a, b, c}.
  const char* vals[] = {"a", "b", "c"};
  std::size_t tables = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < 2 * n; ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<std::vector<std::string>> rows(n, std::vector<std::string>(2));
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          rows[i][j] = vals[c % 3];
          c /= 3;
        }
      }
      const auto ds = table({"x", "y"}, rows);
      const FrequencyIndex index(ds);
      REQUIRE(std::abs(nmi(ds, 0, 1) - oracle::nmi(ds, 0, 1)) < 1e-12);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          const auto f = stat_frequencies(index, i, j);
          for (std::size_t q = 0; q < 2; ++q) REQUIRE(f.freqs[q] == oracle::stat_entry(ds, i, j, q));
        }
      }
      ++tables;
    }
  }
  CHECK(tables == 9 + 81 + 729 + 6561);
}

TEST_CASE("variant frequencies equal recomputation on the substituted table") {
  Rng rng(5);
  const auto ds = testing::random_categorical(rng, 12, 3, 4);
  const FrequencyIndex index(ds);
  for (const std::string variant : {"v0", "zzz", "", "v3"}) {
    for (std::size_t i = 0; i < 12; i += 5) {
      auto rows = std::vector<std::vector<std::string>>();
      for (std::size_t r = 0; r < 12; ++r) rows.push_back(ds.row(r));
      rows[i][1] = variant;
      const auto swapped = table(ds.attributes(), rows);
      const auto s = stat_frequencies_for_variant(index, i, 1, variant);
      for (std::size_t q = 0; q < 3; ++q) CHECK(s.freqs[q] == doctest::Approx(oracle::stat_entry(swapped, i, 1, q)));
      const auto p = pattern_frequencies_for_variant(index, i, 1, variant);
      CHECK(p.freqs == pattern_frequencies(swapped, i, 1).freqs);
    }
  }
}

TEST_CASE("semantic embedding averages in-vocabulary tokens") {
  const auto t = EmbeddingTable::from_entries(3, {{"new", {1.0f, 0.0f, 2.0f}}, {"york", {0.0f, 4.0f, 1.0f}}});
  CHECK(embed_value("york", t).vec == std::vector<float>{0.0f, 4.0f, 1.0f});
  CHECK(embed_value("", t).vec == std::vector<float>{0.0f, 0.0f, 0.0f});
  // (1+0)/2, (0+4)/2, (2+1)/2
  CHECK(embed_value("New York", t).vec == std::vector<float>{0.5f, 2.0f, 1.5f});
  CHECK(embed_value("the unknown", t).vec == std::vector<float>{0.0f, 0.0f, 0.0f});
}

TEST_CASE("word-vector file loading normalizes vectors") {
  testing::TempDir dir("vec");
  std::ofstream(dir / "w.vec") << "2 2\nalpha 3 4\nbeta 0 2\n";
  const auto t = EmbeddingTable::load_vec(dir / "w.vec");
  CHECK(t.dim() == 2);
  const auto a = embed_value("alpha", t).vec;
  CHECK(a[0] == doctest::Approx(0.6));
  CHECK(a[1] == doctest::Approx(0.8));
  std::ofstream(dir / "bad.vec") << "1 3\nalpha 1 2\n";
  CHECK_THROWS(EmbeddingTable::load_vec(dir / "bad.vec"));
}

TEST_CASE("nmi edge cases") {
  const auto copy = table({"a", "b"}, {{"x", "x"}, {"y", "y"}, {"z", "z"}, {"x", "x"}});
  CHECK(std::abs(nmi(copy, 0, 1) - 1.0) < 1e-9);
  const auto indep = table({"a", "b"}, {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "1"}});
  CHECK(std::abs(nmi(indep, 0, 1)) < 1e-9);
  const auto constant = table({"a", "b"}, {{"k", "x"}, {"k", "y"}});
  CHECK(nmi(constant, 0, 1) == 0.0);
}

TEST_CASE("nmi against the double-sum oracle on a 4 x 3 value table") {
  Rng rng(17);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 50; ++i) rows.push_back({"a" + std::to_string(rng.below(4)), "b" + std::to_string(rng.below(3))});
  const auto ds = table({"x", "y"}, rows);
  CHECK(std::abs(nmi(ds, 0, 1) - oracle::nmi(ds, 0, 1)) < 1e-9);
}

TEST_CASE("nmi is symmetric and invariant under row permutation (property)") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    const std::size_t n = testing::draw_between(rng, 2, 80);
    const auto ds = testing::random_categorical(rng, n, 2, 6);
    const double ab = nmi(ds, 0, 1);
    CHECK(std::abs(ab - nmi(ds, 1, 0)) <= 1e-12);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<std::vector<std::string>> rows;
    for (const auto i : perm) rows.push_back(ds.row(i));
    CHECK(std::abs(ab - nmi(table(ds.attributes(), rows), 0, 1)) <= 1e-12);
  }
}

TEST_CASE("correlated attribute selection") {
  // a=0, b=1, c=2: NMI(a,b)=0.9, NMI(a,c)=0.1
  const auto cm = correlation_map_from_matrix(3, {1.0, 0.9, 0.1, 0.9, 1.0, 0.2, 0.1, 0.2, 1.0});
  CHECK(correlated_attributes(cm, 0, 1) == std::vector<std::size_t>{1});
  CHECK(correlated_attributes(cm, 0, 2) == std::vector<std::size_t>{1, 2});
  CHECK_THROWS_AS(correlated_attributes(cm, 0, 3), InvalidArgument);
  const auto tie = correlation_map_from_matrix(3, {1.0, 0.5, 0.5, 0.5, 1.0, 0.1, 0.5, 0.1, 1.0});
  CHECK(correlated_attributes(tie, 0, 1) == std::vector<std::size_t>{1});
}

TEST_CASE("correlation map serial and parallel agree") {
  const auto ds = make_synthetic_people(400, 3);
  const FrequencyIndex index(ds);
  const auto s = build_correlation_map(index, Exec::Serial);
  const auto p = build_correlation_map(index, Exec::Parallel);
  CHECK(s.matrix == p.matrix);
  CHECK(s.ranked == p.ranked);
}

TEST_CASE("unified width is (1 + k) times the base width") {
  const auto table_emb = EmbeddingTable::hashing(16, 1);
  const std::vector<Dataset> fixtures = {make_synthetic_people(60, 1),
                                         make_synthetic_people(35, 2),
                                         table({"p", "q", "r"}, {{"1", "a", "x"}, {"2", "b", "y"}, {"3", "a", "x"}})};
  for (const auto& ds : fixtures) {
    const FrequencyIndex index(ds);
    const BaseLayout layout{ds.num_attributes(), 16, 4};
    std::vector<FeatureMatrix> bases;
    for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
      bases.push_back(compose_base(intrinsic_features(index, table_emb, j), FeatureMatrix(ds.num_rows(), 0), layout));
      CHECK(bases.back().cols() == layout.width());
    }
    for (std::size_t k = 0; k <= 2; ++k) {
      const auto cm = build_correlation_map(index);
      for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
        const auto corr = correlated_attributes(cm, j, k);
        const auto u = assemble_unified(bases, j, corr);
        CHECK(u.cols() == layout.width() * (1 + k));
        CHECK(u.rows() == ds.num_rows());
      }
    }
  }
}

TEST_CASE("base width 320 with k = 2 gives 960") {
  std::vector<FeatureMatrix> bases(3, FeatureMatrix(4, 320));
  const std::vector<std::size_t> corr{1, 2};
  CHECK(assemble_unified(bases, 0, corr).cols() == 960);
  CHECK(assemble_unified(bases, 0, {}).cols() == 320);
}

TEST_CASE("criteria bits are padded to the layout width") {
  const auto ds = table({"h"}, {{"7"}, {"70"}});
  criteria::CriterionSet set{"h", {criteria::compile({"h", "hour", "", "is_number and num_between(0, 24)"}, ds.attributes())}};
  const auto bits = criteria_features(set, ds, 0);
  const BaseLayout layout{1, 4, 3};
  const auto base = compose_base(FeatureMatrix(2, layout.intrinsic_width()), bits, layout);
  CHECK(base.cols() == layout.width());
  CHECK(base(0, layout.criteria_offset()) == 1.0f);
  CHECK(base(1, layout.criteria_offset()) == 0.0f);
  CHECK(base(0, layout.criteria_offset() + 1) == 0.0f);
  const BaseLayout narrow{1, 4, 0};
  CHECK_THROWS(compose_base(FeatureMatrix(2, narrow.intrinsic_width()), bits, narrow));
}

TEST_CASE("unified features are row-equivariant") {
  const auto ds = make_synthetic_people(40, 8);
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(2);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<std::vector<std::string>> rows;
  for (const auto i : perm) rows.push_back(ds.row(i));
  const auto shuffled = table(ds.attributes(), rows, ds.name());
  const auto emb = EmbeddingTable::hashing(8, 0);
  const BaseLayout layout{ds.num_attributes(), 8, 0};
  auto unified = [&](const Dataset& d) {
    const FrequencyIndex index(d);
    std::vector<FeatureMatrix> bases;
    for (std::size_t j = 0; j < d.num_attributes(); ++j) {
      bases.push_back(compose_base(intrinsic_features(index, emb, j), FeatureMatrix(d.num_rows(), 0), layout));
    }
    const std::vector<std::size_t> corr{1, 2};
    return assemble_unified(bases, 0, corr);
  };
  const auto a = unified(ds);
  const auto b = unified(shuffled);
  CHECK(max_abs_diff(a.gather(perm), b) == 0.0);
}

TEST_CASE("variant rows reproduce ordinary rows for the unchanged value") {
  const auto ds = make_synthetic_people(50, 4);
  const FrequencyIndex index(ds);
  const auto emb = EmbeddingTable::hashing(8, 3);
  criteria::CriterionSet set{"Age", {criteria::compile({"Age", "n", "", "is_integer"}, ds.attributes())}};
  const BaseLayout layout{ds.num_attributes(), 8, 2};
  const std::size_t j = ds.attribute_index("Age");
  std::vector<FeatureMatrix> bases;
  for (std::size_t a = 0; a < ds.num_attributes(); ++a) {
    const auto bits = a == j ? criteria_features(set, ds, a) : FeatureMatrix(ds.num_rows(), 0);
    bases.push_back(compose_base(intrinsic_features(index, emb, a), bits, layout));
  }
  for (std::size_t i = 0; i < 50; i += 7) {
    const auto row = variant_base_row(index, emb, set, layout, i, j, ds.cell(i, j));
    const auto expect = bases[j].row(i);
    REQUIRE(row.size() == expect.size());
    for (std::size_t k = 0; k < row.size(); ++k) CHECK(row[k] == doctest::Approx(expect[k]).epsilon(1e-6));
  }
}

}  // TEST_SUITE
