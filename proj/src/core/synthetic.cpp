#include "zeroed/core/synthetic.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "zeroed/core/rng.hpp"

namespace zeroed {

namespace {

struct CityInfo {
  std::string_view city;
  std::string_view state;
  std::array<std::string_view, 2> zips;
  unsigned weight;
};

constexpr std::array<CityInfo, 20> kCities = {{
    {"Boston", "MA", {"02108", "02134"}, 12},
    {"Denver", "CO", {"80202", "80205"}, 10},
    {"Austin", "TX", {"78701", "78704"}, 10},
    {"Seattle", "WA", {"98101", "98109"}, 9},
    {"Chicago", "IL", {"60601", "60614"}, 9},
    {"Miami", "FL", {"33101", "33130"}, 8},
    {"Phoenix", "AZ", {"85003", "85004"}, 7},
    {"Portland", "OR", {"97201", "97205"}, 6},
    {"Atlanta", "GA", {"30303", "30308"}, 6},
    {"Nashville", "TN", {"37201", "37203"}, 5},
    {"Detroit", "MI", {"48201", "48226"}, 5},
    {"Omaha", "NE", {"68102", "68105"}, 4},
    {"Tulsa", "OK", {"74103", "74104"}, 4},
    {"Reno", "NV", {"89501", "89502"}, 3},
    {"Madison", "WI", {"53703", "53706"}, 3},
    {"Raleigh", "NC", {"27601", "27605"}, 3},
    {"Richmond", "VA", {"23219", "23220"}, 2},
    {"Columbus", "OH", {"43215", "43201"}, 2},
    {"Spokane", "WA", {"99201", "99202"}, 2},
    {"Dallas", "TX", {"75201", "75204"}, 2},
}};

struct DegreeInfo {
  std::string_view name;
  unsigned weight;
  unsigned salary_low;   // in units of 500
  unsigned salary_span;  // in units of 500
};

constexpr std::array<DegreeInfo, 5> kDegrees = {{
    {"High School", 20, 50, 60},
    {"Associate", 15, 60, 80},
    {"Bachelor", 35, 80, 120},
    {"Master", 20, 100, 160},
    {"PhD", 10, 120, 180},
}};

template <typename Items>
std::size_t weighted_pick(const Items& items, Rng& rng) {
  unsigned total = 0;
  for (const auto& it : items) total += it.weight;
  auto r = static_cast<unsigned>(rng.below(total));
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (r < items[k].weight) return k;
    r -= items[k].weight;
  }
  return items.size() - 1;
}

}  // namespace

Dataset make_synthetic_people(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::string>> cols(6);
  for (auto& c : cols) c.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& city = kCities[weighted_pick(kCities, rng)];
    const auto& degree = kDegrees[weighted_pick(kDegrees, rng)];
    cols[0].emplace_back(city.city);
    cols[1].emplace_back(city.state);
    cols[2].emplace_back(city.zips[rng.below(2)]);
    cols[3].push_back(std::to_string(18 + rng.below(63)));
    cols[4].emplace_back(degree.name);
    cols[5].push_back(std::to_string(500 * (degree.salary_low + rng.below(degree.salary_span + 1))));
  }
  return Dataset::from_columns("synthetic_people", {"City", "State", "Zip", "Age", "Degree", "Salary"},
                               std::move(cols));
}

InjectionSpec benchmark_injection_spec(std::uint64_t seed) {
  return InjectionSpec{
      .missing = 0.02,
      .typo = 0.02,
      .pattern = 0.02,
      .outlier = 0.02,
      .rule = 0.02,
      .rule_pairs = {{"City", "State"}, {"City", "Zip"}},
      .seed = seed,
  };
}

}  // namespace zeroed
