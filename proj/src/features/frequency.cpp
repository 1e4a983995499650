#include "zeroed/features/frequency.hpp"

#include "zeroed/core/error.hpp"

namespace zeroed {

ColumnCodes ColumnCodes::encode(std::span<const std::string> values) {
  ColumnCodes c;
  c.codes.reserve(values.size());
  for (const auto& v : values) {
    auto [it, inserted] = c.lookup.try_emplace(v, static_cast<std::uint32_t>(c.domain.size()));
    if (inserted) {
      c.domain.push_back(v);
      c.counts.push_back(0);
    }
    ++c.counts[it->second];
    c.codes.push_back(it->second);
  }
  return c;
}

std::uint32_t ColumnCodes::count_of(std::string_view value) const {
  const auto it = lookup.find(value);
  return it == lookup.end() ? 0 : counts[it->second];
}

namespace {

std::size_t pair_slot(std::size_t lo, std::size_t hi, std::size_t m) { return lo * m + hi; }

}  // namespace

FrequencyIndex::FrequencyIndex(const Dataset& ds) : ds_(&ds) {
  const std::size_t m = ds.num_attributes();
  const std::size_t n = ds.num_rows();
  values_.reserve(m);
  patterns_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    values_.push_back(ColumnCodes::encode(ds.column(j)));
    for (int level = 1; level <= 3; ++level) {
      std::vector<std::string> pats;
      pats.reserve(n);
      for (const auto& v : ds.column(j)) pats.push_back(generalize_pattern(v, level));
      patterns_[j][level - 1] = ColumnCodes::encode(pats);
    }
  }
  pairs_.resize(m * m);
  for (std::size_t lo = 0; lo < m; ++lo) {
    for (std::size_t hi = lo + 1; hi < m; ++hi) {
      auto& map = pairs_[pair_slot(lo, hi, m)];
      const auto& a = values_[lo].codes;
      const auto& b = values_[hi].codes;
      for (std::size_t i = 0; i < n; ++i) {
        ++map[(static_cast<std::uint64_t>(a[i]) << 32) | b[i]];
      }
    }
  }
}

std::uint32_t FrequencyIndex::pair_count(std::size_t q, std::size_t j, std::uint32_t code_q,
                                         std::uint32_t code_j) const {
  if (q == j) return code_q == code_j ? values_[j].counts[code_j] : 0;
  const std::size_t m = num_attributes();
  const bool ordered = q < j;
  const std::size_t lo = ordered ? q : j;
  const std::size_t hi = ordered ? j : q;
  const std::uint64_t key = ordered ? ((static_cast<std::uint64_t>(code_q) << 32) | code_j)
                                    : ((static_cast<std::uint64_t>(code_j) << 32) | code_q);
  const auto& map = pairs_[pair_slot(lo, hi, m)];
  const auto it = map.find(key);
  return it == map.end() ? 0 : it->second;
}

StatFeature stat_frequencies(const FrequencyIndex& index, std::size_t i, std::size_t j) {
  const std::size_t m = index.num_attributes();
  const double n = static_cast<double>(index.num_rows());
  if (i >= index.num_rows() || j >= m) throw InvalidArgument("cell index out of range");
  StatFeature f;
  f.freqs.resize(m);
  const std::uint32_t code_j = index.values(j).codes[i];
  for (std::size_t q = 0; q < m; ++q) {
    if (q == j) {
      f.freqs[q] = index.values(j).counts[code_j] / n;
    } else {
      const std::uint32_t code_q = index.values(q).codes[i];
      f.freqs[q] = static_cast<double>(index.pair_count(q, j, code_q, code_j)) /
                   static_cast<double>(index.values(q).counts[code_q]);
    }
  }
  return f;
}

StatFeature stat_frequencies(const Dataset& ds, std::size_t i, std::size_t j) {
  return stat_frequencies(FrequencyIndex(ds), i, j);
}

PatternFeature pattern_frequencies(const FrequencyIndex& index, std::size_t i, std::size_t j) {
  if (i >= index.num_rows() || j >= index.num_attributes()) throw InvalidArgument("cell index out of range");
  PatternFeature f;
  const double n = static_cast<double>(index.num_rows());
  for (int level = 1; level <= 3; ++level) {
    const auto& pc = index.patterns(j, static_cast<PatternLevel>(level));
    f.freqs[level - 1] = pc.counts[pc.codes[i]] / n;
  }
  return f;
}

PatternFeature pattern_frequencies(const Dataset& ds, std::size_t i, std::size_t j) {
  return pattern_frequencies(FrequencyIndex(ds), i, j);
}

StatFeature stat_frequencies_for_variant(const FrequencyIndex& index, std::size_t i, std::size_t j,
                                         std::string_view variant) {
  const auto& ds = index.dataset();
  if (variant == ds.cell(i, j)) return stat_frequencies(index, i, j);
  const std::size_t m = index.num_attributes();
  const double n = static_cast<double>(index.num_rows());
  StatFeature f;
  f.freqs.resize(m);
  const auto& vj = index.values(j);
  const auto it = vj.lookup.find(variant);
  for (std::size_t q = 0; q < m; ++q) {
    if (q == j) {
      f.freqs[q] = (vj.count_of(variant) + 1.0) / n;
      continue;
    }
    const std::uint32_t code_q = index.values(q).codes[i];
    const double pair = it == vj.lookup.end() ? 0.0 : index.pair_count(q, j, code_q, it->second);
    f.freqs[q] = (pair + 1.0) / static_cast<double>(index.values(q).counts[code_q]);
  }
  return f;
}

PatternFeature pattern_frequencies_for_variant(const FrequencyIndex& index, std::size_t i, std::size_t j,
                                               std::string_view variant) {
  PatternFeature f;
  const double n = static_cast<double>(index.num_rows());
  for (int level = 1; level <= 3; ++level) {
    const auto& pc = index.patterns(j, static_cast<PatternLevel>(level));
    const std::string pat = generalize_pattern(variant, level);
    const std::uint32_t source_code = pc.codes[i];
    const double same_as_source = pc.domain[source_code] == pat ? 1.0 : 0.0;
    f.freqs[level - 1] = (pc.count_of(pat) - same_as_source + 1.0) / n;
  }
  return f;
}

}  // namespace zeroed
