#include "zeroed/annotator/probes.hpp"

#include <algorithm>
#include <map>

#include "zeroed/core/error.hpp"
#include "zeroed/core/text.hpp"
#include "zeroed/features/pattern.hpp"

namespace zeroed::annotator {

namespace {

using Counts = std::map<std::string, std::size_t>;

std::vector<ProbeRow> ranked(const Counts& counts, std::size_t limit, bool descending) {
  std::vector<ProbeRow> rows;
  rows.reserve(counts.size());
  for (const auto& [key, n] : counts) rows.push_back({key, static_cast<double>(n)});
  // std::map iteration is key-ordered, so a stable sort keeps key order on ties.
  std::stable_sort(rows.begin(), rows.end(), [descending](const ProbeRow& a, const ProbeRow& b) {
    return descending ? a.value > b.value : a.value < b.value;
  });
  if (rows.size() > limit) rows.resize(limit);
  return rows;
}

std::vector<ProbeRow> numeric_summary(std::span<const std::string> column) {
  std::vector<double> xs;
  for (const auto& v : column) {
    if (auto x = parse_number(v)) xs.push_back(*x);
  }
  std::vector<ProbeRow> rows{{"numeric_count", static_cast<double>(xs.size())},
                             {"non_numeric_count", static_cast<double>(column.size() - xs.size())}};
  if (xs.empty()) return rows;
  std::sort(xs.begin(), xs.end());
  double sum = 0.0;
  for (const double x : xs) sum += x;
  const std::size_t n = xs.size();
  const double median = n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  rows.push_back({"min", xs.front()});
  rows.push_back({"median", median});
  rows.push_back({"mean", sum / static_cast<double>(n)});
  rows.push_back({"max", xs.back()});
  return rows;
}

}  // namespace

const char* to_string(ProbeKind k) noexcept {
  switch (k) {
    case ProbeKind::TopValues: return "top_values";
    case ProbeKind::RareValues: return "rare_values";
    case ProbeKind::PatternHistogram: return "pattern_histogram";
    case ProbeKind::NumericSummary: return "numeric_summary";
    case ProbeKind::NullRate: return "null_rate";
    case ProbeKind::CoOccurrence: return "co_occurrence";
  }
  return "?";
}

ProbeResult run_probe(const Dataset& ds, const DistributionProbe& probe) {
  if (probe.attr >= ds.num_attributes()) throw InvalidArgument("probe attribute out of range");
  const auto column = ds.column(probe.attr);
  const std::size_t limit = std::min(probe.limit, kMaxProbeLimit);
  ProbeResult r{probe, {}};
  switch (probe.kind) {
    case ProbeKind::TopValues:
    case ProbeKind::RareValues: {
      Counts counts;
      for (const auto& v : column) ++counts[v];
      r.rows = ranked(counts, limit, probe.kind == ProbeKind::TopValues);
      break;
    }
    case ProbeKind::PatternHistogram: {
      if (probe.level < 1 || probe.level > 3) throw InvalidArgument("pattern level must be 1, 2 or 3");
      Counts counts;
      for (const auto& v : column) ++counts[generalize_pattern(v, probe.level)];
      r.rows = ranked(counts, limit, true);
      break;
    }
    case ProbeKind::NumericSummary: r.rows = numeric_summary(column); break;
    case ProbeKind::NullRate: {
      const auto empty = std::count_if(column.begin(), column.end(), [](const std::string& v) { return v.empty(); });
      r.rows.push_back({"null_rate", static_cast<double>(empty) / static_cast<double>(column.size())});
      break;
    }
    case ProbeKind::CoOccurrence: {
      if (probe.attr_b >= ds.num_attributes()) throw InvalidArgument("co-occurrence attribute out of range");
      const auto other = ds.column(probe.attr_b);
      Counts counts;
      for (std::size_t i = 0; i < column.size(); ++i) ++counts[column[i] + " | " + other[i]];
      r.rows = ranked(counts, limit, true);
      break;
    }
  }
  return r;
}

std::optional<DistributionProbe> probe_from_json(const nlohmann::json& j, const Dataset& ds, std::size_t attr) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return std::nullopt;
  static constexpr ProbeKind kKinds[] = {ProbeKind::TopValues,      ProbeKind::RareValues, ProbeKind::PatternHistogram,
                                         ProbeKind::NumericSummary, ProbeKind::NullRate,   ProbeKind::CoOccurrence};
  const auto kind_name = j["kind"].get<std::string>();
  const auto* kind = std::find_if(std::begin(kKinds), std::end(kKinds),
                                  [&](ProbeKind k) { return kind_name == to_string(k); });
  if (kind == std::end(kKinds)) return std::nullopt;

  DistributionProbe p;
  p.kind = *kind;
  p.attr = attr;
  if (j.contains("limit")) {
    if (!j["limit"].is_number_integer() || j["limit"].get<long long>() < 1) return std::nullopt;
    p.limit = std::min<std::size_t>(j["limit"].get<std::size_t>(), kMaxProbeLimit);
  }
  if (p.kind == ProbeKind::PatternHistogram && j.contains("level")) {
    if (!j["level"].is_number_integer()) return std::nullopt;
    p.level = j["level"].get<int>();
    if (p.level < 1 || p.level > 3) return std::nullopt;
  }
  if (p.kind == ProbeKind::CoOccurrence) {
    if (!j.contains("attr_b") || !j["attr_b"].is_string()) return std::nullopt;
    const auto b = ds.find_attribute(j["attr_b"].get<std::string>());
    if (!b || *b == attr) return std::nullopt;
    p.attr_b = *b;
  }
  return p;
}

nlohmann::ordered_json to_json(const DistributionProbe& p, const Dataset& ds) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind);
  j["attr"] = ds.attribute(p.attr);
  j["limit"] = p.limit;
  if (p.kind == ProbeKind::PatternHistogram) j["level"] = p.level;
  if (p.kind == ProbeKind::CoOccurrence) j["attr_b"] = ds.attribute(p.attr_b);
  return j;
}

std::vector<DistributionProbe> default_probes(std::size_t attr) {
  return {DistributionProbe{ProbeKind::TopValues, attr},
          DistributionProbe{ProbeKind::PatternHistogram, attr, kDefaultProbeLimit, 3},
          DistributionProbe{ProbeKind::NullRate, attr}};
}

std::string format_probe_result(const ProbeResult& r, const Dataset& ds) {
  std::string out = "### ";
  out += to_string(r.probe.kind);
  if (r.probe.kind == ProbeKind::PatternHistogram) out += " level " + std::to_string(r.probe.level);
  if (r.probe.kind == ProbeKind::CoOccurrence) out += " with " + ds.attribute(r.probe.attr_b);
  out += " of " + ds.attribute(r.probe.attr) + " (" + std::to_string(r.rows.size()) + " rows)\n";
  for (const auto& row : r.rows) {
    out += "- ";
    out += row.key.empty() ? "<empty>" : row.key;
    out += ": " + format_number(row.value) + "\n";
  }
  return out;
}

}  // namespace zeroed::annotator
