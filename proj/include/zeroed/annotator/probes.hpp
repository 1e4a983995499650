#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeroed/core/dataset.hpp"

namespace zeroed::annotator {

enum class ProbeKind { TopValues, RareValues, PatternHistogram, NumericSummary, NullRate, CoOccurrence };

inline constexpr std::size_t kMaxProbeLimit = 50;
inline constexpr std::size_t kDefaultProbeLimit = 20;

const char* to_string(ProbeKind k) noexcept;

/// One entry of the closed menu of distribution summaries the LLM may ask for.
struct DistributionProbe {
  ProbeKind kind = ProbeKind::TopValues;
  std::size_t attr = 0;
  std::size_t limit = kDefaultProbeLimit;
  int level = 3;               // PatternHistogram
  std::size_t attr_b = 0;      // CoOccurrence

  friend bool operator==(const DistributionProbe&, const DistributionProbe&) = default;
};

struct ProbeRow {
  std::string key;
  double value = 0.0;
};

struct ProbeResult {
  DistributionProbe probe;
  std::vector<ProbeRow> rows;
};

/// Exact summary over the full column. Top/rare lists are sorted by count
/// (descending/ascending) with ties broken by key.
ProbeResult run_probe(const Dataset& ds, const DistributionProbe& probe);

/// Parses {"kind": ..., "limit": n, "level": l, "attr_b": name} for target
/// attribute `attr`; nullopt when the entry is not a valid menu item.
std::optional<DistributionProbe> probe_from_json(const nlohmann::json& j, const Dataset& ds, std::size_t attr);
nlohmann::ordered_json to_json(const DistributionProbe& p, const Dataset& ds);

/// {top_values, pattern_histogram(3), null_rate}.
std::vector<DistributionProbe> default_probes(std::size_t attr);

/// Human-readable block: a title line followed by one `key: value` line per row.
std::string format_probe_result(const ProbeResult& r, const Dataset& ds);

}  // namespace zeroed::annotator
