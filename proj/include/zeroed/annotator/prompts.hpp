#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zeroed/annotator/probes.hpp"
#include "zeroed/core/dataset.hpp"

namespace zeroed::annotator::prompts {

// Builders for the user messages of every annotator call. Each starts with an
// `Attribute: <name>` line; sampled rows appear as `[row <id>] <payload>`.

std::string_view system_message();

/// Menu of distribution probes plus a few full tuples.
std::string probes(const Dataset& ds, std::size_t attr, std::span<const std::size_t> sample_rows);

/// Task, probe results, sampled tuples over {attr} ∪ correlates and the five
/// error-type descriptions.
std::string guideline(const Dataset& ds, std::size_t attr, std::span<const ProbeResult> results,
                      std::span<const std::size_t> sample_rows, std::span<const std::size_t> correlates);

/// DSL reference plus full sampled tuples.
std::string criteria(const Dataset& ds, std::size_t attr, std::span<const std::size_t> sample_rows,
                     std::size_t max_criteria);

/// Malformed expressions with their parse errors, asking for corrected versions.
std::string criteria_repair(const Dataset& ds, std::size_t attr,
                            std::span<const std::pair<std::string, std::string>> failures);

/// One labeling batch. An empty guideline omits the guideline section (the
/// naive baseline has none).
std::string labeling(const Dataset& ds, std::size_t attr, std::string_view guideline,
                     std::span<const std::size_t> rows, std::span<const std::size_t> correlates);

/// Right and error cells side by side, asking for criteria that separate them.
std::string contrastive(const Dataset& ds, std::size_t attr, std::span<const std::size_t> right_rows,
                        std::span<const std::size_t> error_rows, std::span<const std::size_t> correlates,
                        std::size_t max_criteria);

/// Clean values as `[row <id>] <value>`, asking for up to three realistic
/// erroneous variants of each.
std::string augment(const Dataset& ds, std::size_t attr, std::span<const std::size_t> rows);

/// Appended to a prompt whose answer was empty or malformed, so the retry is
/// a different request (and cache key).
std::string retry_suffix(std::string_view problem);

/// `[row <id>] <payload>`.
std::string row_line(std::size_t row, std::string_view payload);

}  // namespace zeroed::annotator::prompts
