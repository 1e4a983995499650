#include "zeroed/features/nmi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zeroed/core/error.hpp"
#include "zeroed/kernels/kernels.hpp"

namespace zeroed {

namespace {

double entropy(const std::vector<std::uint32_t>& counts, double n) {
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = c / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double nmi(const ColumnCodes& a_in, const ColumnCodes& b_in) {
  if (a_in.codes.size() != b_in.codes.size()) throw ShapeError("NMI needs columns of equal length");
  // Canonical argument order makes nmi(a,b) and nmi(b,a) bit-identical.
  const bool swap = std::lexicographical_compare(b_in.codes.begin(), b_in.codes.end(), a_in.codes.begin(),
                                                 a_in.codes.end());
  const ColumnCodes& a = swap ? b_in : a_in;
  const ColumnCodes& b = swap ? a_in : b_in;

  const std::size_t n_rows = a.codes.size();
  if (n_rows == 0) return 0.0;
  const double n = static_cast<double>(n_rows);
  const double ha = entropy(a.counts, n);
  const double hb = entropy(b.counts, n);
  if (ha <= 0.0 || hb <= 0.0) return 0.0;

  std::vector<std::uint64_t> keys(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) keys[i] = (static_cast<std::uint64_t>(a.codes[i]) << 32) | b.codes[i];
  std::sort(keys.begin(), keys.end());

  double mi = 0.0;
  std::size_t start = 0;
  while (start < n_rows) {
    std::size_t end = start + 1;
    while (end < n_rows && keys[end] == keys[start]) ++end;
    const double joint = static_cast<double>(end - start);
    const double ca = a.counts[keys[start] >> 32];
    const double cb = b.counts[keys[start] & 0xffffffffULL];
    mi += (joint / n) * std::log(joint * n / (ca * cb));
    start = end;
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double nmi(const Dataset& ds, std::size_t a, std::size_t b) {
  return nmi(ColumnCodes::encode(ds.column(a)), ColumnCodes::encode(ds.column(b)));
}

CorrelationMap correlation_map_from_matrix(std::size_t attrs, std::vector<double> matrix) {
  if (matrix.size() != attrs * attrs) throw ShapeError("correlation matrix has wrong size");
  CorrelationMap cm{.attrs = attrs, .matrix = std::move(matrix), .ranked = {}};
  cm.ranked.resize(attrs);
  for (std::size_t a = 0; a < attrs; ++a) {
    auto& r = cm.ranked[a];
    for (std::size_t b = 0; b < attrs; ++b) {
      if (b != a) r.push_back(b);
    }
    std::stable_sort(r.begin(), r.end(), [&](std::size_t x, std::size_t y) { return cm.at(a, x) > cm.at(a, y); });
  }
  return cm;
}

CorrelationMap build_correlation_map(const FrequencyIndex& index, Exec exec) {
  auto matrix = exec == Exec::Serial ? kernels::serial::nmi_matrix(index) : kernels::parallel::nmi_matrix(index);
  return correlation_map_from_matrix(index.num_attributes(), std::move(matrix));
}

std::vector<std::size_t> correlated_attributes(const CorrelationMap& cm, std::size_t a, std::size_t k) {
  if (a >= cm.attrs) throw InvalidArgument("attribute index out of range");
  if (k + 1 > cm.attrs) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds M - 1 = " + std::to_string(cm.attrs - 1));
  }
  return {cm.ranked[a].begin(), cm.ranked[a].begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace zeroed
