#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace arelab::detail {

// Sorts values from (0, 1) in expected O(n): scatter into n equal-width
// buckets, then an insertion pass that only moves elements within a bucket.
inline void sort_unit_interval(std::span<double> x, std::vector<double>& scratch,
                               std::vector<std::uint32_t>& offsets) {
  const std::size_t n = x.size();
  if (n < 64) {
    std::sort(x.begin(), x.end());
    return;
  }
  const double scale = static_cast<double>(n);
  offsets.assign(n + 1, 0);
  for (double v : x) {
    const std::size_t b = std::min(n - 1, static_cast<std::size_t>(v * scale));
    ++offsets[b + 1];
  }
  for (std::size_t b = 0; b < n; ++b) offsets[b + 1] += offsets[b];
  scratch.resize(n);
  for (double v : x) {
    const std::size_t b = std::min(n - 1, static_cast<std::size_t>(v * scale));
    scratch[offsets[b]++] = v;
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double v = scratch[i];
    std::size_t j = i;
    while (j > 0 && scratch[j - 1] > v) {
      scratch[j] = scratch[j - 1];
      --j;
    }
    scratch[j] = v;
  }
  std::copy(scratch.begin(), scratch.end(), x.begin());
}

}  // namespace arelab::detail
