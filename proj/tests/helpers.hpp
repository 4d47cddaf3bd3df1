#pragma once

#include <algorithm>
#include <random>

#include "gridio/gridfmt.hpp"

namespace testutil {

using namespace gridio;

/// Bit interleaving on a power-of-two square: row bit above column bit.
inline u64 morton(u64 r0, u64 c0) {
  u64 z = 0;
  for (int b = 0; b < 32; ++b) {
    z |= ((c0 >> b) & 1) << (2 * b);
    z |= ((r0 >> b) & 1) << (2 * b + 1);
  }
  return z;
}

/// Z-index on any grid: rank of the padded Morton code among in-grid cells.
inline std::vector<u64> z_by_rank(u64 rows, u64 cols) {
  std::vector<std::pair<u64, u64>> keyed;
  for (u64 r = 0; r < rows; ++r)
    for (u64 c = 0; c < cols; ++c) keyed.push_back({morton(r, c), r * cols + c});
  std::sort(keyed.begin(), keyed.end());
  std::vector<u64> z(rows * cols);
  for (u64 i = 0; i < keyed.size(); ++i) z[keyed[i].second] = i;
  return z;
}

inline SimConfig small_cfg() { return SimConfig{16, 256}; }

}  // namespace testutil
