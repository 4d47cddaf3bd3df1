#pragma once

#include "gridio/toposort.hpp"

namespace gridio {

/// Entry points of a cluster: (boundary position, direction towards the outside
/// neighbour), in canonical order. At most 12 * 2^h of them.
std::vector<std::pair<u64, int>> entry_points(const ClusterScheme& s, ClusterId q);
u64 entry_capacity(int h);

/// Exit of a cluster walk, packed as position * 8 + direction.
inline constexpr u32 kTerminal = 0xFFFFFFFEu;
inline constexpr u32 kNoEntry = 0xFFFFFFFFu;

/// Per cluster, entry_capacity(h) u32 slots; slot k answers for entry_points(q)[k].
struct EntryExitMap {
  ClusterScheme scheme{1, 1, 1};
  FileId file;
  u64 entries = 0;  // tree edges entering some cluster
};

EntryExitMap build_entry_exit(const GridGraph& g, int h, Coord root, const std::string& name);

struct EulerOptions {
  int h = 0;  // 0: auto_h
  std::optional<Coord> root;  // default: tree vertex of smallest Z-index
  bool full_ids = false;
  std::string prefix = "euler";
};

struct EulerStats {
  int h = 0;
  u64 segments = 0;
  u64 steps = 0;
};

struct EulerResult {
  FileId output;  // root u64 then one direction byte per step, or u64 ids
  Coord root;
  EulerStats stats;
};

EulerResult euler_tour(const GridGraph& g, const EulerOptions& opt = {});

/// Decodes either output encoding into Z-indices (uncounted).
std::vector<u64> read_euler(const SimDisk& sim, FileId f);

}  // namespace gridio
