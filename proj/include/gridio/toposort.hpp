#pragma once

#include "gridio/bfs.hpp"

namespace gridio {

/// Kahn order of G' (file T', u64 h-numbers) and its inverse R indexed by
/// h-number (u64 r(u); kInfinity on unused h-numbers).
struct TopoNumbering {
  FileId t, r;
  u64 count = 0;
};

TopoNumbering topo_number_separator(SimDisk& sim, const SeparatorGraph& gp, const std::string& prefix);

struct ChunkAssignment {
  std::vector<u64> chunk;  // per local row-major index
  /// (chunk number, local indices in topological order), by chunk number
  std::vector<std::pair<u64, std::vector<u64>>> chunks;
  u64 rounds = 0;
  u64 leftover_components = 0;
};

/// r_boundary[p] is r of the boundary vertex at position p.
ChunkAssignment assign_chunk_numbers(const InMemoryCluster& c, const ClusterScheme& s,
                                     std::span<const u64> r_boundary);

struct TopoOptions {
  int h = 0;  // 0: auto_h
  bool parallel = false;
  std::string prefix = "topo";
};

struct TopoStats {
  int h = 0;
  u64 separator_vertices = 0;
  u64 chunks = 0;
  u64 rounds = 0;
  u64 leftover_components = 0;
};

struct TopoResult {
  FileId output;  // n Z-indices in topological order
  TopoStats stats;
};

TopoResult toposort(const GridGraph& g, const TopoOptions& opt = {});

}  // namespace gridio
