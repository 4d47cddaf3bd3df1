#pragma once

#include <set>

#include "gridio/clusters.hpp"
#include "gridio/oracle.hpp"

namespace gridio {

/// A maximal path u0..um whose interior vertices have degree two and are not kept.
struct Chain {
  u64 u0 = 0, um = 0;
  std::vector<WeightedEdge> edges;  // walk order from u0
  u64 max_pos = 0;                  // first heaviest edge from u0
  WeightedEdge rep() const;
};

struct ContractedTree {
  std::vector<WeightedEdge> dead_ends;
  std::vector<Chain> chains;
  std::vector<u64> kept;  // sorted

  /// Edges of the contracted tree: one representative per chain.
  std::vector<WeightedEdge> edges() const;
};

using EdgeKey = std::pair<u64, u64>;
inline EdgeKey key_of(const WeightedEdge& e) { return {e.a, e.b}; }

/// Removes branches without kept vertices and contracts the remaining degree-2 paths.
ContractedTree prune_and_contract(std::span<const WeightedEdge> forest, const std::function<bool(u64)>& keep);
/// Dead ends, full chains for selected representatives, and every other chain minus its heaviest edge.
std::vector<WeightedEdge> expand(const ContractedTree& t, const std::set<EdgeKey>& selected);
/// Inverse of prune_and_contract when every representative is selected.
std::vector<WeightedEdge> expand_all(const ContractedTree& t);

/// Minimum spanning forest by Prim with a binary heap; vertices are the edge endpoints.
std::vector<WeightedEdge> prim_forest(std::span<const WeightedEdge> edges);

struct MstOptions {
  int h = 0;  // cache-aware only; 0: choose_h
  std::string prefix = "mst";
};

struct MstResult {
  FileId output;  // (a, b, w) u64 triples, a < b as Z-indices
  u64 weight = 0;
  u64 edges = 0;
  int h = 0;
  u64 expansion_bytes = 0;   // cache-oblivious only
  u64 connection_bytes = 0;  // cache-oblivious only
};

MstResult mst_cache_aware(const GridGraph& g, const MstOptions& opt = {});
MstResult mst_cache_oblivious(const GridGraph& g, const MstOptions& opt = {});

/// Edges of an MST result file, read without counting I/O.
std::vector<WeightedEdge> read_mst(const SimDisk& sim, FileId f);

/// True iff the union of per-cluster MSTs and the inter-cluster edges holds an MST of g.
bool union_contains_mst_check(const HostGrid& g, int h);

}  // namespace gridio
