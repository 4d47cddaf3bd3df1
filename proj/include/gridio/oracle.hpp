#pragma once

#include <functional>
#include <variant>

#include "gridio/gridfmt.hpp"

namespace gridio {

/// Label callback for time-forward processing: vertex plus in-neighbour labels,
/// listed clockwise from north. Must be pure.
using LabelOracle = std::function<u64(Coord, std::span<const u64>)>;

/// indegree, longest_path or path_count.
LabelOracle builtin_oracle(const std::string& name);

struct WeightedEdge {
  u64 a = 0, b = 0;  // Z-indices, a < b
  u64 w = 0;
  auto operator<=>(const WeightedEdge&) const = default;
};

struct MstSolution {
  std::vector<WeightedEdge> edges;  // sorted
  u64 weight = 0;
};

inline constexpr u64 kOracleMaxVertices = u64(1) << 20;

// All vectors indexed by Z-index; tours and orders hold Z-indices.
std::vector<u64> ref_sssp(const HostGrid& g, Coord s);
/// Unit-length distances along directed edges.
std::vector<u64> ref_bfs_dist(const HostGrid& g, Coord s);
/// Queue BFS order, neighbours clockwise from north.
std::vector<u64> ref_bfs_order(const HostGrid& g, Coord s);
MstSolution ref_mst(const HostGrid& g);
/// Kahn order, ties by Z-index.
std::vector<u64> ref_toposort(const HostGrid& g);
std::vector<u64> ref_tfp(const HostGrid& g, const LabelOracle& phi);
/// Walk that leaves each vertex by the next tree edge clockwise after the one it
/// arrived on; the root starts at north. Throws on non-trees.
std::vector<u64> ref_euler(const HostGrid& g, Coord root);

/// True iff the symmetric edge set forms a spanning tree.
bool is_spanning_tree(const HostGrid& g);

enum class Problem { sssp, bfs_order, mst, toposort, tfp, euler };

struct RefSolution {
  Problem problem;
  std::variant<std::vector<u64>, MstSolution> payload;
};

struct RefParams {
  Coord source{1, 1};
  std::string oracle = "longest_path";
};

RefSolution reference_solve(Problem p, const HostGrid& g, const RefParams& params = {});

}  // namespace gridio
