#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridio/gridfmt.hpp"

namespace gridio {

struct ClusterId {
  int h = 1;
  u64 i = 0;  // block row
  u64 j = 0;  // block col
  bool operator==(const ClusterId&) const = default;
};

/// Rows [r0, r0+hr) and cols [c0, c0+hc), 1-based origin, clipped to the grid.
struct Extent {
  u64 r0 = 1, c0 = 1, hr = 0, hc = 0;
  bool contains(Coord c) const { return c.row >= r0 && c.row < r0 + hr && c.col >= c0 && c.col < c0 + hc; }
  u64 size() const { return hr * hc; }
};

/// Canonical h-clusters of an r x c grid and the h-numbering of their boundaries.
/// Clusters are ranked in Z-order; cluster q owns h-numbers [q*stride, q*stride + |boundary(q)|).
class ClusterScheme {
 public:
  ClusterScheme(u64 rows, u64 cols, int h);

  int h() const { return h_; }
  u64 side() const { return u64(1) << h_; }
  u64 rows() const { return rows_; }
  u64 cols() const { return cols_; }
  u64 cluster_rows() const { return crows_; }
  u64 cluster_cols() const { return ccols_; }
  u64 num_clusters() const { return crows_ * ccols_; }
  /// h-number slots reserved per cluster: 4*2^h - 4.
  u64 stride() const { return 4 * side() - 4; }
  u64 hnum_space() const { return num_clusters() * stride(); }

  ClusterId cluster_of(Coord c) const { return {h_, (c.row - 1) >> h_, (c.col - 1) >> h_}; }
  u64 rank(ClusterId q) const;
  ClusterId at_rank(u64 rank) const;
  Extent extent(ClusterId q) const;
  /// Z-index of the cluster's first vertex; the cluster occupies [first, first + size).
  u64 first_index(ClusterId q) const;

  u64 boundary_size(ClusterId q) const;
  std::vector<Coord> boundary_vertices(ClusterId q) const;
  std::optional<u64> boundary_pos(ClusterId q, Coord c) const;
  Coord boundary_coord(ClusterId q, u64 pos) const;

  std::optional<u64> h_number(Coord c) const;
  bool hnum_valid(u64 hn) const;
  Coord hnum_coord(u64 hn) const;
  ClusterId hnum_cluster(u64 hn) const { return at_rank(hn / stride()); }

 private:
  u64 rows_, cols_;
  int h_;
  u64 crows_, ccols_;
};

/// A cluster decoded into memory: local row-major records of out-edges.
/// For undirected graphs, intra-cluster edges appear in both directions and
/// edges leaving the cluster appear only when stored at this side.
struct InMemoryCluster {
  ClusterId id;
  Extent ext;
  Encoding encoding = Encoding::unweighted_directed;
  std::vector<VertexRecord> rec;

  u64 size() const { return rec.size(); }
  u64 local(Coord c) const { return (c.row - ext.r0) * ext.hc + (c.col - ext.c0); }
  Coord coord(u64 l) const { return {ext.r0 + l / ext.hc, ext.c0 + l % ext.hc}; }
  /// Local index of the neighbour in direction d if it lies in the cluster.
  std::optional<u64> inside(u64 l, int d) const;
};

/// Sequentially reads the cluster's contiguous range of a Z-order grid.
InMemoryCluster load_cluster(const GridGraph& g, const ClusterScheme& s, ClusterId q);
/// Decodes a cluster from bytes already read (the cluster's record range).
InMemoryCluster decode_cluster(const GridGraph& g, const ClusterScheme& s, ClusterId q,
                               std::span<const std::byte> bytes);

/// Dijkstra inside G(Q) from weighted local sources; kInfinity when unreachable.
std::vector<u64> local_dijkstra(const InMemoryCluster& c, const std::vector<std::pair<u64, u64>>& sources);
/// Vertices reachable inside G(Q) from one local source.
std::vector<bool> local_reach(const InMemoryCluster& c, u64 source);
/// Topological order of G(Q); ties by local Z-rank. Throws on a cycle.
std::vector<u64> local_topo(const InMemoryCluster& c);
/// Local Z-rank of each local (row-major) index.
std::vector<u64> local_zrank(const InMemoryCluster& c);

enum class Alg { sssp, bfs, mst_aware, mst_oblivious, toposort, tfp, euler };
std::string to_string(Alg a);
Alg parse_alg(const std::string& s);

/// Per-algorithm working set in bytes for h-clusters (see README for the formulas).
u64 working_set(Alg a, int h);
/// Largest h >= 1 with working_set(a, h) <= M; 1 if none fits.
int choose_h(const SimConfig& sim, Alg a);
/// choose_h, but no cluster larger than the square enclosing the grid.
int auto_h(const SimConfig& sim, Alg a, u64 rows, u64 cols);

enum class SepMode { weighted_distance, unit_distance, reachability };

/// Derived graph G' over the h-numbers. Record for h-number u holds
/// stride() slots towards boundary positions of u's cluster, then 8 slots
/// towards the neighbours of u in each compass direction.
struct SeparatorGraph {
  SepMode mode = SepMode::weighted_distance;
  ClusterScheme scheme{1, 1, 1};
  FileId file;
  FileId degree_file;  // reachability: u16 in-degree per h-number
  FileId zero_queue;   // reachability: h-numbers of in-degree 0, as u64
  u64 zero_count = 0;
  std::vector<u16> indegree;

  u64 slots() const { return scheme.stride() + 8; }
  u64 record_bytes() const;
  u64 offset(u64 hn) const { return hn * record_bytes(); }
  /// h-number a slot points to, if it exists.
  std::optional<u64> slot_target(u64 hn, u64 slot) const;
};

struct SepOptions {
  bool parallel = false;
  std::string name = "gprime";
};

SeparatorGraph build_separator_graph(const GridGraph& g, int h, SepMode mode, const SepOptions& opt = {});

/// Decoded G' record: weight per slot (kInfinity absent; reachability uses 1).
std::vector<u64> read_separator_record(SimDisk& sim, const SeparatorGraph& gp, u64 hn);

/// Boundary-to-boundary payload of one cluster; serial and OpenMP variants agree.
std::vector<std::vector<u64>> boundary_payload(const InMemoryCluster& c, const ClusterScheme& s,
                                               SepMode mode, bool parallel);

}  // namespace gridio
