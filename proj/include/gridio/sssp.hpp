#pragma once

#include "gridio/clusters.hpp"

namespace gridio {

/// Distance estimates per h-number; bit 63 marks a final estimate.
class DistanceFile {
 public:
  static constexpr u64 kFinal = u64(1) << 63;
  static constexpr u64 kUnset = kFinal - 1;

  DistanceFile(SimDisk& sim, const ClusterScheme& s, const std::string& name);

  FileId file() const { return file_; }
  /// Raw entries of the cluster with the given rank (stride() entries).
  std::vector<u64> read_cluster(u64 rank);
  u64 get(u64 hn);
  void set(u64 hn, u64 value, bool final);

  static u64 value(u64 e) { return e & ~kFinal; }
  static bool final(u64 e) { return e & kFinal; }
  const ClusterScheme& scheme() const { return s_; }

 private:
  SimDisk* sim_;
  ClusterScheme s_;
  FileId file_;
};

struct Hierarchy {
  std::vector<int> levels;  // h_0 < h_1 < ... < h_k
  int k() const { return static_cast<int>(levels.size()) - 1; }
};

Hierarchy build_hierarchy(int h0, u64 rows, u64 cols);

struct SsspOptions {
  int h = 0;  // 0: auto_h
  bool parallel = false;
  std::string prefix = "sssp";
};

struct SsspStats {
  int h = 0;
  u64 finalizations = 0;
  u64 h0_calls = 0;  // hierarchical only
  u64 separator_vertices = 0;
  Hierarchy hierarchy;
};

struct SsspResult {
  FileId output;  // distances in Z-order, kInfinity if unreachable
  SsspStats stats;
};

/// Phase-2 primitives on G' shared by the sssp and bfs solvers.
class SeparatorDijkstra {
 public:
  struct Tentative {
    u64 value;
    u64 hn;
  };
  SeparatorDijkstra(const GridGraph& g, const SeparatorGraph& gp, DistanceFile& d)
      : g_(g), gp_(gp), s_(gp.scheme), d_(d) {}

  /// Lowest tentative finite estimate on the cluster's boundary; lowest h-number on ties.
  std::optional<Tentative> min_tentative(u64 rank);
  /// Sets tentative estimates on the boundary of src's cluster.
  void seed_source(Coord src);
  /// Makes u final at du and relaxes its G' edges; returns touched cluster ranks.
  std::vector<u64> settle(u64 u, u64 du);

  u64 finalizations = 0;

 private:
  const GridGraph& g_;
  const SeparatorGraph& gp_;
  const ClusterScheme& s_;
  DistanceFile& d_;
};

/// Per-cluster Dijkstra seeded from the boundary estimates in d (and src at 0);
/// writes n distances in Z-order.
FileId finalize_distances(const GridGraph& g, DistanceFile& d, Coord src, const std::string& name);

SsspResult sssp_simple(const GridGraph& g, Coord s, const SsspOptions& opt = {});
SsspResult sssp_hierarchical(const GridGraph& g, Coord s, const SsspOptions& opt = {});

}  // namespace gridio
