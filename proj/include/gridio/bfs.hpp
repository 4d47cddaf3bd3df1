#pragma once

#include <deque>
#include <unordered_map>

#include "gridio/sssp.hpp"

namespace gridio {

/// Monotone queue of cluster ranks with integer keys in a band of width 4^h:
/// near lists L for keys up to d' (d rounded up to a multiple of 2^h) and far
/// lists H_i for keys in (d' + i 2^h, d' + (i+1) 2^h]. Stale copies stay queued.
class BucketQueue {
 public:
  struct Stats {
    u64 inserts = 0;
    u64 extractions = 0;
    u64 redistributed = 0;
    u64 in_memory_updates = 0;
    u64 max_band = 0;
  };

  /// update_in_memory: a key update for an item whose copy sits in a near
  /// list replaces that copy instead of adding another.
  explicit BucketQueue(int h, bool update_in_memory = false);

  void insert(u64 key, u64 item);
  bool empty() const { return size_ == 0; }
  u64 size() const { return size_; }
  /// Removes a minimum-key element.
  std::pair<u64, u64> extract_min();

  u64 current() const { return d_; }
  u64 boundary() const { return dprime_; }
  const Stats& stats() const { return stats_; }

 private:
  std::vector<u64>& near(u64 key) { return near_[key - (dprime_ - std::min(dprime_, side_))]; }
  void advance();

  u64 side_, band_;
  bool update_;
  u64 d_ = 0, dprime_ = 0, size_ = 0;
  std::vector<std::vector<u64>> near_;
  std::deque<std::vector<std::pair<u64, u64>>> far_;
  std::unordered_map<u64, u64> near_key_;  // item -> key of its near copy (update mode)
  Stats stats_;
};

enum class SortMethod { automatic, in_memory, merge, radix };

struct BfsOptions {
  int h = 0;  // 0: auto_h
  bool parallel = false;
  bool update_in_memory = false;
  SortMethod sort = SortMethod::automatic;
  std::string prefix = "bfs";
};

struct BfsDistances {
  SeparatorGraph gp;
  DistanceFile d;
  BucketQueue::Stats queue;
};

/// Phases 1 and 2: unit G' and final boundary distances.
BfsDistances bfs_distances(const GridGraph& g, Coord s, const BfsOptions& opt = {});

/// Chunk file C: per chunk root Z-index (u64), root distance (u64), vertex
/// count (u32), then one child-direction mask byte per vertex in preorder.
/// Address list A: (offset in C, root distance), both u64.
struct ChunkStore {
  FileId c, a;
  u64 chunks = 0;
  u64 vertices = 0;
};

ChunkStore build_chunks_bfs(const GridGraph& g, Coord s, DistanceFile& d, const BfsOptions& opt = {});

struct ChunkVertex {
  u64 z;
  u64 dist;
};
/// Decodes one chunk record (header and masks) into its vertices.
std::vector<ChunkVertex> decode_chunk(std::span<const std::byte> rec, u64 rows, u64 cols);

struct SortReport {
  SortMethod method = SortMethod::in_memory;
  u64 passes = 0;
};

/// Stable sort of 16-byte (offset, key) entries by key; returns the sorted file.
FileId sort_addresses(SimDisk& sim, FileId a, u64 count, SortMethod method, const std::string& name,
                      SortReport* report = nullptr);

struct BfsStats {
  int h = 0;
  u64 chunks = 0;
  u64 emitted = 0;
  u64 max_live_stacks = 0;
  BucketQueue::Stats queue;
  SortReport sort;
};

struct BfsResult {
  FileId output;  // reachable Z-indices by non-decreasing distance
  BfsStats stats;
};

FileId emit_bfs_order(const GridGraph& g, const ChunkStore& cs, FileId sorted_a, int h, const std::string& prefix,
                      BfsStats* stats = nullptr);

BfsResult bfs(const GridGraph& g, Coord s, const BfsOptions& opt = {});

}  // namespace gridio
