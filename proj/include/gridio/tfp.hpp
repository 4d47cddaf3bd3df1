#pragma once

#include "gridio/oracle.hpp"
#include "gridio/toposort.hpp"

namespace gridio {

/// Inter-cluster message slots at the head of the chunk file: one per
/// horizontal E_h edge, one per vertical E_h edge, one per diagonal pair of a
/// cell that straddles a cluster border.
class InterSlots {
 public:
  InterSlots(u64 rows, u64 cols, int h);
  u64 count() const { return h_ + v_ + da_ + db_; }
  /// Slot of the edge between adjacent vertices a and b of different clusters.
  u64 slot(Coord a, Coord b) const;

 private:
  u64 rows_, cols_, side_, cr_, cc_;
  u64 h_, v_, da_, db_;
};

/// Throws "not planar" if some cell holds both diagonals.
void check_planar(const HostGrid& g);

struct TfpOptions {
  int h = 0;  // 0: auto_h
  bool parallel = false;
  std::string prefix = "tfp";
};

struct TfpStats {
  int h = 0;
  u64 chunks = 0;
  u64 inter_slots = 0;
  u64 intra_slots = 0;
  u64 messages = 0;
  u64 chunk_pairs = 0;  // distinct (sender chunk, receiver chunk) with messages
};

struct TfpResult {
  FileId output;  // n u64 labels in Z order
  TfpStats stats;
};

TfpResult tfp(const GridGraph& g, const LabelOracle& phi, const TfpOptions& opt = {});

}  // namespace gridio
