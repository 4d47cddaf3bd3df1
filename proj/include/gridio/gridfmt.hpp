#pragma once

#include <array>
#include <string>
#include <vector>

#include "gridio/simdisk.hpp"

namespace gridio {

inline constexpr u64 kInfinity = ~u64(0);

enum class Order : u8 { row_major = 0, col_major = 1, z_order = 2 };

enum class Encoding : u8 {
  unweighted_directed = 0,
  weighted_directed = 1,
  weighted_undirected = 2,
  // result files
  distances = 16,
  vertex_ids = 17,
  labels = 18,
  mst_edges = 19,
  euler_steps = 20,
  euler_ids = 21,
};

/// Compass directions, clockwise from north; also the NeighborMask bit index.
enum Dir : int { N = 0, NE, E, SE, S, SW, W, NW };
inline constexpr int kDr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr int kDc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
inline constexpr int opposite(int d) { return (d + 4) & 7; }
/// Direction with the given row/col offset, or -1.
int direction_of(int drow, int dcol);

/// Undirected slots stored at a vertex: E, SE, S, SW.
inline constexpr int kUndirectedSlots[4] = {E, SE, S, SW};

struct Coord {
  u64 row = 1;  // 1-based
  u64 col = 1;
  bool operator==(const Coord&) const = default;
};

u64 record_bytes(Encoding e);
std::string to_string(Order o);
std::string to_string(Encoding e);
Order parse_order(const std::string& s);

u64 coord_to_index(Order order, u64 rows, u64 cols, u64 row, u64 col);
Coord index_to_coord(Order order, u64 rows, u64 cols, u64 index);
inline u64 z_index(u64 rows, u64 cols, Coord c) {
  return coord_to_index(Order::z_order, rows, cols, c.row, c.col);
}
/// Smallest k with 2^k >= rows and 2^k >= cols.
int z_levels(u64 rows, u64 cols);
bool neighbour(u64 rows, u64 cols, Coord c, int d, Coord& out);

struct GridHeader {
  u32 version = 1;
  u64 rows = 0;
  u64 cols = 0;
  Order order = Order::z_order;
  Encoding encoding = Encoding::unweighted_directed;
  u64 count = 0;         // number of payload records
  u64 header_bytes = 0;  // payload offset; a multiple of the block size

  u64 n() const { return rows * cols; }
};

inline constexpr u64 kHeaderCore = 64;
std::vector<std::byte> encode_header(const GridHeader& h);
GridHeader decode_header(std::span<const std::byte> bytes);
u64 header_span(u64 block_bytes);

/// Out-edges of one vertex: w[d] is the weight towards direction d, or kInfinity.
struct VertexRecord {
  u8 mask = 0;
  std::array<u64, 8> w{kInfinity, kInfinity, kInfinity, kInfinity,
                       kInfinity, kInfinity, kInfinity, kInfinity};
  bool has(int d) const { return (mask >> d) & 1; }
  void set(int d, u64 weight) {
    mask |= u8(1u << d);
    w[d] = weight;
  }
  void clear(int d) {
    mask &= u8(~(1u << d));
    w[d] = kInfinity;
  }
};

/// In-memory grid, row-major; undirected graphs keep both directions.
struct HostGrid {
  u64 rows = 0;
  u64 cols = 0;
  Encoding encoding = Encoding::unweighted_directed;
  std::vector<VertexRecord> v;

  HostGrid() = default;
  HostGrid(u64 r, u64 c, Encoding e) : rows(r), cols(c), encoding(e), v(r * c) {}
  u64 n() const { return rows * cols; }
  u64 idx(Coord c) const { return (c.row - 1) * cols + (c.col - 1); }
  Coord coord(u64 i) const { return {i / cols + 1, i % cols + 1}; }
  VertexRecord& at(Coord c) { return v[idx(c)]; }
  const VertexRecord& at(Coord c) const { return v[idx(c)]; }
  bool undirected() const { return encoding == Encoding::weighted_undirected; }
  /// Adds an edge; for undirected graphs both directions are set.
  void add_edge(Coord c, int d, u64 w = 1);
  u64 edge_count() const;
};

/// A grid graph stored as a file on a SimDisk.
struct GridGraph {
  SimDisk* sim = nullptr;
  FileId file;
  GridHeader header;

  u64 n() const { return header.n(); }
  u64 rec() const { return record_bytes(header.encoding); }
  u64 offset(u64 index) const { return header.header_bytes + index * rec(); }
};

/// Writes a HostGrid into a new sim file (uncounted, like loading an input).
GridGraph store_grid(SimDisk& sim, const std::string& name, const HostGrid& g, Order order);
/// Reads a grid file back into host memory (uncounted).
HostGrid load_host(const GridGraph& g);
GridGraph open_grid(SimDisk& sim, FileId f);

/// Decodes one vertex record through the simulated cache.
VertexRecord read_vertex(const GridGraph& g, u64 index);
VertexRecord decode_record(Encoding e, std::span<const std::byte> bytes);
void encode_record(Encoding e, const VertexRecord& r, std::span<std::byte> out);

/// Permutes the payload into another order, walking the grid in Z-order.
GridGraph convert_order(const GridGraph& g, Order target, const std::string& out_name);

enum class Model { weighted_dag, weighted_undirected, unit_directed, tree, planar_dag, weighted_directed };
std::string to_string(Model m);
Model parse_model(const std::string& s);

struct GenOptions {
  u64 max_weight = u64(1) << 20;
  double edge_prob = 0.6;
  bool distinct_weights = false;
};

/// Deterministic random instance for a model; rows, cols >= 1.
HostGrid generate(u64 rows, u64 cols, Model model, u64 seed, const GenOptions& opt = {});

/// Result files share the grid header with a result encoding.
GridHeader result_header(u64 rows, u64 cols, Encoding e, u64 count, u64 block_bytes);

/// Header and u64 payload of a result file, read without counting I/O.
GridHeader result_info(const SimDisk& sim, FileId f);
std::vector<u64> result_u64(const SimDisk& sim, FileId f);

/// Host file round trip for the CLI.
void save_file(const std::string& path, const std::vector<std::byte>& bytes);
std::vector<std::byte> load_file(const std::string& path);

}  // namespace gridio
