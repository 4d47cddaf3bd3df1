#include "gridio/gridfmt.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <random>

namespace gridio {

int direction_of(int drow, int dcol) {
  for (int d = 0; d < 8; ++d)
    if (kDr[d] == drow && kDc[d] == dcol) return d;
  return -1;
}

u64 record_bytes(Encoding e) {
  switch (e) {
    case Encoding::unweighted_directed: return 1;
    case Encoding::weighted_directed: return 64;
    case Encoding::weighted_undirected: return 32;
    case Encoding::distances:
    case Encoding::vertex_ids:
    case Encoding::labels:
    case Encoding::euler_ids: return 8;
    case Encoding::mst_edges: return 24;
    case Encoding::euler_steps: return 1;
  }
  throw std::invalid_argument("unknown encoding");
}

std::string to_string(Order o) {
  switch (o) {
    case Order::row_major: return "row_major";
    case Order::col_major: return "col_major";
    case Order::z_order: return "z_order";
  }
  return "?";
}

Order parse_order(const std::string& s) {
  if (s == "row_major") return Order::row_major;
  if (s == "col_major") return Order::col_major;
  if (s == "z_order") return Order::z_order;
  throw std::invalid_argument("unknown order: " + s);
}

std::string to_string(Encoding e) {
  switch (e) {
    case Encoding::unweighted_directed: return "unweighted_directed";
    case Encoding::weighted_directed: return "weighted_directed";
    case Encoding::weighted_undirected: return "weighted_undirected";
    case Encoding::distances: return "distances";
    case Encoding::vertex_ids: return "vertex_ids";
    case Encoding::labels: return "labels";
    case Encoding::mst_edges: return "mst_edges";
    case Encoding::euler_steps: return "euler_steps";
    case Encoding::euler_ids: return "euler_ids";
  }
  return "?";
}

int z_levels(u64 rows, u64 cols) {
  int k = 0;
  while ((u64(1) << k) < rows || (u64(1) << k) < cols) ++k;
  return k;
}

namespace {

u64 in_grid(u64 rows, u64 cols, u64 r0, u64 c0, u64 size) {
  u64 h = r0 >= rows ? 0 : std::min(size, rows - r0);
  u64 w = c0 >= cols ? 0 : std::min(size, cols - c0);
  return h * w;
}

void check(u64 rows, u64 cols, u64 row, u64 col) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty grid");
  if (row < 1 || row > rows || col < 1 || col > cols)
    throw std::out_of_range("coordinate outside grid");
}

}  // namespace

u64 coord_to_index(Order order, u64 rows, u64 cols, u64 row, u64 col) {
  check(rows, cols, row, col);
  switch (order) {
    case Order::row_major: return (row - 1) * cols + (col - 1);
    case Order::col_major: return (col - 1) * rows + (row - 1);
    case Order::z_order: break;
  }
  u64 r = row - 1, c = col - 1, r0 = 0, c0 = 0, idx = 0;
  for (u64 size = u64(1) << z_levels(rows, cols); size > 1; size /= 2) {
    u64 half = size / 2;
    int q = (r >= r0 + half ? 2 : 0) + (c >= c0 + half ? 1 : 0);
    for (int p = 0; p < q; ++p)
      idx += in_grid(rows, cols, r0 + (p >> 1) * half, c0 + (p & 1) * half, half);
    r0 += (q >> 1) * half;
    c0 += (q & 1) * half;
  }
  return idx;
}

Coord index_to_coord(Order order, u64 rows, u64 cols, u64 index) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty grid");
  if (index >= rows * cols) throw std::out_of_range("index outside grid");
  switch (order) {
    case Order::row_major: return {index / cols + 1, index % cols + 1};
    case Order::col_major: return {index % rows + 1, index / rows + 1};
    case Order::z_order: break;
  }
  u64 r0 = 0, c0 = 0;
  for (u64 size = u64(1) << z_levels(rows, cols); size > 1; size /= 2) {
    u64 half = size / 2;
    for (int p = 0; p < 4; ++p) {
      u64 pr = r0 + (p >> 1) * half, pc = c0 + (p & 1) * half;
      u64 cnt = in_grid(rows, cols, pr, pc, half);
      if (index < cnt) {
        r0 = pr;
        c0 = pc;
        break;
      }
      index -= cnt;
    }
  }
  return {r0 + 1, c0 + 1};
}

bool neighbour(u64 rows, u64 cols, Coord c, int d, Coord& out) {
  long long r = static_cast<long long>(c.row) + kDr[d];
  long long k = static_cast<long long>(c.col) + kDc[d];
  if (r < 1 || k < 1 || r > static_cast<long long>(rows) || k > static_cast<long long>(cols)) return false;
  out = {static_cast<u64>(r), static_cast<u64>(k)};
  return true;
}

u64 header_span(u64 block_bytes) {
  return (kHeaderCore + block_bytes - 1) / block_bytes * block_bytes;
}

std::vector<std::byte> encode_header(const GridHeader& h) {
  ByteWriter w;
  w.put(std::array<char, 4>{'G', 'G', 'I', 'O'});
  w.put(h.version);
  w.put(h.rows);
  w.put(h.cols);
  w.put(static_cast<u8>(h.order));
  w.put(static_cast<u8>(h.encoding));
  w.put(u16(0));
  w.put(u32(0));
  w.put(h.count);
  w.put(h.header_bytes);
  w.bytes.resize(h.header_bytes, std::byte{0});
  return w.bytes;
}

GridHeader decode_header(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  auto magic = r.get<std::array<char, 4>>();
  if (std::string(magic.begin(), magic.end()) != "GGIO") throw IoError("bad magic");
  GridHeader h;
  h.version = r.get<u32>();
  h.rows = r.get<u64>();
  h.cols = r.get<u64>();
  h.order = static_cast<Order>(r.get<u8>());
  h.encoding = static_cast<Encoding>(r.get<u8>());
  r.get<u16>();
  r.get<u32>();
  h.count = r.get<u64>();
  h.header_bytes = r.get<u64>();
  if (h.version != 1) throw IoError("unsupported version");
  if (h.rows == 0 || h.cols == 0) throw IoError("empty grid in header");
  return h;
}

void HostGrid::add_edge(Coord c, int d, u64 w) {
  Coord o;
  if (!neighbour(rows, cols, c, d, o)) throw std::out_of_range("edge leaves the grid");
  at(c).set(d, w);
  if (undirected()) at(o).set(opposite(d), w);
}

u64 HostGrid::edge_count() const {
  u64 m = 0;
  for (const auto& r : v) m += std::popcount(r.mask);
  return undirected() ? m / 2 : m;
}

void encode_record(Encoding e, const VertexRecord& r, std::span<std::byte> out) {
  switch (e) {
    case Encoding::unweighted_directed: out[0] = std::byte{r.mask}; return;
    case Encoding::weighted_directed:
      for (int d = 0; d < 8; ++d) {
        u64 w = r.has(d) ? r.w[d] : kInfinity;
        std::memcpy(out.data() + 8 * d, &w, 8);
      }
      return;
    case Encoding::weighted_undirected:
      for (int s = 0; s < 4; ++s) {
        int d = kUndirectedSlots[s];
        u64 w = r.has(d) ? r.w[d] : kInfinity;
        std::memcpy(out.data() + 8 * s, &w, 8);
      }
      return;
    default: throw std::invalid_argument("not a graph encoding");
  }
}

VertexRecord decode_record(Encoding e, std::span<const std::byte> in) {
  VertexRecord r;
  switch (e) {
    case Encoding::unweighted_directed: {
      u8 m = std::to_integer<u8>(in[0]);
      for (int d = 0; d < 8; ++d)
        if ((m >> d) & 1) r.set(d, 1);
      return r;
    }
    case Encoding::weighted_directed:
      for (int d = 0; d < 8; ++d) {
        u64 w;
        std::memcpy(&w, in.data() + 8 * d, 8);
        if (w != kInfinity) r.set(d, w);
      }
      return r;
    case Encoding::weighted_undirected:
      for (int s = 0; s < 4; ++s) {
        u64 w;
        std::memcpy(&w, in.data() + 8 * s, 8);
        if (w != kInfinity) r.set(kUndirectedSlots[s], w);
      }
      return r;
    default: throw IoError("not a graph encoding");
  }
}

GridGraph store_grid(SimDisk& sim, const std::string& name, const HostGrid& g, Order order) {
  GridHeader h;
  h.rows = g.rows;
  h.cols = g.cols;
  h.order = order;
  h.encoding = g.encoding;
  h.count = g.n();
  h.header_bytes = header_span(sim.block_bytes());
  u64 rb = record_bytes(g.encoding);
  std::vector<std::byte> bytes = encode_header(h);
  bytes.resize(h.header_bytes + g.n() * rb);
  for (u64 i = 0; i < g.n(); ++i) {
    Coord c = g.coord(i);
    u64 at = coord_to_index(order, g.rows, g.cols, c.row, c.col);
    encode_record(g.encoding, g.v[i], std::span(bytes).subspan(h.header_bytes + at * rb, rb));
  }
  FileId f = sim.open_file(name);
  sim.set_raw(f, std::move(bytes));
  return GridGraph{&sim, f, h};
}

GridGraph open_grid(SimDisk& sim, FileId f) {
  const auto& raw = sim.raw(f);
  if (raw.size() < kHeaderCore) throw IoError("file too short for a header");
  GridHeader h = decode_header(std::span(raw).first(kHeaderCore));
  if (h.header_bytes % sim.block_bytes() != 0) {
    // re-pad the header to this simulator's block size
    std::vector<std::byte> fixed;
    GridHeader nh = h;
    nh.header_bytes = header_span(sim.block_bytes());
    fixed = encode_header(nh);
    fixed.insert(fixed.end(), raw.begin() + h.header_bytes, raw.end());
    sim.set_raw(f, std::move(fixed));
    h = nh;
  }
  if (h.encoding <= Encoding::weighted_undirected &&
      sim.length(f) < h.header_bytes + h.n() * record_bytes(h.encoding))
    throw IoError("payload shorter than rows*cols records");
  return GridGraph{&sim, f, h};
}

HostGrid load_host(const GridGraph& g) {
  const auto& raw = g.sim->raw(g.file);
  HostGrid out(g.header.rows, g.header.cols, g.header.encoding);
  u64 rb = g.rec();
  for (u64 i = 0; i < g.n(); ++i) {
    Coord c = index_to_coord(g.header.order, g.header.rows, g.header.cols, i);
    VertexRecord r = decode_record(g.header.encoding, std::span(raw).subspan(g.offset(i), rb));
    for (int d = 0; d < 8; ++d)
      if (r.has(d)) {
        Coord o;
        if (!neighbour(out.rows, out.cols, c, d, o)) throw IoError("edge points outside the grid");
        if (out.undirected()) out.add_edge(c, d, r.w[d]);
        else out.at(c).set(d, r.w[d]);
      }
  }
  return out;
}

VertexRecord read_vertex(const GridGraph& g, u64 index) {
  if (index >= g.n()) throw std::out_of_range("vertex index");
  std::vector<std::byte> buf(g.rec());
  g.sim->read(g.file, g.offset(index), buf);
  VertexRecord r = decode_record(g.header.encoding, buf);
  Coord c = index_to_coord(g.header.order, g.header.rows, g.header.cols, index);
  for (int d = 0; d < 8; ++d) {
    Coord o;
    if (r.has(d) && !neighbour(g.header.rows, g.header.cols, c, d, o))
      throw IoError("malformed record: edge points outside the grid");
  }
  return r;
}

GridGraph convert_order(const GridGraph& g, Order target, const std::string& out_name) {
  if (target == g.header.order) throw std::invalid_argument("source and target order coincide");
  SimDisk& sim = *g.sim;
  GridHeader h = g.header;
  h.order = target;
  FileId out = sim.open_file(out_name);
  u64 rb = g.rec();
  u64 rows = h.rows, cols = h.cols;
  std::vector<std::byte> buf(rb);
  auto hdr = encode_header(h);
  if (target == Order::z_order) {
    SeqWriter w(sim, out);
    w.write(hdr);
    for (u64 i = 0; i < g.n(); ++i) {
      Coord c = index_to_coord(Order::z_order, rows, cols, i);
      sim.read(g.file, g.offset(coord_to_index(g.header.order, rows, cols, c.row, c.col)), buf);
      w.write(buf);
    }
    w.close();
  } else {
    sim.write(out, 0, hdr);
    std::optional<SeqReader> rd;
    if (g.header.order == Order::z_order) rd.emplace(sim, g.file, g.header.header_bytes);
    for (u64 i = 0; i < g.n(); ++i) {
      Coord c = index_to_coord(Order::z_order, rows, cols, i);
      if (rd) rd->read(buf);
      else sim.read(g.file, g.offset(coord_to_index(g.header.order, rows, cols, c.row, c.col)), buf);
      sim.write(out, h.header_bytes + coord_to_index(target, rows, cols, c.row, c.col) * rb, buf);
    }
    sim.flush();
  }
  return GridGraph{&sim, out, h};
}

std::string to_string(Model m) {
  switch (m) {
    case Model::weighted_dag: return "weighted_dag";
    case Model::weighted_undirected: return "weighted_undirected";
    case Model::unit_directed: return "unit_directed";
    case Model::tree: return "tree";
    case Model::planar_dag: return "planar_dag";
    case Model::weighted_directed: return "weighted_directed";
  }
  return "?";
}

Model parse_model(const std::string& s) {
  for (Model m : {Model::weighted_dag, Model::weighted_undirected, Model::unit_directed, Model::tree,
                  Model::planar_dag, Model::weighted_directed})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown model: " + s);
}

namespace {

struct Dsu {
  std::vector<u64> p;
  explicit Dsu(u64 n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  u64 find(u64 x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(u64 a, u64 b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

}  // namespace

HostGrid generate(u64 rows, u64 cols, Model model, u64 seed, const GenOptions& opt) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("rows and cols must be positive");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + static_cast<u64>(model) + 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<u64> weight(0, opt.max_weight);
  u64 n = rows * cols;

  // undirected candidate pairs: each pair once, from the vertex storing E, SE, S, SW
  auto pairs = [&](bool planar) {
    std::vector<std::pair<Coord, int>> out;
    for (u64 r = 1; r <= rows; ++r)
      for (u64 c = 1; c <= cols; ++c) {
        Coord o;
        for (int d : {E, S})
          if (neighbour(rows, cols, {r, c}, d, o)) out.push_back({{r, c}, d});
        if (r < rows && c < cols) {
          // cell with top-left (r,c): diagonals SE from (r,c) and SW from (r,c+1)
          if (planar) {
            double x = coin(rng);
            if (x < 0.25) out.push_back({{r, c}, SE});
            else if (x < 0.5) out.push_back({{r, c + 1}, SW});
          } else {
            out.push_back({{r, c}, SE});
            out.push_back({{r, c + 1}, SW});
          }
        }
      }
    return out;
  };

  switch (model) {
    case Model::weighted_dag:
    case Model::planar_dag: {
      bool planar = model == Model::planar_dag;
      HostGrid g(rows, cols, planar ? Encoding::unweighted_directed : Encoding::weighted_directed);
      std::vector<u64> key(n);
      std::iota(key.begin(), key.end(), 0);
      std::shuffle(key.begin(), key.end(), rng);
      for (auto [c, d] : pairs(planar)) {
        if (coin(rng) >= opt.edge_prob) continue;
        Coord o;
        neighbour(rows, cols, c, d, o);
        u64 w = planar ? 1 : weight(rng);
        if (key[g.idx(c)] < key[g.idx(o)]) g.at(c).set(d, w);
        else g.at(o).set(opposite(d), w);
      }
      return g;
    }
    case Model::weighted_directed:
    case Model::unit_directed: {
      bool unit = model == Model::unit_directed;
      HostGrid g(rows, cols, unit ? Encoding::unweighted_directed : Encoding::weighted_directed);
      for (u64 i = 0; i < n; ++i)
        for (int d = 0; d < 8; ++d) {
          Coord o;
          if (!neighbour(rows, cols, g.coord(i), d, o)) continue;
          if (coin(rng) < opt.edge_prob) g.v[i].set(d, unit ? 1 : weight(rng));
        }
      return g;
    }
    case Model::weighted_undirected: {
      HostGrid g(rows, cols, Encoding::weighted_undirected);
      std::vector<std::pair<Coord, int>> chosen;
      for (auto [c, d] : pairs(false)) {
        bool diagonal = d == SE || d == SW;
        if (diagonal && coin(rng) >= opt.edge_prob / 2) continue;
        chosen.push_back({c, d});
      }
      std::vector<u64> ws(chosen.size());
      if (opt.distinct_weights) {
        std::iota(ws.begin(), ws.end(), 1);
        std::shuffle(ws.begin(), ws.end(), rng);
      } else {
        std::uniform_int_distribution<u64> pos(1, std::max<u64>(1, opt.max_weight));
        for (auto& w : ws) w = pos(rng);
      }
      for (std::size_t i = 0; i < chosen.size(); ++i) g.add_edge(chosen[i].first, chosen[i].second, ws[i]);
      return g;
    }
    case Model::tree: {
      HostGrid g(rows, cols, Encoding::unweighted_directed);
      auto cand = pairs(false);
      std::shuffle(cand.begin(), cand.end(), rng);
      Dsu dsu(n);
      for (auto [c, d] : cand) {
        Coord o;
        neighbour(rows, cols, c, d, o);
        if (!dsu.unite(g.idx(c), g.idx(o))) continue;
        g.at(c).set(d, 1);
        g.at(o).set(opposite(d), 1);
      }
      return g;
    }
  }
  throw std::invalid_argument("unknown model");
}

GridHeader result_header(u64 rows, u64 cols, Encoding e, u64 count, u64 block_bytes) {
  GridHeader h;
  h.rows = rows;
  h.cols = cols;
  h.order = Order::z_order;
  h.encoding = e;
  h.count = count;
  h.header_bytes = header_span(block_bytes);
  return h;
}

void save_file(const std::string& path, const std::vector<std::byte>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::byte> load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(buf.size());
  std::memcpy(out.data(), buf.data(), buf.size());
  return out;
}

}  // namespace gridio

namespace gridio {

GridHeader result_info(const SimDisk& sim, FileId f) {
  const auto& raw = sim.raw(f);
  if (raw.size() < kHeaderCore) throw IoError("file too short for a header");
  return decode_header(std::span(raw).first(kHeaderCore));
}

std::vector<u64> result_u64(const SimDisk& sim, FileId f) {
  GridHeader h = result_info(sim, f);
  const auto& raw = sim.raw(f);
  if (raw.size() < h.header_bytes + h.count * 8) throw IoError("result payload truncated");
  std::vector<u64> out(h.count);
  std::memcpy(out.data(), raw.data() + h.header_bytes, h.count * 8);
  return out;
}

}  // namespace gridio
