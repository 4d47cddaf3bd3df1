#include "gridio/clusters.hpp"

#include <algorithm>
#include <queue>

namespace gridio {

ClusterScheme::ClusterScheme(u64 rows, u64 cols, int h) : rows_(rows), cols_(cols), h_(h) {
  if (h < 1 || h > 40) throw std::invalid_argument("cluster level h must be in [1, 40]");
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty grid");
  crows_ = (rows + side() - 1) >> h;
  ccols_ = (cols + side() - 1) >> h;
}

u64 ClusterScheme::rank(ClusterId q) const {
  return coord_to_index(Order::z_order, crows_, ccols_, q.i + 1, q.j + 1);
}

ClusterId ClusterScheme::at_rank(u64 r) const {
  Coord c = index_to_coord(Order::z_order, crows_, ccols_, r);
  return {h_, c.row - 1, c.col - 1};
}

Extent ClusterScheme::extent(ClusterId q) const {
  Extent e;
  e.r0 = q.i * side() + 1;
  e.c0 = q.j * side() + 1;
  if (e.r0 > rows_ || e.c0 > cols_) throw std::out_of_range("cluster outside grid");
  e.hr = std::min(side(), rows_ - (e.r0 - 1));
  e.hc = std::min(side(), cols_ - (e.c0 - 1));
  return e;
}

u64 ClusterScheme::first_index(ClusterId q) const {
  Extent e = extent(q);
  return coord_to_index(Order::z_order, rows_, cols_, e.r0, e.c0);
}

u64 ClusterScheme::boundary_size(ClusterId q) const {
  Extent e = extent(q);
  if (e.hr == 1) return e.hc;
  if (e.hc == 1) return e.hr;
  return 2 * e.hr + 2 * e.hc - 4;
}

std::optional<u64> ClusterScheme::boundary_pos(ClusterId q, Coord c) const {
  Extent e = extent(q);
  if (!e.contains(c)) return std::nullopt;
  u64 lr = c.row - e.r0, lc = c.col - e.c0, hr = e.hr, hc = e.hc;
  if (hr == 1) return lc;
  if (hc == 1) return lr;
  if (lr == 0) return lc;
  if (lc == hc - 1) return (hc - 1) + lr;
  if (lr == hr - 1) return (hc - 1) + (hr - 1) + (hc - 1 - lc);
  if (lc == 0) return 2 * (hc - 1) + (hr - 1) + (hr - 1 - lr);
  return std::nullopt;
}

Coord ClusterScheme::boundary_coord(ClusterId q, u64 p) const {
  Extent e = extent(q);
  u64 hr = e.hr, hc = e.hc;
  if (p >= boundary_size(q)) throw std::out_of_range("boundary position");
  u64 lr, lc;
  if (hr == 1) {
    lr = 0;
    lc = p;
  } else if (hc == 1) {
    lr = p;
    lc = 0;
  } else if (p < hc) {
    lr = 0;
    lc = p;
  } else if (p < hc + hr - 1) {
    lr = p - (hc - 1);
    lc = hc - 1;
  } else if (p < 2 * (hc - 1) + hr) {
    lr = hr - 1;
    lc = hc - 1 - (p - (hc - 1) - (hr - 1));
  } else {
    lr = hr - 1 - (p - 2 * (hc - 1) - (hr - 1));
    lc = 0;
  }
  return {e.r0 + lr, e.c0 + lc};
}

std::vector<Coord> ClusterScheme::boundary_vertices(ClusterId q) const {
  std::vector<Coord> out;
  u64 b = boundary_size(q);
  out.reserve(b);
  for (u64 p = 0; p < b; ++p) out.push_back(boundary_coord(q, p));
  return out;
}

std::optional<u64> ClusterScheme::h_number(Coord c) const {
  if (c.row < 1 || c.row > rows_ || c.col < 1 || c.col > cols_) throw std::out_of_range("coordinate");
  ClusterId q = cluster_of(c);
  auto p = boundary_pos(q, c);
  if (!p) return std::nullopt;
  return rank(q) * stride() + *p;
}

bool ClusterScheme::hnum_valid(u64 hn) const {
  if (hn >= hnum_space()) return false;
  return hn % stride() < boundary_size(at_rank(hn / stride()));
}

Coord ClusterScheme::hnum_coord(u64 hn) const {
  if (!hnum_valid(hn)) throw std::out_of_range("unused h-number");
  return boundary_coord(at_rank(hn / stride()), hn % stride());
}

std::optional<u64> InMemoryCluster::inside(u64 l, int d) const {
  long long r = static_cast<long long>(l / ext.hc) + kDr[d];
  long long c = static_cast<long long>(l % ext.hc) + kDc[d];
  if (r < 0 || c < 0 || r >= static_cast<long long>(ext.hr) || c >= static_cast<long long>(ext.hc))
    return std::nullopt;
  return static_cast<u64>(r) * ext.hc + static_cast<u64>(c);
}

InMemoryCluster decode_cluster(const GridGraph& g, const ClusterScheme& s, ClusterId q,
                               std::span<const std::byte> bytes) {
  InMemoryCluster c;
  c.id = q;
  c.ext = s.extent(q);
  c.encoding = g.header.encoding;
  c.rec.resize(c.ext.size());
  u64 rb = g.rec();
  for (u64 t = 0; t < c.ext.size(); ++t) {
    Coord lc = index_to_coord(Order::z_order, c.ext.hr, c.ext.hc, t);
    u64 l = (lc.row - 1) * c.ext.hc + (lc.col - 1);
    VertexRecord r = decode_record(g.header.encoding, bytes.subspan(t * rb, rb));
    for (int d = 0; d < 8; ++d) {
      if (!r.has(d)) continue;
      Coord o;
      if (!neighbour(g.header.rows, g.header.cols, c.coord(l), d, o))
        throw IoError("malformed record: edge points outside the grid");
      c.rec[l].set(d, r.w[d]);
    }
  }
  if (g.header.encoding == Encoding::weighted_undirected) {
    for (u64 l = 0; l < c.size(); ++l)
      for (int d : kUndirectedSlots)
        if (c.rec[l].has(d))
          if (auto o = c.inside(l, d)) c.rec[*o].set(opposite(d), c.rec[l].w[d]);
  }
  return c;
}

InMemoryCluster load_cluster(const GridGraph& g, const ClusterScheme& s, ClusterId q) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("clusters require a Z-order grid");
  Extent e = s.extent(q);
  std::vector<std::byte> bytes(e.size() * g.rec());
  g.sim->read(g.file, g.offset(s.first_index(q)), bytes);
  return decode_cluster(g, s, q, bytes);
}

std::vector<u64> local_dijkstra(const InMemoryCluster& c, const std::vector<std::pair<u64, u64>>& sources) {
  std::vector<u64> dist(c.size(), kInfinity);
  using Item = std::pair<u64, u64>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto [l, d0] : sources)
    if (d0 < dist[l]) {
      dist[l] = d0;
      pq.push({d0, l});
    }
  while (!pq.empty()) {
    auto [d, l] = pq.top();
    pq.pop();
    if (d != dist[l]) continue;
    const VertexRecord& r = c.rec[l];
    for (int k = 0; k < 8; ++k) {
      if (!r.has(k)) continue;
      auto o = c.inside(l, k);
      if (!o) continue;
      u64 nd = d + r.w[k];
      if (nd < dist[*o]) {
        dist[*o] = nd;
        pq.push({nd, *o});
      }
    }
  }
  return dist;
}

std::vector<bool> local_reach(const InMemoryCluster& c, u64 source) {
  std::vector<bool> seen(c.size(), false);
  std::vector<u64> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    u64 l = stack.back();
    stack.pop_back();
    for (int k = 0; k < 8; ++k) {
      if (!c.rec[l].has(k)) continue;
      auto o = c.inside(l, k);
      if (o && !seen[*o]) {
        seen[*o] = true;
        stack.push_back(*o);
      }
    }
  }
  return seen;
}

std::vector<u64> local_zrank(const InMemoryCluster& c) {
  std::vector<u64> z(c.size());
  for (u64 l = 0; l < c.size(); ++l)
    z[l] = coord_to_index(Order::z_order, c.ext.hr, c.ext.hc, l / c.ext.hc + 1, l % c.ext.hc + 1);
  return z;
}

std::vector<u64> local_topo(const InMemoryCluster& c) {
  std::vector<u32> indeg(c.size(), 0);
  for (u64 l = 0; l < c.size(); ++l)
    for (int k = 0; k < 8; ++k)
      if (c.rec[l].has(k))
        if (auto o = c.inside(l, k)) ++indeg[*o];
  auto z = local_zrank(c);
  using Item = std::pair<u64, u64>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (u64 l = 0; l < c.size(); ++l)
    if (indeg[l] == 0) ready.push({z[l], l});
  std::vector<u64> order;
  order.reserve(c.size());
  while (!ready.empty()) {
    u64 l = ready.top().second;
    ready.pop();
    order.push_back(l);
    for (int k = 0; k < 8; ++k)
      if (c.rec[l].has(k))
        if (auto o = c.inside(l, k))
          if (--indeg[*o] == 0) ready.push({z[*o], *o});
  }
  if (order.size() != c.size()) throw std::runtime_error("cycle inside a cluster");
  return order;
}

std::string to_string(Alg a) {
  switch (a) {
    case Alg::sssp: return "sssp";
    case Alg::bfs: return "bfs";
    case Alg::mst_aware: return "mst_cache_aware";
    case Alg::mst_oblivious: return "mst_cache_oblivious";
    case Alg::toposort: return "toposort";
    case Alg::tfp: return "tfp";
    case Alg::euler: return "euler";
  }
  return "?";
}

Alg parse_alg(const std::string& s) {
  for (Alg a : {Alg::sssp, Alg::bfs, Alg::mst_aware, Alg::mst_oblivious, Alg::toposort, Alg::tfp, Alg::euler})
    if (to_string(a) == s) return a;
  if (s == "mst") return Alg::mst_aware;
  throw std::invalid_argument("unknown algorithm: " + s);
}

u64 working_set(Alg a, int h) {
  u64 q = u64(1) << (2 * h);  // 4^h vertices per cluster
  switch (a) {
    case Alg::sssp: return 128 * q;            // G' rows of one cluster, 8-byte slots
    case Alg::bfs: return 64 * q + 9 * q;      // 4-byte G' rows, input byte and distance
    case Alg::mst_aware:
    case Alg::mst_oblivious: return 64 * q;    // 32-byte records plus the cluster MST
    case Alg::toposort: return 3 * q;          // input byte and 2 bytes of G' bits
    case Alg::tfp: return 32 * q;              // chunk and message planning state
    case Alg::euler: return 2 * q;             // input byte and the walk marks
  }
  return ~u64(0);
}

int choose_h(const SimConfig& sim, Alg a) {
  int h = 1;
  while (h < 31 && working_set(a, h + 1) <= sim.memory_bytes) ++h;
  return h;
}

int auto_h(const SimConfig& sim, Alg a, u64 rows, u64 cols) {
  return std::min(choose_h(sim, a), std::max(1, z_levels(rows, cols)));
}

u64 SeparatorGraph::record_bytes() const {
  switch (mode) {
    case SepMode::weighted_distance: return slots() * 8;
    case SepMode::unit_distance: return slots() * 4;
    case SepMode::reachability: return (slots() + 7) / 8;
  }
  return 0;
}

std::optional<u64> SeparatorGraph::slot_target(u64 hn, u64 slot) const {
  u64 stride = scheme.stride();
  ClusterId q = scheme.hnum_cluster(hn);
  if (slot < stride) {
    if (slot >= scheme.boundary_size(q) || slot == hn % stride) return std::nullopt;
    return (hn / stride) * stride + slot;
  }
  Coord o;
  if (!neighbour(scheme.rows(), scheme.cols(), scheme.hnum_coord(hn), static_cast<int>(slot - stride), o))
    return std::nullopt;
  return scheme.h_number(o);
}

std::vector<std::vector<u64>> boundary_payload(const InMemoryCluster& c, const ClusterScheme& s,
                                               SepMode mode, bool parallel) {
  auto bv = s.boundary_vertices(c.id);
  u64 nb = bv.size(), stride = s.stride();
  std::vector<std::vector<u64>> rows(nb, std::vector<u64>(stride + 8, kInfinity));
  auto one = [&](long long p) {
    u64 src = c.local(bv[p]);
    auto& row = rows[p];
    if (mode == SepMode::reachability) {
      auto seen = local_reach(c, src);
      for (u64 q = 0; q < nb; ++q)
        if (q != u64(p) && seen[c.local(bv[q])]) row[q] = 1;
    } else {
      auto dist = local_dijkstra(c, {{src, 0}});
      for (u64 q = 0; q < nb; ++q)
        if (q != u64(p)) row[q] = dist[c.local(bv[q])];
    }
    const VertexRecord& r = c.rec[src];
    for (int d = 0; d < 8; ++d)
      if (r.has(d) && !c.inside(src, d)) row[stride + d] = mode == SepMode::weighted_distance ? r.w[d] : 1;
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long p = 0; p < static_cast<long long>(nb); ++p) one(p);
  } else {
    for (long long p = 0; p < static_cast<long long>(nb); ++p) one(p);
  }
  return rows;
}

namespace {

void encode_sep_record(SepMode mode, const std::vector<u64>& row, std::vector<std::byte>& out) {
  std::fill(out.begin(), out.end(), std::byte{0});
  for (u64 k = 0; k < row.size(); ++k) {
    switch (mode) {
      case SepMode::weighted_distance: std::memcpy(out.data() + 8 * k, &row[k], 8); break;
      case SepMode::unit_distance: {
        u32 w = row[k] == kInfinity ? ~u32(0) : static_cast<u32>(row[k]);
        std::memcpy(out.data() + 4 * k, &w, 4);
        break;
      }
      case SepMode::reachability:
        if (row[k] != kInfinity) out[k / 8] |= std::byte(1u << (k % 8));
        break;
    }
  }
}

}  // namespace

std::vector<u64> read_separator_record(SimDisk& sim, const SeparatorGraph& gp, u64 hn) {
  std::vector<std::byte> buf(gp.record_bytes());
  sim.read(gp.file, gp.offset(hn), buf);
  std::vector<u64> row(gp.slots(), kInfinity);
  for (u64 k = 0; k < row.size(); ++k) {
    switch (gp.mode) {
      case SepMode::weighted_distance: std::memcpy(&row[k], buf.data() + 8 * k, 8); break;
      case SepMode::unit_distance: {
        u32 w;
        std::memcpy(&w, buf.data() + 4 * k, 4);
        if (w != ~u32(0)) row[k] = w;
        break;
      }
      case SepMode::reachability:
        if (std::to_integer<u8>(buf[k / 8]) & (1u << (k % 8))) row[k] = 1;
        break;
    }
  }
  return row;
}

SeparatorGraph build_separator_graph(const GridGraph& g, int h, SepMode mode, const SepOptions& opt) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("separator graph needs a Z-order grid");
  bool weighted = g.header.encoding == Encoding::weighted_directed;
  if (mode == SepMode::weighted_distance && !weighted)
    throw std::invalid_argument("weighted separator graph needs a weighted directed input");
  if (mode == SepMode::unit_distance && g.header.encoding != Encoding::unweighted_directed)
    throw std::invalid_argument("unit mode needs an unweighted directed input");
  if (mode == SepMode::reachability && g.header.encoding == Encoding::weighted_undirected)
    throw std::invalid_argument("reachability mode needs a directed input");
  SimDisk& sim = *g.sim;
  SeparatorGraph gp;
  gp.mode = mode;
  gp.scheme = ClusterScheme(g.header.rows, g.header.cols, h);
  const ClusterScheme& s = gp.scheme;
  gp.file = sim.open_file(opt.name);
  bool reach = mode == SepMode::reachability;
  if (reach) {
    gp.degree_file = sim.open_file(opt.name + ".D");
    gp.zero_queue = sim.open_file(opt.name + ".Z");
    gp.indegree.assign(s.hnum_space(), 0);
  }
  SeqWriter out(sim, gp.file);
  std::optional<SeqWriter> zq;
  if (reach) zq.emplace(sim, gp.zero_queue);
  std::vector<std::byte> rec(gp.record_bytes());
  std::vector<u64> empty(gp.slots(), kInfinity);
  SeqReader in(sim, g.file, g.header.header_bytes);
  for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
    ClusterId q = s.at_rank(qr);
    std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
    in.read(bytes);
    InMemoryCluster c = decode_cluster(g, s, q, bytes);
    auto rows = boundary_payload(c, s, mode, opt.parallel);
    for (u64 p = 0; p < s.stride(); ++p) {
      encode_sep_record(mode, p < rows.size() ? rows[p] : empty, rec);
      out.write(rec);
    }
    if (!reach) continue;
    // in-degrees: intra-cluster bits plus edges arriving from neighbouring clusters
    u64 base = qr * s.stride();
    for (u64 p = 0; p < rows.size(); ++p)
      for (u64 t = 0; t < rows.size(); ++t)
        if (rows[p][t] != kInfinity) ++gp.indegree[base + t];
    for (u64 t = 0; t < rows.size(); ++t) {
      Coord v = s.boundary_coord(q, t);
      for (int d = 0; d < 8; ++d) {
        Coord x;
        if (!neighbour(s.rows(), s.cols(), v, d, x) || c.ext.contains(x)) continue;
        VertexRecord xr = read_vertex(g, z_index(s.rows(), s.cols(), x));
        if (xr.has(opposite(d))) ++gp.indegree[base + t];
      }
      if (gp.indegree[base + t] == 0) {
        zq->put(base + t);
        ++gp.zero_count;
      }
    }
  }
  out.close();
  if (reach) {
    zq->close();
    SeqWriter dw(sim, gp.degree_file);
    for (u16 d : gp.indegree) dw.put(d);
    dw.close();
  }
  return gp;
}

}  // namespace gridio
