#include "gridio/mst.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace gridio {

namespace {

WeightedEdge make_edge(u64 x, u64 y, u64 w) { return x < y ? WeightedEdge{x, y, w} : WeightedEdge{y, x, w}; }

}  // namespace

WeightedEdge Chain::rep() const {
  u64 w = edges.empty() ? 0 : edges[max_pos].w;
  return make_edge(u0, um, w);
}

std::vector<WeightedEdge> ContractedTree::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(chains.size());
  for (const auto& c : chains) out.push_back(c.rep());
  return out;
}

ContractedTree prune_and_contract(std::span<const WeightedEdge> forest, const std::function<bool(u64)>& keep) {
  std::unordered_map<u64, std::vector<std::pair<u64, size_t>>> adj;
  for (size_t i = 0; i < forest.size(); ++i) {
    adj[forest[i].a].push_back({forest[i].b, i});
    adj[forest[i].b].push_back({forest[i].a, i});
  }
  std::vector<u64> verts;
  verts.reserve(adj.size());
  for (const auto& [v, _] : adj) verts.push_back(v);
  std::sort(verts.begin(), verts.end());
  std::unordered_map<u64, u64> deg;
  std::unordered_map<u64, bool> kept_flag;
  for (u64 v : verts) {
    deg[v] = adj[v].size();
    kept_flag[v] = keep(v);
  }
  std::vector<bool> alive(forest.size(), true);
  ContractedTree out;

  std::deque<u64> leaves;
  for (u64 v : verts)
    if (deg[v] == 1 && !kept_flag[v]) leaves.push_back(v);
  while (!leaves.empty()) {
    u64 v = leaves.front();
    leaves.pop_front();
    if (deg[v] != 1) continue;
    for (auto [o, i] : adj[v]) {
      if (!alive[i]) continue;
      alive[i] = false;
      out.dead_ends.push_back(forest[i]);
      deg[v] = 0;
      if (--deg[o] == 1 && !kept_flag[o]) leaves.push_back(o);
      break;
    }
  }

  auto anchor = [&](u64 v) { return deg[v] > 0 && (kept_flag[v] || deg[v] != 2); };
  std::vector<bool> used(forest.size(), false);
  for (u64 v : verts) {
    if (kept_flag[v] || (deg[v] > 0 && deg[v] != 2)) out.kept.push_back(v);
    if (!anchor(v)) continue;
    for (auto [first, i0] : adj[v]) {
      if (!alive[i0] || used[i0]) continue;
      Chain c;
      c.u0 = v;
      u64 cur = v;
      size_t e = i0;
      for (;;) {
        used[e] = true;
        c.edges.push_back(forest[e]);
        u64 next = forest[e].a == cur ? forest[e].b : forest[e].a;
        cur = next;
        if (anchor(cur)) break;
        size_t nxt = forest.size();
        for (auto [o, j] : adj[cur])
          if (alive[j] && !used[j]) nxt = j;
        if (nxt == forest.size()) throw std::logic_error("chain walk stuck: input is not a forest");
        e = nxt;
      }
      c.um = cur;
      for (size_t k = 1; k < c.edges.size(); ++k)
        if (c.edges[k].w > c.edges[c.max_pos].w) c.max_pos = k;
      out.chains.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<WeightedEdge> expand(const ContractedTree& t, const std::set<EdgeKey>& selected) {
  std::vector<WeightedEdge> out(t.dead_ends);
  for (const auto& c : t.chains) {
    bool all = selected.count(key_of(c.rep())) != 0;
    for (size_t k = 0; k < c.edges.size(); ++k)
      if (all || k != c.max_pos) out.push_back(c.edges[k]);
  }
  return out;
}

std::vector<WeightedEdge> expand_all(const ContractedTree& t) {
  std::set<EdgeKey> all;
  for (const auto& c : t.chains) all.insert(key_of(c.rep()));
  return expand(t, all);
}

std::vector<WeightedEdge> prim_forest(std::span<const WeightedEdge> edges) {
  std::vector<u64> ids;
  ids.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    ids.push_back(e.a);
    ids.push_back(e.b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto dense = [&](u64 v) { return static_cast<size_t>(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin()); };
  std::vector<std::vector<size_t>> adj(ids.size());
  for (size_t i = 0; i < edges.size(); ++i) {
    adj[dense(edges[i].a)].push_back(i);
    adj[dense(edges[i].b)].push_back(i);
  }
  using Item = std::tuple<u64, u64, u64, size_t>;  // w, a, b, edge
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<bool> in(ids.size(), false);
  std::vector<WeightedEdge> out;
  auto add = [&](size_t v) {
    in[v] = true;
    for (size_t i : adj[v]) {
      const auto& e = edges[i];
      size_t o = dense(e.a) == v ? dense(e.b) : dense(e.a);
      if (!in[o]) heap.push({e.w, e.a, e.b, i});
    }
  };
  for (size_t s = 0; s < ids.size(); ++s) {
    if (in[s]) continue;
    add(s);
    while (!heap.empty()) {
      auto [w, a, b, i] = heap.top();
      heap.pop();
      size_t da = dense(a), db = dense(b);
      if (in[da] && in[db]) continue;
      out.push_back(edges[i]);
      add(in[da] ? db : da);
    }
  }
  return out;
}

std::vector<WeightedEdge> read_mst(const SimDisk& sim, FileId f) {
  auto v = result_u64(sim, f);
  if (v.size() % 3 != 0) throw IoError("MST payload is not a list of triples");
  std::vector<WeightedEdge> out;
  for (size_t i = 0; i + 2 < v.size(); i += 3) out.push_back({v[i], v[i + 1], v[i + 2]});
  return out;
}

namespace {

void check_input(const GridGraph& g) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("mst needs a Z-order grid");
  if (g.header.encoding != Encoding::weighted_undirected)
    throw std::invalid_argument("mst needs a weighted undirected grid");
}

/// Storing endpoint of an undirected edge: the row-major smaller one.
u64 storer(u64 rows, u64 cols, const WeightedEdge& e) {
  Coord a = index_to_coord(Order::z_order, rows, cols, e.a), b = index_to_coord(Order::z_order, rows, cols, e.b);
  return std::tie(a.row, a.col) < std::tie(b.row, b.col) ? e.a : e.b;
}

struct ClusterPart {
  ContractedTree tree;
  std::vector<WeightedEdge> crossing;  // stored here, other endpoint in another cluster
};

ClusterPart cluster_part(const GridGraph& g, const ClusterScheme& s, ClusterId q, std::span<const std::byte> bytes) {
  InMemoryCluster c = decode_cluster(g, s, q, bytes);
  std::vector<WeightedEdge> intra;
  ClusterPart part;
  u64 rows = s.rows(), cols = s.cols();
  for (u64 l = 0; l < c.size(); ++l) {
    Coord lc = c.coord(l);
    u64 za = z_index(rows, cols, lc);
    for (int d : kUndirectedSlots) {
      if (!c.rec[l].has(d)) continue;
      Coord o;
      if (!neighbour(rows, cols, lc, d, o)) continue;
      WeightedEdge e = make_edge(za, z_index(rows, cols, o), c.rec[l].w[d]);
      (c.ext.contains(o) ? intra : part.crossing).push_back(e);
    }
  }
  auto forest = prim_forest(intra);
  part.tree = prune_and_contract(forest, [&](u64 z) {
    return s.boundary_pos(q, index_to_coord(Order::z_order, rows, cols, z)).has_value();
  });
  return part;
}

struct UnionFind {
  std::unordered_map<u64, u64> p;
  u64 find(u64 x) {
    auto it = p.find(x);
    if (it == p.end()) {
      p[x] = x;
      return x;
    }
    u64 r = x;
    while (p[r] != r) r = p[r];
    while (p[x] != r) {
      u64 n = p[x];
      p[x] = r;
      x = n;
    }
    return r;
  }
  bool unite(u64 a, u64 b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

std::vector<WeightedEdge> kruskal(std::vector<WeightedEdge> es) {
  std::sort(es.begin(), es.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::tie(x.w, x.a, x.b) < std::tie(y.w, y.a, y.b); });
  UnionFind uf;
  std::vector<WeightedEdge> out;
  for (const auto& e : es)
    if (uf.unite(e.a, e.b)) out.push_back(e);
  return out;
}

void write_edge(SeqWriter& w, const WeightedEdge& e) {
  w.put(e.a);
  w.put(e.b);
  w.put(e.w);
}

}  // namespace

MstResult mst_cache_aware(const GridGraph& g, const MstOptions& opt) {
  check_input(g);
  SimDisk& sim = *g.sim;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::mst_aware, g.header.rows, g.header.cols);
  ClusterScheme s(g.header.rows, g.header.cols, h);
  u64 rows = s.rows(), cols = s.cols();
  auto cluster_bytes = [&](SeqReader& in, ClusterId q) {
    std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
    in.read(bytes);
    return bytes;
  };

  // phase 1: contracted cluster trees and inter-cluster edges form U'
  FileId uf = sim.open_file(opt.prefix + ".U");
  u64 u_count = 0;
  {
    SeqReader in(sim, g.file, g.header.header_bytes);
    SeqWriter w(sim, uf);
    for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
      ClusterId q = s.at_rank(qr);
      ClusterPart part = cluster_part(g, s, q, cluster_bytes(in, q));
      for (const auto& e : part.tree.edges()) write_edge(w, e), ++u_count;
      for (const auto& e : part.crossing) write_edge(w, e), ++u_count;
    }
  }

  // phase 2: MST of U' in memory, tagged with the owning cluster
  FileId tf = sim.open_file(opt.prefix + ".T");
  {
    SeqReader r(sim, uf);
    std::vector<WeightedEdge> u(u_count);
    for (auto& e : u) e = {r.get<u64>(), r.get<u64>(), r.get<u64>()};
    std::vector<std::pair<u64, WeightedEdge>> sel;
    for (const auto& e : kruskal(std::move(u)))
      sel.push_back({s.rank(s.cluster_of(index_to_coord(Order::z_order, rows, cols, storer(rows, cols, e)))), e});
    std::sort(sel.begin(), sel.end());
    SeqWriter w(sim, tf);
    for (const auto& [rank, e] : sel) {
      w.put(rank);
      write_edge(w, e);
    }
    w.put(kInfinity);  // end marker
  }

  // phase 3: expand chains and add dead ends cluster by cluster
  MstResult res;
  res.h = h;
  res.output = sim.open_file(opt.prefix + ".out");
  {
    SeqWriter w(sim, res.output);
    u64 expect = g.n() - 1;
    w.write(encode_header(result_header(rows, cols, Encoding::mst_edges, expect * 3, sim.block_bytes())));
    SeqReader in(sim, g.file, g.header.header_bytes);
    SeqReader tr(sim, tf);
    u64 next_rank = tr.get<u64>();
    for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
      ClusterId q = s.at_rank(qr);
      ClusterPart part = cluster_part(g, s, q, cluster_bytes(in, q));
      std::set<EdgeKey> selected;
      while (next_rank == qr) {
        WeightedEdge e{tr.get<u64>(), tr.get<u64>(), tr.get<u64>()};
        selected.insert(key_of(e));
        next_rank = tr.get<u64>();
      }
      auto out = expand(part.tree, selected);
      for (const auto& e : part.crossing)
        if (selected.count(key_of(e))) out.push_back(e);
      for (const auto& e : out) {
        write_edge(w, e);
        res.weight += e.w;
        ++res.edges;
      }
    }
    w.close();
    if (res.edges != expect) throw std::invalid_argument("graph is disconnected");
  }
  return res;
}

namespace {

/// Cluster of the Z-hierarchy at level j (side 2^j), clipped to the grid.
struct HCluster {
  int j;
  u64 bi, bj;
  Extent ext;
};

std::optional<HCluster> make_hcluster(u64 rows, u64 cols, int j, u64 bi, u64 bj) {
  u64 side = u64(1) << j;
  if (bi * side >= rows || bj * side >= cols) return std::nullopt;
  Extent e{bi * side + 1, bj * side + 1, std::min(side, rows - bi * side), std::min(side, cols - bj * side)};
  return HCluster{j, bi, bj, e};
}

std::vector<Coord> boundary_of(const Extent& e) {
  std::vector<Coord> out;
  if (e.hr == 1 || e.hc == 1) {
    for (u64 r = 0; r < e.hr; ++r)
      for (u64 c = 0; c < e.hc; ++c) out.push_back({e.r0 + r, e.c0 + c});
    return out;
  }
  for (u64 c = 0; c < e.hc; ++c) out.push_back({e.r0, e.c0 + c});
  for (u64 r = 1; r < e.hr; ++r) out.push_back({e.r0 + r, e.c0 + e.hc - 1});
  for (u64 c = e.hc - 1; c-- > 0;) out.push_back({e.r0 + e.hr - 1, e.c0 + c});
  for (u64 r = e.hr - 1; r-- > 1;) out.push_back({e.r0 + r, e.c0});
  return out;
}

bool on_boundary(const Extent& e, Coord c) {
  return e.contains(c) && (c.row == e.r0 || c.col == e.c0 || c.row == e.r0 + e.hr - 1 || c.col == e.c0 + e.hc - 1);
}

// clusters of side 8 are solved straight from their input records
constexpr int kBaseLevel = 3;

class ObliviousMst {
 public:
  ObliviousMst(const GridGraph& g, const MstOptions& opt)
      : g_(g),
        rows_(g.header.rows),
        cols_(g.header.cols),
        in_(*g.sim, g.file, g.header.header_bytes),
        conn_(*g.sim, opt.prefix + ".conn"),
        exps_(*g.sim, opt.prefix + ".exp") {}

  MstResult run(FileId out) {
    int k = z_levels(rows_, cols_);
    HCluster root = *make_hcluster(rows_, cols_, k, 0, 0);
    up(root);
    // the root's contracted tree is final; restate it as a selection list
    auto top = conn_.pop_record();
    ByteReader r(top);
    auto edges = get_rel(r, root);
    ByteWriter w;
    put_rel(w, root, edges);
    conn_.push_record(w.bytes);

    SeqWriter ow(*g_.sim, out);
    u64 expect = g_.n() - 1;
    ow.write(encode_header(result_header(rows_, cols_, Encoding::mst_edges, expect * 3, g_.sim->block_bytes())));
    out_ = &ow;
    down(root);
    ow.close();
    if (res_.edges != expect) throw std::invalid_argument("graph is disconnected");
    res_.output = out;
    res_.connection_bytes = conn_.bytes_pushed();
    res_.expansion_bytes = exps_.bytes_pushed();
    return res_;
  }

 private:
  std::vector<HCluster> children(const HCluster& q) const {
    std::vector<HCluster> out;
    for (auto [di, dj] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}})
      if (auto c = make_hcluster(rows_, cols_, q.j - 1, 2 * q.bi + di, 2 * q.bj + dj)) out.push_back(*c);
    return out;
  }

  u64 z(Coord c) const { return z_index(rows_, cols_, c); }
  Coord coord(u64 zi) const { return index_to_coord(Order::z_order, rows_, cols_, zi); }

  // Record edges are stored relative to the cluster: u32 local Z offsets, the
  // second one replaced by kOut|direction when that endpoint lies outside.
  // Clusters above kNarrowLevel fall back to absolute u64 ids.
  static constexpr u32 kOut = 0x80000000u;
  static constexpr int kNarrowLevel = 15;

  u64 base(const HCluster& q) const { return z({q.ext.r0, q.ext.c0}); }

  void put_vertex(ByteWriter& w, const HCluster& q, u64 v) const {
    if (q.j > kNarrowLevel) w.put(v);
    else w.put(u32(v - base(q)));
  }
  u64 get_vertex(ByteReader& r, const HCluster& q) const {
    return q.j > kNarrowLevel ? r.get<u64>() : base(q) + r.get<u32>();
  }

  void put_rel(ByteWriter& w, const HCluster& q, std::span<const WeightedEdge> es) const {
    w.put(u64(es.size()));
    for (const auto& e : es) {
      if (q.j > kNarrowLevel) {
        w.put(e.a);
        w.put(e.b);
      } else {
        u64 a = e.a, b = e.b;
        if (!q.ext.contains(coord(a))) std::swap(a, b);
        w.put(u32(a - base(q)));
        if (q.ext.contains(coord(b))) {
          w.put(u32(b - base(q)));
        } else {
          Coord ca = coord(a), cb = coord(b);
          w.put(kOut | u32(direction_of(int(cb.row) - int(ca.row), int(cb.col) - int(ca.col))));
        }
      }
      w.put(e.w);
    }
  }
  std::vector<WeightedEdge> get_rel(ByteReader& r, const HCluster& q) const {
    std::vector<WeightedEdge> es(r.get<u64>());
    for (auto& e : es) {
      u64 a, b;
      if (q.j > kNarrowLevel) {
        a = r.get<u64>();
        b = r.get<u64>();
      } else {
        a = base(q) + r.get<u32>();
        u32 x = r.get<u32>();
        if (x & kOut) {
          Coord o;
          neighbour(rows_, cols_, coord(a), int(x & 7), o);
          b = z(o);
        } else {
          b = base(q) + x;
        }
      }
      e = make_edge(a, b, r.get<u64>());
    }
    return es;
  }

  /// Outward (boundary vertex, storing direction) slots of a cluster in canonical order.
  std::vector<std::pair<Coord, int>> slots(const Extent& e) const {
    std::vector<std::pair<Coord, int>> out;
    for (Coord b : boundary_of(e))
      for (int d : kUndirectedSlots) {
        Coord x;
        if (neighbour(rows_, cols_, b, d, x) && !e.contains(x)) out.push_back({b, d});
      }
    return out;
  }

  void up(const HCluster& q) {
    auto sl = slots(q.ext);
    ByteWriter w;
    std::vector<WeightedEdge> u;
    std::unordered_map<u64, u64> outward;  // z*8+d -> weight
    if (q.j <= kBaseLevel) {
      // aligned cluster: its records are contiguous in the input, in Z order
      std::vector<Coord> cs;
      for (u64 r = 0; r < q.ext.hr; ++r)
        for (u64 c = 0; c < q.ext.hc; ++c) cs.push_back({q.ext.r0 + r, q.ext.c0 + c});
      std::sort(cs.begin(), cs.end(), [&](Coord a, Coord b) { return z(a) < z(b); });
      std::vector<std::byte> buf(g_.rec() * cs.size());
      in_.read(buf);
      for (size_t i = 0; i < cs.size(); ++i) {
        VertexRecord r = decode_record(g_.header.encoding, std::span(buf).subspan(i * g_.rec(), g_.rec()));
        for (int d : kUndirectedSlots) {
          Coord x;
          if (!neighbour(rows_, cols_, cs[i], d, x)) continue;
          u64 wgt = r.has(d) ? r.w[d] : kInfinity;
          if (!q.ext.contains(x)) outward[z(cs[i]) * 8 + d] = wgt;
          else if (wgt != kInfinity) u.push_back(make_edge(z(cs[i]), z(x), wgt));
        }
      }
    } else {
      auto kids = children(q);
      for (const auto& c : kids) up(c);
      for (size_t i = kids.size(); i-- > 0;) {
        auto rec = conn_.pop_record();
        ByteReader r(rec);
        auto tree = get_rel(r, kids[i]);
        u.insert(u.end(), tree.begin(), tree.end());
        for (auto [b, d] : slots(kids[i].ext)) {
          u64 wgt = r.get<u64>();
          Coord x;
          neighbour(rows_, cols_, b, d, x);
          if (q.ext.contains(x)) {
            if (wgt != kInfinity) u.push_back(make_edge(z(b), z(x), wgt));
          } else {
            outward[z(b) * 8 + d] = wgt;
          }
        }
      }
    }
    auto t = prim_forest(u);
    auto ct = prune_and_contract(t, [&](u64 v) { return on_boundary(q.ext, coord(v)); });

    // a single-edge chain is its own representative and needs no expansion
    ByteWriter ex;
    put_rel(ex, q, ct.dead_ends);
    ex.put(u64(std::count_if(ct.chains.begin(), ct.chains.end(), [](const Chain& c) { return c.edges.size() > 1; })));
    for (const auto& c : ct.chains) {
      if (c.edges.size() < 2) continue;
      put_vertex(ex, q, c.u0);
      put_vertex(ex, q, c.um);
      ex.put(u32(c.max_pos));
      put_rel(ex, q, c.edges);
    }
    exps_.push_record(ex.bytes);

    auto reps = ct.edges();
    put_rel(w, q, reps);
    for (auto [b, d] : sl) w.put(outward.at(z(b) * 8 + d));
    conn_.push_record(w.bytes);
  }

  void down(const HCluster& q) {
    auto rec = conn_.pop_record();
    ByteReader r(rec);
    auto edges = get_rel(r, q);
    auto xrec = exps_.pop_record();
    ByteReader xr(xrec);
    ContractedTree ct;
    ct.dead_ends = get_rel(xr, q);
    u64 nc = xr.get<u64>();
    for (u64 i = 0; i < nc; ++i) {
      Chain c;
      c.u0 = get_vertex(xr, q);
      c.um = get_vertex(xr, q);
      c.max_pos = xr.get<u32>();
      c.edges = get_rel(xr, q);
      ct.chains.push_back(std::move(c));
    }
    std::set<EdgeKey> selected;
    std::vector<WeightedEdge> all;
    for (const auto& e : edges) {
      if (q.ext.contains(coord(e.a)) && q.ext.contains(coord(e.b))) selected.insert(key_of(e));
      else all.push_back(e);
    }
    auto inner = expand(ct, selected);
    all.insert(all.end(), inner.begin(), inner.end());
    std::set<EdgeKey> stored;
    for (const auto& c : ct.chains) stored.insert(key_of(c.rep()));
    for (const auto& e : edges)
      if (selected.count(key_of(e)) && !stored.count(key_of(e))) all.push_back(e);

    if (q.j <= kBaseLevel) {
      for (const auto& e : all) {
        out_->put(e.a);
        out_->put(e.b);
        out_->put(e.w);
        res_.weight += e.w;
        ++res_.edges;
      }
      return;
    }
    auto kids = children(q);
    std::vector<std::vector<WeightedEdge>> part(kids.size());
    auto child_of = [&](u64 v) {
      Coord c = coord(v);
      for (size_t i = 0; i < kids.size(); ++i)
        if (kids[i].ext.contains(c)) return i;
      return kids.size();
    };
    for (const auto& e : all) {
      size_t ca = child_of(e.a), cb = child_of(e.b);
      size_t to = ca == cb ? ca : child_of(storer(rows_, cols_, e));
      if (to == kids.size()) throw std::logic_error("expanded edge has no owner below this cluster");
      part[to].push_back(e);
    }
    for (size_t i = 0; i < kids.size(); ++i) {
      ByteWriter w;
      put_rel(w, kids[i], part[i]);
      conn_.push_record(w.bytes);
    }
    for (size_t i = kids.size(); i-- > 0;) down(kids[i]);
  }

  const GridGraph& g_;
  u64 rows_, cols_;
  SeqReader in_;
  FileStack conn_, exps_;
  SeqWriter* out_ = nullptr;
  MstResult res_;
};

}  // namespace

MstResult mst_cache_oblivious(const GridGraph& g, const MstOptions& opt) {
  check_input(g);
  FileId out = g.sim->open_file(opt.prefix + ".out");
  ObliviousMst m(g, opt);
  return m.run(out);
}

bool union_contains_mst_check(const HostGrid& g, int h) {
  if (g.encoding != Encoding::weighted_undirected) throw std::invalid_argument("needs a weighted undirected grid");
  ClusterScheme s(g.rows, g.cols, h);
  std::unordered_map<u64, std::vector<WeightedEdge>> per_cluster;
  std::vector<WeightedEdge> inter;
  for (u64 i = 0; i < g.n(); ++i) {
    Coord c = g.coord(i), o;
    for (int d : kUndirectedSlots) {
      if (!g.v[i].has(d) || !neighbour(g.rows, g.cols, c, d, o)) continue;
      WeightedEdge e = make_edge(g.idx(c), g.idx(o), g.v[i].w[d]);
      ClusterId qa = s.cluster_of(c), qb = s.cluster_of(o);
      if (qa == qb) per_cluster[s.rank(qa)].push_back(e);
      else inter.push_back(e);
    }
  }
  HostGrid u(g.rows, g.cols, g.encoding);
  auto add = [&](const WeightedEdge& e) {
    Coord a = g.coord(e.a), b = g.coord(e.b);
    u.add_edge(a, direction_of(int(b.row) - int(a.row), int(b.col) - int(a.col)), e.w);
  };
  for (auto& [_, es] : per_cluster)
    for (const auto& e : kruskal(es)) add(e);
  for (const auto& e : inter) add(e);
  try {
    return ref_mst(u).weight == ref_mst(g).weight;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace gridio
