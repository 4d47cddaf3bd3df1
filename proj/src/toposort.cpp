#include "gridio/toposort.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>

namespace gridio {

TopoNumbering topo_number_separator(SimDisk& sim, const SeparatorGraph& gp, const std::string& prefix) {
  const ClusterScheme& s = gp.scheme;
  std::vector<u16> deg(s.hnum_space());
  {
    SeqReader dr(sim, gp.degree_file);
    for (auto& d : deg) d = dr.get<u16>();
  }
  std::deque<u64> z;
  {
    SeqReader zr(sim, gp.zero_queue);
    for (u64 i = 0; i < gp.zero_count; ++i) z.push_back(zr.get<u64>());
  }
  TopoNumbering tn;
  tn.t = sim.open_file(prefix + ".Tp");
  FileId pairs = sim.open_file(prefix + ".Rp");
  {
    SeqWriter tw(sim, tn.t), pw(sim, pairs);
    while (!z.empty()) {
      u64 u = z.front();
      z.pop_front();
      tw.put(u);
      pw.put(tn.count);  // value: r(u)
      pw.put(u);         // sort key
      ++tn.count;
      auto row = read_separator_record(sim, gp, u);
      for (u64 k = 0; k < row.size(); ++k) {
        if (row[k] == kInfinity) continue;
        auto t = gp.slot_target(u, k);
        if (!t) continue;
        if (deg[*t] == 0) throw std::logic_error("in-degree underflow in G'");
        if (--deg[*t] == 0) z.push_back(*t);
      }
    }
  }
  u64 valid = 0;
  for (u64 hn = 0; hn < s.hnum_space(); ++hn) valid += s.hnum_valid(hn);
  if (tn.count != valid) throw std::invalid_argument("separator graph cyclic");

  FileId sorted = sort_addresses(sim, pairs, tn.count, SortMethod::merge, prefix + ".Rs");
  tn.r = sim.open_file(prefix + ".R");
  SeqReader sr(sim, sorted);
  SeqWriter rw(sim, tn.r);
  u64 next = 0;
  for (u64 i = 0; i < tn.count; ++i) {
    u64 r = sr.get<u64>(), hn = sr.get<u64>();
    for (; next < hn; ++next) rw.put(kInfinity);
    rw.put(r);
    ++next;
  }
  for (; next < s.hnum_space(); ++next) rw.put(kInfinity);
  rw.close();
  return tn;
}

namespace {

constexpr u64 kNone = kInfinity;

std::vector<std::vector<u64>> in_lists(const InMemoryCluster& c) {
  std::vector<std::vector<u64>> in(c.size());
  for (u64 l = 0; l < c.size(); ++l)
    for (int d = 0; d < 8; ++d)
      if (c.rec[l].has(d))
        if (auto o = c.inside(l, d)) in[*o].push_back(l);
  return in;
}

}  // namespace

ChunkAssignment assign_chunk_numbers(const InMemoryCluster& c, const ClusterScheme& s,
                                     std::span<const u64> r_boundary) {
  u64 n = c.size();
  ChunkAssignment a;
  a.chunk.assign(n, kNone);
  for (u64 p = 0; p < r_boundary.size(); ++p) a.chunk[c.local(s.boundary_coord(c.id, p))] = r_boundary[p];
  auto order = local_topo(c);
  auto in = in_lists(c);
  auto remaining = [&] { return std::count(a.chunk.begin(), a.chunk.end(), kNone); };

  while (remaining() > 0) {
    ++a.rounds;
    u64 numbered = 0;
    // highest chunk number among numbered predecessors, visible along the topological sweep
    std::vector<u64> pm(n, kNone);
    for (u64 v : order) {
      for (u64 u : in[v]) {
        u64 x = a.chunk[u] != kNone ? a.chunk[u] : pm[u];
        if (x != kNone && (pm[v] == kNone || x > pm[v])) pm[v] = x;
      }
      if (a.chunk[v] == kNone && pm[v] != kNone) {
        a.chunk[v] = pm[v];
        ++numbered;
      }
    }
    // lowest chunk number among numbered successors
    std::vector<u64> sm(n, kNone);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      u64 v = *it;
      for (int d = 0; d < 8; ++d) {
        if (!c.rec[v].has(d)) continue;
        auto w = c.inside(v, d);
        if (!w) continue;
        u64 x = a.chunk[*w] != kNone ? a.chunk[*w] : sm[*w];
        if (x != kNone && x < sm[v]) sm[v] = x;
      }
      if (a.chunk[v] == kNone && sm[v] != kNone) {
        a.chunk[v] = sm[v];
        ++numbered;
      }
    }
    if (numbered > 0) continue;

    // left-overs: weak components joined through left neighbours take the chunk of
    // the vertex left of their leftmost (then topmost) member
    std::vector<u64> comp(n, kNone);
    for (u64 st = 0; st < n; ++st) {
      if (a.chunk[st] != kNone || comp[st] != kNone) continue;
      std::vector<u64> members{st};
      comp[st] = st;
      for (size_t i = 0; i < members.size(); ++i) {
        u64 v = members[i];
        std::vector<u64> adj(in[v]);
        for (int d = 0; d < 8; ++d)
          if (c.rec[v].has(d))
            if (auto w = c.inside(v, d)) adj.push_back(*w);
        if (auto w = c.inside(v, W)) adj.push_back(*w);
        if (auto w = c.inside(v, E)) adj.push_back(*w);
        for (u64 w : adj)
          if (a.chunk[w] == kNone && comp[w] == kNone) {
            comp[w] = st;
            members.push_back(w);
          }
      }
      u64 best = *std::min_element(members.begin(), members.end(), [&](u64 x, u64 y) {
        Coord cx = c.coord(x), cy = c.coord(y);
        return std::tie(cx.col, cx.row) < std::tie(cy.col, cy.row);
      });
      auto left = c.inside(best, W);
      if (!left || a.chunk[*left] == kNone) throw std::logic_error("left-over component without a numbered left neighbour");
      u64 ch = a.chunk[*left];
      for (u64 v : members) a.chunk[v] = ch;
      ++a.leftover_components;
    }
  }

  // per chunk: Kahn on the induced subgraph, ties by local Z-rank
  auto zr = local_zrank(c);
  std::map<u64, std::vector<u64>> groups;
  for (u64 v = 0; v < n; ++v) groups[a.chunk[v]].push_back(v);
  for (auto& [ch, vs] : groups) {
    std::vector<u64> indeg(n, 0);
    for (u64 v : vs)
      for (u64 u : in[v])
        if (a.chunk[u] == ch) ++indeg[v];
    using Item = std::pair<u64, u64>;  // zrank, local
    std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
    for (u64 v : vs)
      if (indeg[v] == 0) ready.push({zr[v], v});
    std::vector<u64> out;
    while (!ready.empty()) {
      u64 v = ready.top().second;
      ready.pop();
      out.push_back(v);
      for (int d = 0; d < 8; ++d) {
        if (!c.rec[v].has(d)) continue;
        auto w = c.inside(v, d);
        if (w && a.chunk[*w] == ch && --indeg[*w] == 0) ready.push({zr[*w], *w});
      }
    }
    if (out.size() != vs.size()) throw std::invalid_argument("cycle inside a cluster");
    a.chunks.push_back({ch, std::move(out)});
  }
  return a;
}

namespace {

void check_input(const GridGraph& g) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("toposort needs a Z-order grid");
  if (g.header.encoding == Encoding::weighted_undirected) throw std::invalid_argument("toposort needs a directed grid");
}

}  // namespace

TopoResult toposort(const GridGraph& g, const TopoOptions& opt) {
  check_input(g);
  SimDisk& sim = *g.sim;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::toposort, g.header.rows, g.header.cols);
  SeparatorGraph gp = build_separator_graph(g, h, SepMode::reachability, {opt.parallel, opt.prefix + ".gprime"});
  const ClusterScheme& s = gp.scheme;
  TopoNumbering tn = topo_number_separator(sim, gp, opt.prefix);

  TopoResult res;
  res.stats.h = h;
  res.stats.separator_vertices = tn.count;

  // chunk file C: root h-number u64, count u32, local Z-ranks u32; A: (offset, r)
  FileId cf = sim.open_file(opt.prefix + ".C"), af = sim.open_file(opt.prefix + ".A");
  {
    SeqReader in(sim, g.file, g.header.header_bytes);
    SeqReader rr(sim, tn.r);
    SeqWriter cw(sim, cf), aw(sim, af);
    std::vector<u64> rslice(s.stride());
    for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
      ClusterId q = s.at_rank(qr);
      std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
      in.read(bytes);
      rr.read(std::as_writable_bytes(std::span(rslice)));
      InMemoryCluster c = decode_cluster(g, s, q, bytes);
      u64 b = s.boundary_size(q);
      std::map<u64, u64> root_of;  // r -> h-number
      for (u64 p = 0; p < b; ++p) root_of[rslice[p]] = qr * s.stride() + p;
      auto a = assign_chunk_numbers(c, s, std::span(rslice).first(b));
      res.stats.rounds += a.rounds;
      res.stats.leftover_components += a.leftover_components;
      auto zr = local_zrank(c);
      for (const auto& [ch, vs] : a.chunks) {
        aw.put(cw.offset());
        aw.put(ch);
        cw.put(root_of.at(ch));
        cw.put(u32(vs.size()));
        for (u64 v : vs) cw.put(u32(zr[v]));
        ++res.stats.chunks;
      }
    }
  }

  FileId sorted = sort_addresses(sim, af, res.stats.chunks, SortMethod::merge, opt.prefix + ".As");
  res.output = sim.open_file(opt.prefix + ".out");
  SeqWriter ow(sim, res.output);
  ow.write(encode_header(result_header(s.rows(), s.cols(), Encoding::vertex_ids, g.n(), sim.block_bytes())));
  SeqReader ar(sim, sorted);
  u64 emitted = 0;
  for (u64 i = 0; i < res.stats.chunks; ++i) {
    u64 off = ar.get<u64>();
    ar.get<u64>();
    std::byte head[12];
    sim.read(cf, off, head);
    ByteReader hr(head);
    u64 root = hr.get<u64>();
    u32 cnt = hr.get<u32>();
    std::vector<u32> ids(cnt);
    sim.read(cf, off + 12, std::as_writable_bytes(std::span(ids)));
    u64 first = s.first_index(s.hnum_cluster(root));
    for (u32 id : ids) ow.put(first + id);
    emitted += cnt;
  }
  ow.close();
  if (emitted != g.n()) throw std::logic_error("toposort emitted a wrong number of vertices");
  return res;
}

}  // namespace gridio
