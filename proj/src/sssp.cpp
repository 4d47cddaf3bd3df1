#include "gridio/sssp.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace gridio {

DistanceFile::DistanceFile(SimDisk& sim, const ClusterScheme& s, const std::string& name)
    : sim_(&sim), s_(s), file_(sim.open_file(name)) {
  SeqWriter w(sim, file_);
  for (u64 i = 0; i < s.hnum_space(); ++i) w.put(kUnset);
}

std::vector<u64> DistanceFile::read_cluster(u64 rank) {
  std::vector<u64> out(s_.stride());
  sim_->read(file_, rank * s_.stride() * 8, std::as_writable_bytes(std::span(out)));
  return out;
}

u64 DistanceFile::get(u64 hn) {
  u64 e;
  sim_->read(file_, hn * 8, std::as_writable_bytes(std::span(&e, 1)));
  return e;
}

void DistanceFile::set(u64 hn, u64 value, bool final) {
  u64 e = value | (final ? kFinal : 0);
  sim_->write(file_, hn * 8, std::as_bytes(std::span(&e, 1)));
}

Hierarchy build_hierarchy(int h0, u64 rows, u64 cols) {
  if (h0 < 1) throw std::invalid_argument("h0 must be at least 1");
  Hierarchy hy{{h0}};
  u64 side = std::max(rows, cols);
  auto covers = [&](int h) { return h >= 62 || (u64(1) << h) >= side; };
  while (!covers(hy.levels.back())) {
    int last = hy.levels.back();
    int next;
    if (hy.levels.size() == 1) {
      next = last + 3;
    } else {
      int e = last - hy.levels[hy.levels.size() - 2] - 2;
      next = e >= 6 ? 62 : static_cast<int>(std::min<long long>(62, static_cast<long long>(last) << e));
    }
    hy.levels.push_back(next);
  }
  return hy;
}

std::optional<SeparatorDijkstra::Tentative> SeparatorDijkstra::min_tentative(u64 rank) {
  auto e = d_.read_cluster(rank);
  u64 b = s_.boundary_size(s_.at_rank(rank));
  std::optional<Tentative> best;
  for (u64 p = 0; p < b; ++p) {
    if (DistanceFile::final(e[p])) continue;
    u64 v = DistanceFile::value(e[p]);
    if (v == DistanceFile::kUnset) continue;
    if (!best || v < best->value) best = Tentative{v, rank * s_.stride() + p};
  }
  return best;
}

void SeparatorDijkstra::seed_source(Coord src) {
  ClusterId q = s_.cluster_of(src);
  InMemoryCluster c = load_cluster(g_, s_, q);
  auto dist = local_dijkstra(c, {{c.local(src), 0}});
  u64 base = s_.rank(q) * s_.stride();
  for (u64 p = 0; p < s_.boundary_size(q); ++p) {
    u64 x = dist[c.local(s_.boundary_coord(q, p))];
    if (x != kInfinity) d_.set(base + p, x, false);
  }
}

std::vector<u64> SeparatorDijkstra::settle(u64 u, u64 du) {
  d_.set(u, du, true);
  ++finalizations;
  auto row = read_separator_record(*g_.sim, gp_, u);
  std::vector<u64> touched{u / s_.stride()};
  for (u64 k = 0; k < row.size(); ++k) {
    if (row[k] == kInfinity) continue;
    auto t = gp_.slot_target(u, k);
    if (!t) continue;
    u64 cand = du + row[k];
    if (cand < DistanceFile::value(d_.get(*t))) {
      d_.set(*t, cand, false);
      u64 r = *t / s_.stride();
      if (std::find(touched.begin(), touched.end(), r) == touched.end()) touched.push_back(r);
    }
  }
  return touched;
}

namespace {

u64 separator_size(const ClusterScheme& s) {
  u64 k = 0;
  for (u64 q = 0; q < s.num_clusters(); ++q) k += s.boundary_size(s.at_rank(q));
  return k;
}

void check_input(const GridGraph& g, Coord s) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("sssp needs a Z-order grid");
  if (g.header.encoding != Encoding::weighted_directed)
    throw std::invalid_argument("sssp needs a weighted directed grid");
  if (s.row < 1 || s.col < 1 || s.row > g.header.rows || s.col > g.header.cols)
    throw std::out_of_range("source outside the grid");
}

}  // namespace

FileId finalize_distances(const GridGraph& g, DistanceFile& d, Coord src, const std::string& name) {
  const ClusterScheme& s = d.scheme();
  SimDisk& sim = *g.sim;
  FileId out = sim.open_file(name);
  SeqWriter w(sim, out);
  w.write(encode_header(result_header(g.header.rows, g.header.cols, Encoding::distances, g.n(), sim.block_bytes())));
  SeqReader in(sim, g.file, g.header.header_bytes);
  SeqReader dr(sim, d.file());
  std::vector<u64> slice(s.stride());
  for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
    ClusterId q = s.at_rank(qr);
    std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
    in.read(bytes);
    dr.read(std::as_writable_bytes(std::span(slice)));
    InMemoryCluster c = decode_cluster(g, s, q, bytes);
    std::vector<std::pair<u64, u64>> seeds;
    for (u64 p = 0; p < s.boundary_size(q); ++p) {
      u64 v = DistanceFile::value(slice[p]);
      if (v != DistanceFile::kUnset) seeds.push_back({c.local(s.boundary_coord(q, p)), v});
    }
    if (c.ext.contains(src)) seeds.push_back({c.local(src), 0});
    auto dist = local_dijkstra(c, seeds);
    for (u64 t = 0; t < c.size(); ++t) {
      Coord lc = index_to_coord(Order::z_order, c.ext.hr, c.ext.hc, t);
      w.put(dist[(lc.row - 1) * c.ext.hc + (lc.col - 1)]);
    }
  }
  w.close();
  return out;
}

SsspResult sssp_simple(const GridGraph& g, Coord src, const SsspOptions& opt) {
  check_input(g, src);
  SimDisk& sim = *g.sim;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::sssp, g.header.rows, g.header.cols);
  SeparatorGraph gp = build_separator_graph(g, h, SepMode::weighted_distance, {opt.parallel, opt.prefix + ".gprime"});
  const ClusterScheme& s = gp.scheme;
  DistanceFile d(sim, s, opt.prefix + ".D");
  SeparatorDijkstra p2(g, gp, d);
  p2.seed_source(src);

  std::set<std::pair<u64, u64>> pq;  // (key, cluster rank)
  std::unordered_map<u64, u64> key;
  auto refresh = [&](u64 r) {
    auto it = key.find(r);
    if (it != key.end()) {
      pq.erase({it->second, r});
      key.erase(it);
    }
    if (auto m = p2.min_tentative(r)) {
      pq.insert({m->value, r});
      key[r] = m->value;
    }
  };
  refresh(s.rank(s.cluster_of(src)));
  while (!pq.empty()) {
    auto [k, r] = *pq.begin();
    auto m = p2.min_tentative(r);
    if (!m || m->value != k) {
      refresh(r);
      continue;
    }
    for (u64 t : p2.settle(m->hn, m->value)) refresh(t);
  }
  sim.flush();
  SsspResult res{finalize_distances(g, d, src, opt.prefix + ".out"), {}};
  res.stats.h = h;
  res.stats.finalizations = p2.finalizations;
  res.stats.separator_vertices = separator_size(s);
  return res;
}

namespace {

/// Per-level cluster queues keyed by the lowest tentative distance inside each child.
class LevelQueues {
 public:
  explicit LevelQueues(std::vector<int> levels) : lv_(std::move(levels)), key_(lv_.size()), q_(lv_.size()) {}

  static u64 pack(u64 i, u64 j) { return (i << 32) | j; }
  u64 parent(size_t lvl, u64 id) const {
    int dl = lv_[lvl + 1] - lv_[lvl];
    return pack((id >> 32) >> dl, (id & 0xffffffffu) >> dl);
  }

  void set_key(size_t lvl, u64 id, std::optional<u64> k) {
    auto it = key_[lvl].find(id);
    std::optional<u64> old;
    if (it != key_[lvl].end()) old = it->second;
    if (old == k) return;
    if (k) key_[lvl][id] = *k;
    else key_[lvl].erase(id);
    if (lvl + 1 >= lv_.size()) return;
    u64 p = parent(lvl, id);
    auto& q = q_[lvl + 1][p];
    if (old) q.erase({*old, id});
    if (k) q.insert({*k, id});
    std::optional<u64> pk;
    if (!q.empty()) pk = q.begin()->first;
    set_key(lvl + 1, p, pk);
  }

  const std::set<std::pair<u64, u64>>& queue(size_t lvl, u64 id) { return q_[lvl][id]; }
  bool has_key(size_t lvl, u64 id) const { return key_[lvl].count(id) != 0; }

 private:
  std::vector<int> lv_;
  std::vector<std::unordered_map<u64, u64>> key_;
  std::vector<std::unordered_map<u64, std::set<std::pair<u64, u64>>>> q_;
};

}  // namespace

SsspResult sssp_hierarchical(const GridGraph& g, Coord src, const SsspOptions& opt) {
  check_input(g, src);
  SimDisk& sim = *g.sim;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::sssp, g.header.rows, g.header.cols);
  SeparatorGraph gp = build_separator_graph(g, h, SepMode::weighted_distance, {opt.parallel, opt.prefix + ".gprime"});
  const ClusterScheme& s = gp.scheme;
  DistanceFile d(sim, s, opt.prefix + ".D");
  SeparatorDijkstra p2(g, gp, d);
  Hierarchy hy = build_hierarchy(h, g.header.rows, g.header.cols);
  LevelQueues lq(hy.levels);
  u64 h0_calls = 0;

  auto id_of = [&](u64 rank) {
    ClusterId c = s.at_rank(rank);
    return LevelQueues::pack(c.i, c.j);
  };
  auto refresh = [&](u64 rank) {
    auto m = p2.min_tentative(rank);
    lq.set_key(0, id_of(rank), m ? std::optional<u64>(m->value) : std::nullopt);
  };

  p2.seed_source(src);
  refresh(s.rank(s.cluster_of(src)));

  // A relaxation may lower an estimate already marked final; that vertex becomes
  // tentative again and is settled once more, so premature work is corrected.
  auto process = [&](auto&& self, size_t lvl, u64 id) -> void {
    if (lvl == 0) {
      ++h0_calls;
      u64 rank = s.rank(ClusterId{h, id >> 32, id & 0xffffffffu});
      auto m = p2.min_tentative(rank);
      if (!m) {
        refresh(rank);
        return;
      }
      for (u64 t : p2.settle(m->hn, m->value)) refresh(t);
      return;
    }
    int e = std::min(62, hy.levels[lvl] - hy.levels[lvl - 1] - 1);
    u64 budget = u64(1) << e;
    for (u64 j = 0; j < budget; ++j) {
      const auto& q = lq.queue(lvl, id);
      if (q.empty()) break;
      self(self, lvl - 1, q.begin()->second);
    }
  };

  size_t top = hy.levels.size() - 1;
  if (top == 0) {
    u64 id = LevelQueues::pack(0, 0);
    while (lq.has_key(0, id)) process(process, 0, id);
  } else {
    u64 root = LevelQueues::pack(0, 0);
    while (!lq.queue(top, root).empty()) process(process, top - 1, lq.queue(top, root).begin()->second);
  }
  sim.flush();
  SsspResult res{finalize_distances(g, d, src, opt.prefix + ".out"), {}};
  res.stats.h = h;
  res.stats.finalizations = p2.finalizations;
  res.stats.h0_calls = h0_calls;
  res.stats.separator_vertices = separator_size(s);
  res.stats.hierarchy = hy;
  return res;
}

}  // namespace gridio
