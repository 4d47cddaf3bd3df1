#include "gridio/euler.hpp"

#include <algorithm>
#include <cstring>

namespace gridio {

std::vector<std::pair<u64, int>> entry_points(const ClusterScheme& s, ClusterId q) {
  std::vector<std::pair<u64, int>> out;
  Extent e = s.extent(q);
  for (u64 p = 0; p < s.boundary_size(q); ++p) {
    Coord v = s.boundary_coord(q, p);
    for (int d = 0; d < 8; ++d) {
      Coord x;
      if (neighbour(s.rows(), s.cols(), v, d, x) && !e.contains(x)) out.push_back({p, d});
    }
  }
  return out;
}

u64 entry_capacity(int h) { return 12 * (u64(1) << h); }

namespace {

[[noreturn]] void not_a_tree() { throw std::invalid_argument("input is not a tree"); }

struct WalkEnd {
  std::vector<u8> steps;
  bool terminal = false;
  u64 pos = 0;  // exit boundary position
  int dir = 0;  // exit direction
};

/// Rotation walk inside one cluster: leave v through the next tree edge
/// clockwise after the one we arrived by.
class Walker {
 public:
  Walker(const InMemoryCluster& c, const ClusterScheme& s, Coord root) : c_(c), s_(s) {
    if (c.ext.contains(root)) {
      root_ = c.local(root);
      if (c.rec[*root_].mask) first_ = next_dir(*root_, NW);
    }
  }

  WalkEnd walk(u64 v, int from, bool at_start, std::vector<u8> steps = {}) const {
    WalkEnd w;
    w.steps = std::move(steps);
    u64 cap = 2 * 8 * c_.size() + 2;
    for (;;) {
      int d = next_dir(v, from);
      if (root_ == v && d == first_ && !at_start) {
        w.terminal = true;
        return w;
      }
      at_start = false;
      auto nb = c_.inside(v, d);
      if (!nb) {
        w.pos = *s_.boundary_pos(c_.id, c_.coord(v));
        w.dir = d;
        return w;
      }
      w.steps.push_back(u8(d));
      if (w.steps.size() > cap) not_a_tree();
      v = *nb;
      from = opposite(d);
    }
  }

  /// Segment that starts by crossing into boundary position p from direction d.
  WalkEnd enter(u64 p, int d) const {
    u64 v = c_.local(s_.boundary_coord(c_.id, p));
    return walk(v, d, false, {u8(opposite(d))});
  }

  std::optional<u64> root_local() const { return root_; }

 private:
  int next_dir(u64 v, int from) const {
    const VertexRecord& r = c_.rec[v];
    if (r.mask == 0) not_a_tree();
    int d = from;
    do d = (d + 1) & 7;
    while (!r.has(d));
    return d;
  }

  const InMemoryCluster& c_;
  const ClusterScheme& s_;
  std::optional<u64> root_;
  int first_ = 0;
};

void check_input(const GridGraph& g, Coord root) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("euler needs a Z-order grid");
  if (g.header.encoding == Encoding::weighted_undirected) throw std::invalid_argument("euler needs a directed grid");
  if (root.row < 1 || root.col < 1 || root.row > g.header.rows || root.col > g.header.cols)
    throw std::out_of_range("root outside the grid");
}

std::vector<std::byte> read_cluster_bytes(SeqReader& in, const GridGraph& g, const ClusterScheme& s, ClusterId q) {
  std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
  in.read(bytes);
  return bytes;
}

}  // namespace

EntryExitMap build_entry_exit(const GridGraph& g, int h, Coord root, const std::string& name) {
  check_input(g, root);
  SimDisk& sim = *g.sim;
  EntryExitMap m;
  m.scheme = ClusterScheme(g.header.rows, g.header.cols, h);
  const ClusterScheme& s = m.scheme;
  m.file = sim.open_file(name);
  u64 cap = entry_capacity(h);
  u64 half_edges = 0;
  SeqReader in(sim, g.file, g.header.header_bytes);
  SeqWriter w(sim, m.file);
  for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
    ClusterId q = s.at_rank(qr);
    InMemoryCluster c = decode_cluster(g, s, q, read_cluster_bytes(in, g, s, q));
    for (u64 l = 0; l < c.size(); ++l)
      for (int d = 0; d < 8; ++d) {
        if (!c.rec[l].has(d)) continue;
        ++half_edges;
        if (auto o = c.inside(l, d); o && !c.rec[*o].has(opposite(d))) not_a_tree();
      }
    Walker wk(c, s, root);
    auto entries = entry_points(s, q);
    for (u64 k = 0; k < cap; ++k) {
      u32 slot = kNoEntry;
      if (k < entries.size()) {
        auto [p, d] = entries[k];
        Coord v = s.boundary_coord(q, p), x;
        neighbour(s.rows(), s.cols(), v, d, x);
        bool out = c.rec[c.local(v)].has(d);
        bool in_edge = read_vertex(g, z_index(s.rows(), s.cols(), x)).has(opposite(d));
        if (out != in_edge) not_a_tree();
        if (in_edge) {
          auto e = wk.enter(p, d);
          slot = e.terminal ? kTerminal : u32(e.pos * 8 + u64(e.dir));
          ++m.entries;
        }
      }
      w.put(slot);
    }
  }
  w.close();
  if (half_edges != 2 * (g.n() - 1)) not_a_tree();
  return m;
}

EulerResult euler_tour(const GridGraph& g, const EulerOptions& opt) {
  Coord root = opt.root.value_or(Coord{1, 1});
  check_input(g, root);
  SimDisk& sim = *g.sim;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::euler, g.header.rows, g.header.cols);
  EntryExitMap m = build_entry_exit(g, h, root, opt.prefix + ".map");
  const ClusterScheme& s = m.scheme;
  u64 rows = s.rows(), cols = s.cols(), cap = entry_capacity(h);
  ClusterId rq = s.cluster_of(root);

  auto slot_of = [&](ClusterId q, u64 pos, int d) {
    // the exit (pos, d) of q enters the neighbouring cluster
    Coord x;
    neighbour(rows, cols, s.boundary_coord(q, pos), d, x);
    ClusterId q2 = s.cluster_of(x);
    std::pair<u64, int> key{*s.boundary_pos(q2, x), opposite(d)};
    auto es = entry_points(s, q2);
    auto it = std::find(es.begin(), es.end(), key);
    if (it == es.end()) throw std::logic_error("exit without a matching entry");
    return std::pair{q2, s.rank(q2) * cap + u64(it - es.begin())};
  };

  // chain the segments from the root: numbering r, then permute by slot
  EulerResult res;
  res.root = root;
  res.stats.h = h;
  FileId pairs = sim.open_file(opt.prefix + ".Rp");
  u64 numbered = 0;
  {
    InMemoryCluster c = load_cluster(g, s, rq);
    Walker wk(c, s, root);
    WalkEnd e = g.n() == 1 ? WalkEnd{{}, true} : wk.walk(c.local(root), NW, true);
    SeqWriter pw(sim, pairs);
    ClusterId q = rq;
    while (!e.terminal) {
      auto [q2, slot] = slot_of(q, e.pos, e.dir);
      pw.put(++numbered);
      pw.put(slot);
      if (numbered > m.entries) not_a_tree();
      u32 x;
      sim.read(m.file, slot * 4, std::as_writable_bytes(std::span(&x, 1)));
      if (x == kNoEntry) throw std::logic_error("entry slot not filled");
      q = q2;
      e = {};
      if (x == kTerminal) e.terminal = true;
      else e.pos = x / 8, e.dir = int(x % 8);
    }
  }
  res.stats.segments = numbered + 1;
  FileId by_slot = sort_addresses(sim, pairs, numbered, SortMethod::merge, opt.prefix + ".Rs");

  // chunks: u32 step count then the direction bytes; A: (offset, r)
  FileId cf = sim.open_file(opt.prefix + ".C"), af = sim.open_file(opt.prefix + ".A");
  {
    SeqReader in(sim, g.file, g.header.header_bytes);
    SeqReader rr(sim, by_slot);
    SeqWriter cw(sim, cf), aw(sim, af);
    u64 left = numbered;
    u64 r = 0, slot = 0;
    auto next = [&] {
      if (left == 0) return false;
      --left;
      r = rr.get<u64>();
      slot = rr.get<u64>();
      return true;
    };
    bool have = next();
    auto put_chunk = [&](u64 rank_no, const std::vector<u8>& steps) {
      aw.put(cw.offset());
      aw.put(rank_no);
      cw.put(u32(steps.size()));
      cw.write(std::as_bytes(std::span(steps)));
      res.stats.steps += steps.size();
    };
    for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
      ClusterId q = s.at_rank(qr);
      InMemoryCluster c = decode_cluster(g, s, q, read_cluster_bytes(in, g, s, q));
      Walker wk(c, s, root);
      auto entries = entry_points(s, q);
      if (q == rq) put_chunk(0, g.n() == 1 ? std::vector<u8>{} : wk.walk(c.local(root), NW, true).steps);
      while (have && slot / cap == qr) {
        auto [p, d] = entries.at(slot % cap);
        put_chunk(r, wk.enter(p, d).steps);
        have = next();
      }
    }
  }
  if (res.stats.steps != 2 * (g.n() - 1)) not_a_tree();

  FileId sorted = sort_addresses(sim, af, numbered + 1, SortMethod::merge, opt.prefix + ".As");
  res.output = sim.open_file(opt.prefix + ".out");
  SeqWriter ow(sim, res.output);
  Encoding enc = opt.full_ids ? Encoding::euler_ids : Encoding::euler_steps;
  ow.write(encode_header(result_header(rows, cols, enc, res.stats.steps + 1, sim.block_bytes())));
  Coord cur = root;
  ow.put(z_index(rows, cols, cur));
  SeqReader ar(sim, sorted);
  for (u64 i = 0; i <= numbered; ++i) {
    u64 off = ar.get<u64>();
    ar.get<u64>();
    u32 cnt;
    sim.read(cf, off, std::as_writable_bytes(std::span(&cnt, 1)));
    std::vector<u8> steps(cnt);
    sim.read(cf, off + 4, std::as_writable_bytes(std::span(steps)));
    if (!opt.full_ids) {
      ow.write(std::as_bytes(std::span(steps)));
      continue;
    }
    for (u8 d : steps) {
      Coord nx;
      if (!neighbour(rows, cols, cur, d, nx)) throw std::logic_error("tour step leaves the grid");
      cur = nx;
      ow.put(z_index(rows, cols, cur));
    }
  }
  ow.close();
  return res;
}

std::vector<u64> read_euler(const SimDisk& sim, FileId f) {
  GridHeader h = result_info(sim, f);
  if (h.encoding == Encoding::euler_ids) return result_u64(sim, f);
  if (h.encoding != Encoding::euler_steps) throw IoError("not an Euler tour file");
  const auto& raw = sim.raw(f);
  if (h.count == 0 || raw.size() < h.header_bytes + 8 + (h.count - 1)) throw IoError("tour payload truncated");
  u64 z;
  std::memcpy(&z, raw.data() + h.header_bytes, 8);
  std::vector<u64> out{z};
  Coord cur = index_to_coord(Order::z_order, h.rows, h.cols, z);
  for (u64 k = 1; k < h.count; ++k) {
    int d = std::to_integer<int>(raw[h.header_bytes + 8 + k - 1]);
    Coord nx;
    if (d > 7 || !neighbour(h.rows, h.cols, cur, d, nx)) throw IoError("bad tour step");
    cur = nx;
    out.push_back(z_index(h.rows, h.cols, cur));
  }
  return out;
}

}  // namespace gridio
