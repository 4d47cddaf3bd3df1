#include "gridio/bfs.hpp"

#include <algorithm>
#include <bit>
#include <queue>

namespace gridio {

BucketQueue::BucketQueue(int h, bool update_in_memory)
    : side_(u64(1) << h), band_(u64(1) << (2 * h)), update_(update_in_memory), near_(side_ + 1), far_(side_ + 1) {
  if (h < 1 || h > 24) throw std::invalid_argument("bucket queue level out of range");
}

void BucketQueue::insert(u64 key, u64 item) {
  if (key < d_ || key > d_ + band_ - 1) throw std::out_of_range("bucket queue key outside the admissible band");
  ++stats_.inserts;
  stats_.max_band = std::max(stats_.max_band, key - d_);
  if (key <= dprime_) {
    if (update_) {
      auto it = near_key_.find(item);
      if (it != near_key_.end()) {
        auto& list = near(it->second);
        auto pos = std::find(list.begin(), list.end(), item);
        if (pos != list.end()) {
          list.erase(pos);
          --size_;
          ++stats_.in_memory_updates;
        }
      }
      near_key_[item] = key;
    }
    near(key).push_back(item);
  } else {
    u64 i = (key - dprime_ - 1) / side_;
    far_.at(i).push_back({key, item});
  }
  ++size_;
}

void BucketQueue::advance() {
  u64 i = 0;
  while (far_[i].empty()) ++i;
  u64 base = dprime_;
  d_ = base + i * side_ + 1;
  dprime_ = base + (i + 1) * side_;
  auto moved = std::move(far_[i]);
  for (u64 k = 0; k <= i; ++k) {
    far_.pop_front();
    far_.emplace_back();
  }
  for (auto [key, item] : moved) {
    near(key).push_back(item);
    if (update_) near_key_[item] = key;
    ++stats_.redistributed;
  }
}

std::pair<u64, u64> BucketQueue::extract_min() {
  if (size_ == 0) throw std::logic_error("extract from an empty bucket queue");
  for (;;) {
    for (u64 key = d_; key <= dprime_; ++key) {
      auto& list = near(key);
      if (list.empty()) continue;
      u64 item = list.back();
      list.pop_back();
      --size_;
      d_ = key;
      ++stats_.extractions;
      if (update_) {
        auto it = near_key_.find(item);
        if (it != near_key_.end() && it->second == key) near_key_.erase(it);
      }
      return {key, item};
    }
    advance();
  }
}

namespace {

void check_input(const GridGraph& g, Coord s) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("bfs needs a Z-order grid");
  if (g.header.encoding != Encoding::unweighted_directed)
    throw std::invalid_argument("bfs needs an unweighted directed grid");
  if (s.row < 1 || s.col < 1 || s.row > g.header.rows || s.col > g.header.cols)
    throw std::out_of_range("source outside the grid");
}

constexpr u64 kChunkHeader = 20;
constexpr u64 kEntry = 16;

}  // namespace

BfsDistances bfs_distances(const GridGraph& g, Coord src, const BfsOptions& opt) {
  check_input(g, src);
  SimDisk& sim = *g.sim;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::bfs, g.header.rows, g.header.cols);
  SeparatorGraph gp = build_separator_graph(g, h, SepMode::unit_distance, {opt.parallel, opt.prefix + ".gprime"});
  BfsDistances out{gp, DistanceFile(sim, gp.scheme, opt.prefix + ".D"), {}};
  SeparatorDijkstra p2(g, out.gp, out.d);
  const ClusterScheme& s = out.gp.scheme;
  BucketQueue q(h, opt.update_in_memory);
  std::unordered_map<u64, u64> live;  // rank -> key of its newest queued copy
  auto refresh = [&](u64 r) {
    auto m = p2.min_tentative(r);
    if (!m) return;
    auto it = live.find(r);
    if (it != live.end() && it->second == m->value) return;
    q.insert(m->value, r);
    live[r] = m->value;
  };
  p2.seed_source(src);
  refresh(s.rank(s.cluster_of(src)));
  while (!q.empty()) {
    auto [k, r] = q.extract_min();
    auto it = live.find(r);
    if (it != live.end() && it->second == k) live.erase(it);
    auto m = p2.min_tentative(r);
    if (!m || m->value != k) continue;  // stale copy
    for (u64 t : p2.settle(m->hn, k)) refresh(t);
  }
  sim.flush();
  out.queue = q.stats();
  return out;
}

ChunkStore build_chunks_bfs(const GridGraph& g, Coord src, DistanceFile& d, const BfsOptions& opt) {
  check_input(g, src);
  SimDisk& sim = *g.sim;
  const ClusterScheme& s = d.scheme();
  const u64 side = s.side();
  ChunkStore cs;
  cs.c = sim.open_file(opt.prefix + ".C");
  cs.a = sim.open_file(opt.prefix + ".A");
  SeqWriter cw(sim, cs.c), aw(sim, cs.a);
  SeqReader in(sim, g.file, g.header.header_bytes);
  SeqReader dr(sim, d.file());
  std::vector<u64> slice(s.stride());
  std::vector<u8> masks;
  for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
    ClusterId q = s.at_rank(qr);
    std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
    in.read(bytes);
    dr.read(std::as_writable_bytes(std::span(slice)));
    InMemoryCluster c = decode_cluster(g, s, q, bytes);
    std::vector<u64> roots;
    std::vector<std::pair<u64, u64>> seeds;
    std::vector<bool> is_root(c.size(), false);
    for (u64 p = 0; p < s.boundary_size(q); ++p) {
      u64 v = DistanceFile::value(slice[p]);
      if (v == DistanceFile::kUnset) continue;
      u64 l = c.local(s.boundary_coord(q, p));
      seeds.push_back({l, v});
      roots.push_back(l);
      is_root[l] = true;
    }
    if (c.ext.contains(src) && !is_root[c.local(src)]) {
      seeds.push_back({c.local(src), 0});
      roots.push_back(c.local(src));
      is_root[c.local(src)] = true;
    }
    auto dist = local_dijkstra(c, seeds);
    // local forest: parent is the first neighbour clockwise from north one step closer
    std::vector<u8> child(c.size(), 0);
    for (u64 v = 0; v < c.size(); ++v) {
      if (is_root[v] || dist[v] == kInfinity) continue;
      for (int dir = 0; dir < 8; ++dir) {
        auto u = c.inside(v, dir);
        if (!u || dist[*u] == kInfinity || dist[*u] + 1 != dist[v] || !c.rec[*u].has(opposite(dir))) continue;
        child[*u] |= u8(1u << opposite(dir));
        break;
      }
    }
    std::deque<std::pair<u64, u64>> pending;  // (chunk root, depth in its tree)
    for (u64 r : roots) pending.push_back({r, 0});
    while (!pending.empty()) {
      auto [root, _] = pending.front();
      pending.pop_front();
      masks.clear();
      std::vector<std::pair<u64, u64>> st{{root, 0}};
      while (!st.empty()) {
        auto [v, depth] = st.back();
        st.pop_back();
        u8 m = 0;
        for (int dir = 7; dir >= 0; --dir) {
          if (!((child[v] >> dir) & 1)) continue;
          u64 w = *c.inside(v, dir);
          if (depth + 1 < side) {
            m |= u8(1u << dir);
            st.push_back({w, depth + 1});
          } else {
            pending.push_back({w, 0});
          }
        }
        masks.push_back(m);
      }
      u64 off = cw.offset();
      cw.put(z_index(s.rows(), s.cols(), c.coord(root)));
      cw.put(dist[root]);
      cw.put(static_cast<u32>(masks.size()));
      cw.write(std::as_bytes(std::span(masks)));
      aw.put(off);
      aw.put(dist[root]);
      ++cs.chunks;
      cs.vertices += masks.size();
    }
  }
  cw.close();
  aw.close();
  return cs;
}

std::vector<ChunkVertex> decode_chunk(std::span<const std::byte> rec, u64 rows, u64 cols) {
  ByteReader r(rec);
  u64 root = r.get<u64>();
  u64 d0 = r.get<u64>();
  u32 count = r.get<u32>();
  std::vector<ChunkVertex> out;
  out.reserve(count);
  std::vector<std::pair<Coord, u64>> st{{index_to_coord(Order::z_order, rows, cols, root), d0}};
  while (!st.empty()) {
    auto [v, dv] = st.back();
    st.pop_back();
    if (out.size() == count) throw IoError("chunk masks overrun the vertex count");
    u8 m = r.get<u8>();
    out.push_back({z_index(rows, cols, v), dv});
    for (int dir = 7; dir >= 0; --dir) {
      if (!((m >> dir) & 1)) continue;
      Coord w;
      if (!neighbour(rows, cols, v, dir, w)) throw IoError("chunk child outside the grid");
      st.push_back({w, dv + 1});
    }
  }
  if (out.size() != count) throw IoError("chunk vertex count mismatch");
  return out;
}

namespace {

struct AEntry {
  u64 off, key;
};

std::vector<AEntry> read_entries(SeqReader& r, u64 k) {
  std::vector<AEntry> v(k);
  r.read(std::as_writable_bytes(std::span(v)));
  return v;
}

}  // namespace

FileId sort_addresses(SimDisk& sim, FileId a, u64 count, SortMethod method, const std::string& name,
                      SortReport* report) {
  static_assert(sizeof(AEntry) == kEntry);
  SortReport rep;
  u64 mem = sim.config().memory_bytes;
  if (method == SortMethod::automatic) method = count * kEntry <= mem / 2 ? SortMethod::in_memory : SortMethod::merge;
  rep.method = method;
  auto by_key = [](const AEntry& x, const AEntry& y) { return x.key < y.key; };
  FileId result;
  if (method == SortMethod::in_memory) {
    SeqReader r(sim, a);
    auto v = read_entries(r, count);
    std::stable_sort(v.begin(), v.end(), by_key);
    result = sim.open_file(name);
    SeqWriter w(sim, result);
    w.write(std::as_bytes(std::span(v)));
    rep.passes = 1;
  } else if (method == SortMethod::merge) {
    u64 run = std::max<u64>(1, mem / 2 / kEntry);
    u64 fan = std::max<u64>(2, sim.config().cache_blocks() - 2);
    FileId cur = sim.open_file(name + ".runs");
    {
      SeqReader r(sim, a);
      SeqWriter w(sim, cur);
      for (u64 done = 0; done < count; done += run) {
        auto v = read_entries(r, std::min(run, count - done));
        std::stable_sort(v.begin(), v.end(), by_key);
        w.write(std::as_bytes(std::span(v)));
      }
    }
    rep.passes = 1;
    int pass = 0;
    while (run < count) {
      FileId next = sim.open_file(name + ".m" + std::to_string(pass++));
      SeqWriter w(sim, next);
      for (u64 g0 = 0; g0 < count; g0 += run * fan) {
        std::vector<SeqReader> rs;
        std::vector<u64> left;
        for (u64 k = 0; k < fan && g0 + k * run < count; ++k) {
          rs.emplace_back(sim, cur, (g0 + k * run) * kEntry);
          left.push_back(std::min(run, count - (g0 + k * run)));
        }
        using Head = std::tuple<u64, u64, u64>;  // key, run, offset
        std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
        auto pull = [&](u64 k) {
          if (!left[k]) return;
          --left[k];
          AEntry e = rs[k].get<AEntry>();
          heap.push({e.key, k, e.off});
        };
        for (u64 k = 0; k < rs.size(); ++k) pull(k);
        while (!heap.empty()) {
          auto [key, k, off] = heap.top();
          heap.pop();
          w.put(AEntry{off, key});
          pull(k);
        }
      }
      w.close();
      cur = next;
      run *= fan;
      ++rep.passes;
    }
    result = cur;
  } else {
    u64 maxkey = 0;
    {
      SeqReader r(sim, a);
      for (u64 i = 0; i < count; ++i) maxkey = std::max(maxkey, r.get<AEntry>().key);
    }
    int bits = maxkey ? std::bit_width(maxkey) : 1;
    int digits = (bits + 15) / 16;
    FileId src = a;
    std::vector<u64> hist(1u << 16);
    for (int dgt = 0; dgt < digits; ++dgt) {
      std::fill(hist.begin(), hist.end(), 0);
      {
        SeqReader r(sim, src);
        for (u64 i = 0; i < count; ++i) ++hist[(r.get<AEntry>().key >> (16 * dgt)) & 0xffff];
      }
      u64 acc = 0;
      for (auto& x : hist) {
        u64 t = x;
        x = acc;
        acc += t;
      }
      FileId dst = sim.open_file(name + ".r" + std::to_string(dgt));
      SeqReader r(sim, src);
      for (u64 i = 0; i < count; ++i) {
        AEntry e = r.get<AEntry>();
        u64 pos = hist[(e.key >> (16 * dgt)) & 0xffff]++;
        sim.write(dst, pos * kEntry, std::as_bytes(std::span(&e, 1)));
      }
      sim.flush();
      src = dst;
      ++rep.passes;
    }
    if (count == 0) src = sim.open_file(name + ".r0");
    result = src;
  }
  if (report) *report = rep;
  return result;
}

FileId emit_bfs_order(const GridGraph& g, const ChunkStore& cs, FileId sorted_a, int h, const std::string& prefix,
                      BfsStats* stats) {
  SimDisk& sim = *g.sim;
  const u64 window = u64(2) << h;
  std::vector<FileStack> stacks;
  stacks.reserve(window);
  for (u64 i = 0; i < window; ++i) stacks.emplace_back(sim, prefix + ".S" + std::to_string(i));
  FileId out = sim.open_file(prefix + ".out");
  SeqWriter w(sim, out);
  w.write(encode_header(
      result_header(g.header.rows, g.header.cols, Encoding::vertex_ids, cs.vertices, sim.block_bytes())));
  u64 lo = 0, hi = 0, emitted = 0, max_live = 0;
  bool any = false;
  auto drain = [&](u64 upto) {
    for (u64 dd = lo; dd <= upto; ++dd) {
      FileStack& st = stacks[dd % window];
      while (!st.empty()) {
        auto b = st.pop(8);
        w.write(b);
        ++emitted;
      }
    }
  };
  SeqReader ar(sim, sorted_a);
  std::vector<std::byte> rec;
  for (u64 i = 0; i < cs.chunks; ++i) {
    AEntry e = ar.get<AEntry>();
    if (any) drain(e.key);
    lo = e.key;
    std::byte head[kChunkHeader];
    sim.read(cs.c, e.off, head);
    u32 count;
    std::memcpy(&count, head + 16, 4);
    rec.assign(head, head + kChunkHeader);
    rec.resize(kChunkHeader + count);
    if (count) sim.read(cs.c, e.off + kChunkHeader, std::span(rec).subspan(kChunkHeader));
    for (const auto& v : decode_chunk(rec, g.header.rows, g.header.cols)) {
      if (v.dist < lo || v.dist >= lo + window) throw std::logic_error("chunk distance outside the stack window");
      u64 z = v.z;
      stacks[v.dist % window].push(std::as_bytes(std::span(&z, 1)));
      hi = std::max(hi, v.dist);
    }
    any = true;
    u64 live = 0;
    for (const auto& st : stacks) live += !st.empty();
    max_live = std::max(max_live, live);
  }
  if (any) drain(hi);
  w.close();
  if (emitted != cs.vertices) throw std::logic_error("emitted vertex count differs from the chunk total");
  if (stats) {
    stats->emitted = emitted;
    stats->max_live_stacks = max_live;
  }
  return out;
}

BfsResult bfs(const GridGraph& g, Coord s, const BfsOptions& opt) {
  BfsDistances bd = bfs_distances(g, s, opt);
  ChunkStore cs = build_chunks_bfs(g, s, bd.d, opt);
  BfsResult res;
  FileId sorted = sort_addresses(*g.sim, cs.a, cs.chunks, opt.sort, opt.prefix + ".As", &res.stats.sort);
  res.output = emit_bfs_order(g, cs, sorted, bd.gp.scheme.h(), opt.prefix, &res.stats);
  res.stats.h = bd.gp.scheme.h();
  res.stats.chunks = cs.chunks;
  res.stats.queue = bd.queue;
  return res;
}

}  // namespace gridio
