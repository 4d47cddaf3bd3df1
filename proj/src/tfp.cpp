#include "gridio/tfp.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <set>
#include <unordered_map>

namespace gridio {

InterSlots::InterSlots(u64 rows, u64 cols, int h)
    : rows_(rows), cols_(cols), side_(u64(1) << h), cr_((rows + side_ - 1) >> h), cc_((cols + side_ - 1) >> h) {
  h_ = rows_ * (cc_ - 1);
  v_ = (cr_ - 1) * cols_;
  da_ = (cr_ - 1) * (cols_ - 1);
  db_ = (rows_ - 1 - (cr_ - 1)) * (cc_ - 1);
}

u64 InterSlots::slot(Coord a, Coord b) const {
  u64 i = std::min(a.row, b.row), j = std::min(a.col, b.col);
  auto bad = [] { return std::logic_error("edge does not cross a cluster border"); };
  if (a.row == b.row) {
    if (j % side_) throw bad();
    return (i - 1) * (cc_ - 1) + j / side_ - 1;
  }
  if (a.col == b.col) {
    if (i % side_) throw bad();
    return h_ + (i / side_ - 1) * cols_ + (j - 1);
  }
  if (i % side_ == 0) return h_ + v_ + (i / side_ - 1) * (cols_ - 1) + (j - 1);
  if (j % side_) throw bad();
  return h_ + v_ + da_ + ((i - 1) - (i - 1) / side_) * (cc_ - 1) + j / side_ - 1;
}

namespace {

bool both_diagonals(const VertexRecord& tl, const VertexRecord& tr, const VertexRecord& bl, const VertexRecord& br) {
  return (tl.has(SE) || br.has(NW)) && (tr.has(SW) || bl.has(NE));
}

}  // namespace

void check_planar(const HostGrid& g) {
  for (u64 i = 1; i < g.rows; ++i)
    for (u64 j = 1; j < g.cols; ++j)
      if (both_diagonals(g.at({i, j}), g.at({i, j + 1}), g.at({i + 1, j}), g.at({i + 1, j + 1})))
        throw std::invalid_argument("not planar");
}

namespace {

constexpr u64 kChunkHeader = 32;  // root u64, L start u64, count u32, body u32, region u32, pad u32
constexpr u64 kLabelEntry = 12;  // u32 local id, u64 label

void check_input(const GridGraph& g) {
  if (g.header.order != Order::z_order) throw std::invalid_argument("tfp needs a Z-order grid");
  if (g.header.encoding == Encoding::weighted_undirected) throw std::invalid_argument("tfp needs a directed grid");
}

/// Cells whose top-left corner lies in the cluster; corners outside are read through the cache.
void check_planar_cluster(const GridGraph& g, const InMemoryCluster& c) {
  u64 rows = g.header.rows, cols = g.header.cols;
  auto rec = [&](Coord x) {
    return c.ext.contains(x) ? c.rec[c.local(x)] : read_vertex(g, z_index(rows, cols, x));
  };
  for (u64 i = c.ext.r0; i < c.ext.r0 + c.ext.hr && i < rows; ++i)
    for (u64 j = c.ext.c0; j < c.ext.c0 + c.ext.hc && j < cols; ++j)
      if (both_diagonals(rec({i, j}), rec({i, j + 1}), rec({i + 1, j}), rec({i + 1, j + 1})))
        throw std::invalid_argument("not planar");
}

Coord add(Coord c, int d) { return {u64(i64(c.row) + kDr[d]), u64(i64(c.col) + kDc[d])}; }

}  // namespace

TfpResult tfp(const GridGraph& g, const LabelOracle& phi, const TfpOptions& opt) {
  check_input(g);
  SimDisk& sim = *g.sim;
  u64 rows = g.header.rows, cols = g.header.cols;
  int h = opt.h > 0 ? opt.h : auto_h(sim.config(), Alg::tfp, g.header.rows, g.header.cols);
  SeparatorGraph gp = build_separator_graph(g, h, SepMode::reachability, {opt.parallel, opt.prefix + ".gprime"});
  const ClusterScheme& s = gp.scheme;
  TopoNumbering tn = topo_number_separator(sim, gp, opt.prefix);
  InterSlots inter(rows, cols, h);

  TfpResult res;
  res.stats.h = h;
  res.stats.inter_slots = inter.count();

  // diagnostics only: chunk of each vertex that sends or receives across clusters
  std::unordered_map<u64, u64> border_chunk;
  std::vector<std::pair<u64, u64>> border_msgs;
  std::set<std::pair<u64, u64>> pairs;

  FileId cf = sim.open_file(opt.prefix + ".C"), af = sim.open_file(opt.prefix + ".A");
  {
    SeqReader in(sim, g.file, g.header.header_bytes);
    SeqReader rr(sim, tn.r);
    SeqWriter cw(sim, cf), aw(sim, af);
    for (u64 i = 0; i < inter.count(); ++i) cw.put(u64(0));
    std::vector<u64> rslice(s.stride());
    u64 global_chunk = 0;
    for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
      ClusterId q = s.at_rank(qr);
      std::vector<std::byte> bytes(s.extent(q).size() * g.rec());
      in.read(bytes);
      rr.read(std::as_writable_bytes(std::span(rslice)));
      InMemoryCluster c = decode_cluster(g, s, q, bytes);
      check_planar_cluster(g, c);
      u64 b = s.boundary_size(q);
      std::unordered_map<u64, u64> root_of;
      for (u64 p = 0; p < b; ++p) root_of[rslice[p]] = qr * s.stride() + p;
      auto a = assign_chunk_numbers(c, s, std::span(rslice).first(b));
      auto zr = local_zrank(c);
      u64 nchunks = a.chunks.size();
      std::vector<u64> chunk_of(c.size());
      for (u64 k = 0; k < nchunks; ++k)
        for (u64 v : a.chunks[k].second) chunk_of[v] = k;

      // sizes, then layout of the cluster's chunks in C
      std::vector<u64> body(nchunks, 0), region(nchunks, 0), start(nchunks);
      std::unordered_map<u64, u64> slot_addr;  // v*8+d (receiver, direction of sender) -> index in region
      for (u64 k = 0; k < nchunks; ++k)
        for (u64 v : a.chunks[k].second) {
          body[k] += 7;
          for (int d = 0; d < 8; ++d) {
            if (c.rec[v].has(d))
              if (auto y = c.inside(v, d); y && chunk_of[*y] != k) body[k] += 4;
            auto x = c.inside(v, d);
            if (x && c.rec[*x].has(opposite(d)) && chunk_of[*x] != k) slot_addr[v * 8 + d] = region[k]++;
          }
        }
      u64 cur = cw.offset();
      for (u64 k = 0; k < nchunks; ++k) {
        start[k] = cur;
        cur += kChunkHeader + body[k] + 8 * region[k];
      }
      u64 lpos = s.first_index(q) * kLabelEntry;
      for (u64 k = 0; k < nchunks; ++k) {
        const auto& [ch, vs] = a.chunks[k];
        aw.put(start[k]);
        aw.put(ch);
        cw.put(root_of.at(ch));
        cw.put(lpos);
        cw.put(u32(vs.size()));
        cw.put(u32(body[k]));
        cw.put(u32(region[k]));
        cw.put(u32(0));
        lpos += vs.size() * kLabelEntry;
        for (u64 v : vs) {
          u8 recv = 0, send = 0;
          Coord vc = c.coord(v);
          for (int d = 0; d < 8; ++d) {
            Coord x;
            if (!neighbour(rows, cols, vc, d, x)) continue;
            if (c.rec[v].has(d)) send |= u8(1u << d);
            bool in_edge = c.ext.contains(x) ? c.rec[c.local(x)].has(opposite(d))
                                              : read_vertex(g, z_index(rows, cols, x)).has(opposite(d));
            if (in_edge) recv |= u8(1u << d);
          }
          u8 far = 0;
          for (int d = 0; d < 8; ++d)
            if (send & (1u << d))
              if (auto y = c.inside(v, d); y && chunk_of[*y] != k) far |= u8(1u << d);
          cw.put(u32(zr[v]));
          cw.put(recv);
          cw.put(send);
          cw.put(far);
          for (int d = 0; d < 8; ++d) {
            if (!(send & (1u << d))) continue;
            auto y = c.inside(v, d);
            if (!y) {
              border_msgs.push_back({z_index(rows, cols, vc), z_index(rows, cols, add(vc, d))});
              border_chunk[z_index(rows, cols, vc)] = global_chunk + k;
              continue;
            }
            u64 kt = chunk_of[*y];
            if (kt == k) continue;
            u64 target = start[kt] + kChunkHeader + body[kt] + 8 * slot_addr.at(*y * 8 + opposite(d));
            cw.put(static_cast<i32>(i64(target) - i64(start[k])));
            pairs.insert({global_chunk + k, global_chunk + kt});
            ++res.stats.intra_slots;
          }
          if (recv)
            for (int d = 0; d < 8; ++d)
              if ((recv & (1u << d)) && !c.ext.contains(add(vc, d)))
                border_chunk[z_index(rows, cols, vc)] = global_chunk + k;
        }
        for (u64 i = 0; i < region[k]; ++i) cw.put(u64(0));
      }
      global_chunk += nchunks;
    }
    res.stats.chunks = global_chunk;
  }
  for (auto [from, to] : border_msgs) pairs.insert({border_chunk.at(from), border_chunk.at(to)});
  res.stats.chunk_pairs = pairs.size();

  // chunks in topological order
  FileId sorted = sort_addresses(sim, af, res.stats.chunks, SortMethod::merge, opt.prefix + ".As");
  FileId lf = sim.open_file(opt.prefix + ".L");
  {
    struct Entry {
      u32 id;
      u8 recv, send, far;
      std::vector<i32> rel;
    };
    SeqReader ar(sim, sorted);
    std::vector<u64> ins;
    for (u64 i = 0; i < res.stats.chunks; ++i) {
      u64 off = ar.get<u64>();
      ar.get<u64>();
      std::byte head[kChunkHeader];
      sim.read(cf, off, head);
      ByteReader hr(head);
      u64 root = hr.get<u64>(), lstart = hr.get<u64>();
      u32 cnt = hr.get<u32>(), body = hr.get<u32>(), region = hr.get<u32>();
      std::vector<std::byte> rec(body + 8 * u64(region));
      sim.read(cf, off + kChunkHeader, rec);
      ByteReader br(std::span<const std::byte>(rec).first(body));
      std::vector<u64> reg(region);
      if (region) std::memcpy(reg.data(), rec.data() + body, 8 * u64(region));
      std::vector<Entry> es(cnt);
      std::unordered_map<u64, u64> label;  // local id -> label, for chunk members
      for (auto& e : es) {
        e.id = br.get<u32>();
        e.recv = br.get<u8>();
        e.send = br.get<u8>();
        e.far = br.get<u8>();
        for (int k = std::popcount(e.far); k > 0; --k) e.rel.push_back(br.get<i32>());
      }

      ClusterId q = s.hnum_cluster(root);
      Extent ext = s.extent(q);
      u64 first = s.first_index(q);
      std::vector<std::pair<u64, u64>> writes;  // C address, label
      ByteWriter lw;
      u64 next_slot = 0;
      for (const auto& e : es) {
        Coord lc = index_to_coord(Order::z_order, ext.hr, ext.hc, e.id);
        Coord vc{ext.r0 + lc.row - 1, ext.c0 + lc.col - 1};
        ins.clear();
        for (int d = 0; d < 8; ++d) {
          if (!(e.recv & (1u << d))) continue;
          Coord x = add(vc, d);
          if (!ext.contains(x)) {
            u64 m;
            sim.read(cf, inter.slot(vc, x) * 8, std::as_writable_bytes(std::span(&m, 1)));
            ins.push_back(m);
          } else if (auto it = label.find(z_index(rows, cols, x) - first); it != label.end()) {
            ins.push_back(it->second);
          } else {
            ins.push_back(reg.at(next_slot++));
          }
        }
        u64 lab = phi(vc, ins);
        label[e.id] = lab;
        lw.put(e.id);
        lw.put(lab);
        size_t r = 0;
        for (int d = 0; d < 8; ++d) {
          if (!(e.send & (1u << d))) continue;
          ++res.stats.messages;
          Coord y = add(vc, d);
          if (!ext.contains(y)) writes.push_back({inter.slot(vc, y) * 8, lab});
          else if (e.far & (1u << d)) writes.push_back({u64(i64(off) + e.rel.at(r++)), lab});
        }
      }
      if (next_slot != region) throw std::logic_error("message region not fully consumed");
      sim.write(lf, lstart, lw.bytes);
      // messages grouped by address; neighbouring slots go out in one write
      std::sort(writes.begin(), writes.end());
      for (size_t k = 0; k < writes.size();) {
        size_t e = k + 1;
        while (e < writes.size() && writes[e].first == writes[e - 1].first + 8) ++e;
        std::vector<u64> run(e - k);
        for (size_t t = k; t < e; ++t) run[t - k] = writes[t].second;
        sim.write(cf, writes[k].first, std::as_bytes(std::span(run)));
        k = e;
      }
    }
  }
  sim.flush();

  // L is ordered by cluster: reorder each cluster into Z order
  res.output = sim.open_file(opt.prefix + ".out");
  {
    SeqWriter ow(sim, res.output);
    ow.write(encode_header(result_header(rows, cols, Encoding::labels, g.n(), sim.block_bytes())));
    SeqReader lr(sim, lf);
    for (u64 qr = 0; qr < s.num_clusters(); ++qr) {
      u64 size = s.extent(s.at_rank(qr)).size();
      std::vector<u64> labels(size);
      std::vector<bool> seen(size, false);
      for (u64 k = 0; k < size; ++k) {
        u32 id = lr.get<u32>();
        u64 lab = lr.get<u64>();
        if (id >= size || seen[id]) throw std::logic_error("label file entry out of place");
        seen[id] = true;
        labels[id] = lab;
      }
      for (u64 lab : labels) ow.put(lab);
    }
    ow.close();
  }
  return res;
}

}  // namespace gridio
