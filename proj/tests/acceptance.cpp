// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "gridio/costmodel.hpp"
#include "gridio/euler.hpp"
#include "gridio/mst.hpp"
#include "gridio/tfp.hpp"

using namespace gridio;

namespace {

// pinned tolerances
constexpr int kInstances = 200;
constexpr u64 kMaxSide = 64;
constexpr int kUnionPairs = 500;
constexpr u64 kUnionMaxSide = 32;
constexpr double kMaxSpread = 2.0;
constexpr double kMaxOverModel = 3.0;
constexpr int kRoundTrips = 1000;
constexpr u64 kMaxTreeVertices = 64;
const SimConfig kScalingCfg{256, 65536};
constexpr u64 kScalingSides[] = {32, 64, 128, 256};  // n = 2^10 .. 2^16

struct Verdict {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// ---- 1: cost model

Verdict cost_model() {
  Verdict v;
  struct Want {
    CostAlg a;
    Rational ratio;
  };
  const Want wants[] = {{CostAlg::sssp, Rational(904, 72)},       {CostAlg::bfs, Rational(828, 9)},
                        {CostAlg::mst_aware, Rational(992, 64)},  {CostAlg::mst_oblivious, Rational(160, 64)},
                        {CostAlg::toposort, Rational(84, 9)},     {CostAlg::tfp, Rational(592, 9)},
                        {CostAlg::euler, Rational(40, 3)}};
  for (auto& w : wants) {
    auto r = volume_model(w.a, reference_params(w.a));
    if (r.ratio != w.ratio) v.fail(to_string(w.a) + " ratio " + r.ratio.str() + " != " + w.ratio.str());
  }
  CostParams small = reference_params(CostAlg::mst_aware);
  small.n = u64(1) << 32;
  auto r = volume_model(CostAlg::mst_aware, small);
  if (!r.small_regime || r.ratio != Rational(3, 2)) v.fail("small-input MST ratio " + r.ratio.str() + " != 3/2");
  if (v.ok) v.detail = "7 ratios and the small-input MST ratio exact";
  return v;
}

// ---- 2: oracle equivalence

struct Instance {
  u64 rows, cols, seed;
  int h;
  Coord src;
};

std::vector<Instance> instances(u64 salt) {
  std::mt19937_64 rng(salt);
  std::vector<Instance> out;
  for (int i = 0; i < kInstances; ++i) {
    // a quarter of the instances at full size, the rest spread out
    u64 r = i % 4 == 0 ? kMaxSide : 1 + rng() % kMaxSide;
    u64 c = i % 4 == 0 ? kMaxSide : 1 + rng() % kMaxSide;
    out.push_back({r, c, rng(), 1 + i % 3, {1 + rng() % r, 1 + rng() % c}});
  }
  return out;
}

const SimConfig kSmallCfg{64, 4096};

template <class F>
void each(Verdict& v, const std::string& name, u64 salt, F f) {
  for (const auto& in : instances(salt)) {
    try {
      if (!f(in)) {
        std::ostringstream os;
        os << name << " mismatch on " << in.rows << "x" << in.cols << " seed " << in.seed << " h " << in.h;
        v.fail(os.str());
      }
    } catch (const std::exception& e) {
      v.fail(name + " threw: " + e.what());
    }
  }
}

bool topological(const HostGrid& hg, const std::vector<u64>& order) {
  if (order.size() != hg.n()) return false;
  std::vector<u64> pos(hg.n(), kInfinity);
  for (u64 i = 0; i < order.size(); ++i) {
    if (order[i] >= hg.n() || pos[order[i]] != kInfinity) return false;
    pos[order[i]] = i;
  }
  for (u64 i = 0; i < hg.n(); ++i)
    for (int d = 0; d < 8; ++d) {
      Coord o;
      Coord c = hg.coord(i);
      if (hg.v[i].has(d) && neighbour(hg.rows, hg.cols, c, d, o) &&
          pos[z_index(hg.rows, hg.cols, c)] >= pos[z_index(hg.rows, hg.cols, o)])
        return false;
    }
  return true;
}

bool bfs_valid(const HostGrid& hg, Coord s, const std::vector<u64>& out) {
  auto dist = ref_bfs_dist(hg, s);
  u64 reach = 0;
  for (u64 x : dist) reach += x != kInfinity;
  if (out.size() != reach) return false;
  std::vector<bool> seen(hg.n(), false);
  for (u64 i = 0; i < out.size(); ++i) {
    if (out[i] >= hg.n() || seen[out[i]] || dist[out[i]] == kInfinity) return false;
    seen[out[i]] = true;
    if (i && dist[out[i - 1]] > dist[out[i]]) return false;
  }
  return true;
}

std::vector<WeightedEdge> sorted(std::vector<WeightedEdge> e) {
  std::sort(e.begin(), e.end());
  return e;
}

Verdict oracle_equivalence() {
  Verdict v;
  each(v, "sssp", 1, [](const Instance& in) {
    HostGrid hg = generate(in.rows, in.cols, Model::weighted_directed, in.seed);
    auto ref = ref_sssp(hg, in.src);
    SsspOptions o;
    o.h = in.h;
    for (bool hier : {false, true}) {
      SimDisk sim(kSmallCfg);
      GridGraph g = store_grid(sim, "in", hg, Order::z_order);
      auto r = hier ? sssp_hierarchical(g, in.src, o) : sssp_simple(g, in.src, o);
      if (result_u64(sim, r.output) != ref) return false;
    }
    return true;
  });
  each(v, "bfs", 2, [](const Instance& in) {
    HostGrid hg = generate(in.rows, in.cols, Model::unit_directed, in.seed);
    SimDisk sim(kSmallCfg);
    GridGraph g = store_grid(sim, "in", hg, Order::z_order);
    BfsOptions o;
    o.h = in.h;
    return bfs_valid(hg, in.src, result_u64(sim, bfs(g, in.src, o).output));
  });
  int k = 0;
  each(v, "mst", 3, [&k](const Instance& in) {
    GenOptions go;
    go.distinct_weights = k++ % 2 == 0;
    if (!go.distinct_weights) go.max_weight = 1 + in.seed % 8;  // plenty of ties
    HostGrid hg = generate(in.rows, in.cols, Model::weighted_undirected, in.seed, go);
    auto ref = ref_mst(hg);
    MstOptions o;
    o.h = in.h;
    for (bool obl : {false, true}) {
      SimDisk sim(kSmallCfg);
      GridGraph g = store_grid(sim, "in", hg, Order::z_order);
      auto r = obl ? mst_cache_oblivious(g, o) : mst_cache_aware(g, o);
      auto e = sorted(read_mst(sim, r.output));
      u64 w = 0;
      for (auto& x : e) w += x.w;
      if (w != ref.weight || r.weight != ref.weight || e.size() != ref.edges.size()) return false;
      if (go.distinct_weights && e != ref.edges) return false;
    }
    return true;
  });
  each(v, "toposort", 4, [](const Instance& in) {
    HostGrid hg = generate(in.rows, in.cols, in.seed % 2 ? Model::weighted_dag : Model::planar_dag, in.seed);
    SimDisk sim(kSmallCfg);
    GridGraph g = store_grid(sim, "in", hg, Order::z_order);
    TopoOptions o;
    o.h = in.h;
    return topological(hg, result_u64(sim, toposort(g, o).output));
  });
  each(v, "tfp", 5, [](const Instance& in) {
    HostGrid hg = generate(in.rows, in.cols, Model::planar_dag, in.seed);
    for (const char* name : {"indegree", "longest_path", "path_count"}) {
      SimDisk sim(kSmallCfg);
      GridGraph g = store_grid(sim, "in", hg, Order::z_order);
      TfpOptions o;
      o.h = in.h;
      auto phi = builtin_oracle(name);
      if (result_u64(sim, tfp(g, phi, o).output) != ref_tfp(hg, phi)) return false;
    }
    return true;
  });
  each(v, "euler", 6, [](const Instance& in) {
    HostGrid hg = generate(in.rows, in.cols, Model::tree, in.seed);
    SimDisk sim(kSmallCfg);
    GridGraph g = store_grid(sim, "in", hg, Order::z_order);
    EulerOptions o;
    o.h = in.h;
    o.root = in.src;
    return read_euler(sim, euler_tour(g, o).output) == ref_euler(hg, in.src);
  });
  if (v.ok) v.detail = std::to_string(kInstances) + " instances per algorithm, all exact";
  return v;
}

// ---- 3: union of cluster MSTs

Verdict union_check() {
  Verdict v;
  std::mt19937_64 rng(7);
  for (int i = 0; i < kUnionPairs; ++i) {
    u64 r = 1 + rng() % kUnionMaxSide, c = 1 + rng() % kUnionMaxSide;
    GenOptions go;
    go.max_weight = i % 2 ? 1 + rng() % 4 : u64(1) << 20;
    HostGrid hg = generate(r, c, Model::weighted_undirected, rng(), go);
    int h = 1 + int(rng() % 3);
    if (!union_contains_mst_check(hg, h)) v.fail("failed on " + std::to_string(r) + "x" + std::to_string(c));
  }
  if (v.ok) v.detail = std::to_string(kUnionPairs) + " pairs";
  return v;
}

// ---- 4 and 5: measured I/O

struct Measured {
  double per_n;
  double over_model;
  u64 random_io_files;
};

struct Runner {
  std::string name;
  CostAlg model;
  Model gen;
  std::function<FileId(const GridGraph&)> run;
};

std::vector<Runner> runners() {
  return {
      {"sssp_simple", CostAlg::sssp, Model::weighted_directed,
       [](const GridGraph& g) { return sssp_simple(g, {1, 1}).output; }},
      {"sssp_hierarchical", CostAlg::sssp, Model::weighted_directed,
       [](const GridGraph& g) { return sssp_hierarchical(g, {1, 1}).output; }},
      {"bfs", CostAlg::bfs, Model::unit_directed, [](const GridGraph& g) { return bfs(g, {1, 1}).output; }},
      {"mst_cache_aware", CostAlg::mst_aware, Model::weighted_undirected,
       [](const GridGraph& g) { return mst_cache_aware(g).output; }},
      {"mst_cache_oblivious", CostAlg::mst_oblivious, Model::weighted_undirected,
       [](const GridGraph& g) { return mst_cache_oblivious(g).output; }},
      {"toposort", CostAlg::toposort, Model::planar_dag, [](const GridGraph& g) { return toposort(g).output; }},
      {"tfp", CostAlg::tfp, Model::planar_dag,
       [](const GridGraph& g) { return tfp(g, builtin_oracle("longest_path")).output; }},
      {"euler", CostAlg::euler, Model::tree, [](const GridGraph& g) { return euler_tour(g).output; }},
  };
}

Measured measure(const Runner& r, u64 side) {
  SimDisk sim(kScalingCfg);
  GridGraph g = store_grid(sim, "in", generate(side, side, r.gen, 1), Order::z_order);
  sim.reset_counters();
  FileId out = r.run(g);
  sim.flush();
  double n = double(side * side);
  double bytes = double(sim.counters().bytes_transferred);
  auto rep = volume_model(r.model, desk_params(r.model, side * side, kScalingCfg));
  u64 rnd = sim.file_counters(g.file).random_blocks + sim.file_counters(out).random_blocks;
  return {bytes / n, bytes / rep.predicted_bytes(), rnd};
}

std::map<std::string, std::vector<Measured>> g_measured;

Verdict scaling() {
  Verdict v;
  std::ostringstream summary;
  for (const auto& r : runners()) {
    auto& ms = g_measured[r.name];
    for (u64 side : kScalingSides) ms.push_back(measure(r, side));
    double lo = 1e300, hi = 0, worst = 0;
    for (auto& m : ms) {
      lo = std::min(lo, m.per_n);
      hi = std::max(hi, m.per_n);
      worst = std::max(worst, m.over_model);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s spread %.2f model x%.2f; ", r.name.c_str(), hi / lo, worst);
    summary << buf;
    if (hi > kMaxSpread * lo) v.fail(std::string("spread: ") + buf);
    if (worst > kMaxOverModel) v.fail(std::string("over model: ") + buf);
  }
  if (v.ok) v.detail = summary.str();
  return v;
}

Verdict oblivious_sequential() {
  Verdict v;
  const Runner obl = runners()[4];
  auto& ms = g_measured[obl.name];
  if (ms.empty())
    for (u64 side : kScalingSides) ms.push_back(measure(obl, side));
  u64 total = 0;
  for (auto& m : ms) total += m.random_io_files;
  // small grids too, under a tight cache
  for (u64 side : {1, 2, 3, 7, 16, 33}) {
    SimDisk sim(SimConfig{16, 256});
    GridGraph g = store_grid(sim, "in", generate(side, side, Model::weighted_undirected, side), Order::z_order);
    sim.reset_counters();
    FileId out = mst_cache_oblivious(g).output;
    sim.flush();
    total += sim.file_counters(g.file).random_blocks + sim.file_counters(out).random_blocks;
  }
  if (total) v.fail(std::to_string(total) + " random blocks on input/output");
  else v.detail = "0 random blocks on input and output at every size";
  return v;
}

// ---- 6: geometry and contraction

Verdict invariants() {
  Verdict v;
  u64 grids = 0;
  for (u64 r = 1; r <= kMaxSide; ++r)
    for (u64 c = 1; c <= kMaxSide; ++c) {
      ++grids;
      for (Order o : {Order::row_major, Order::col_major, Order::z_order}) {
        std::vector<bool> hit(r * c, false);
        for (u64 i = 0; i < r * c; ++i) {
          Coord x = index_to_coord(o, r, c, i);
          u64 back = coord_to_index(o, r, c, x.row, x.col);
          if (back != i || x.row < 1 || x.row > r || x.col < 1 || x.col > c || hit[back]) {
            v.fail("bijection broken on " + std::to_string(r) + "x" + std::to_string(c));
            return v;
          }
          hit[back] = true;
        }
      }
      for (int h = 1; (u64(1) << (h - 1)) < std::max(r, c) || h == 1; ++h) {
        ClusterScheme s(r, c, h);
        for (u64 row = 1; row <= r; ++row)
          for (u64 col = 1; col <= c; ++col) {
            ClusterId q = s.cluster_of({row, col});
            u64 z = z_index(r, c, {row, col}), first = s.first_index(q);
            if (z < first || z >= first + s.extent(q).size()) {
              v.fail("cluster not contiguous on " + std::to_string(r) + "x" + std::to_string(c) + " h " +
                     std::to_string(h));
              return v;
            }
          }
      }
    }
  std::mt19937_64 rng(99);
  for (int it = 0; it < kRoundTrips; ++it) {
    u64 k = 1 + rng() % kMaxTreeVertices;
    std::vector<u64> label(4 * k);
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), rng);
    std::vector<WeightedEdge> t;
    for (u64 i = 1; i < k; ++i) {
      u64 a = label[i], b = label[rng() % i];
      t.push_back({std::min(a, b), std::max(a, b), 1 + rng() % 50});
    }
    std::set<u64> keep;
    for (u64 i = 0; i < k; ++i)
      if (rng() % 3 == 0) keep.insert(label[i]);
    auto ct = prune_and_contract(t, [&](u64 x) { return keep.count(x) > 0; });
    if (sorted(expand_all(ct)) != sorted(t)) {
      v.fail("round trip broken on a tree of " + std::to_string(k) + " vertices");
      return v;
    }
  }
  v.detail = std::to_string(grids) + " grids x 3 orders, all h; " + std::to_string(kRoundTrips) + " round trips";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*check)();
  };
  const Criterion all[] = {{1, "cost-model exactness", cost_model},
                           {2, "oracle equivalence", oracle_equivalence},
                           {3, "cluster MST union", union_check},
                           {4, "O(scan) scaling", scaling},
                           {5, "cache-oblivious sequential I/O", oblivious_sequential},
                           {6, "format and geometry invariants", invariants}};
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.fail(std::string("threw: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s (%.1fs): %s\n", v.ok ? "PASS" : "FAIL", c.id, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.ok;
  }
  return failed ? 1 : 0;
}
