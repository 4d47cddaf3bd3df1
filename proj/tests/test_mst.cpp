#include <random>

#include "doctest.h"
#include "gridio/mst.hpp"
#include "helpers.hpp"

using namespace gridio;

namespace {

WeightedEdge we(u64 a, u64 b, u64 w) { return {std::min(a, b), std::max(a, b), w}; }

std::vector<WeightedEdge> sorted(std::vector<WeightedEdge> v) {
  std::sort(v.begin(), v.end());
  return v;
}

/// Random tree on k vertices with labels scattered in [0, 4k) and distinct weights.
std::vector<WeightedEdge> random_tree(u64 k, std::mt19937_64& rng) {
  std::vector<u64> label(4 * k);
  std::iota(label.begin(), label.end(), 0);
  std::shuffle(label.begin(), label.end(), rng);
  std::vector<u64> w(k);
  std::iota(w.begin(), w.end(), 1);
  std::shuffle(w.begin(), w.end(), rng);
  std::vector<WeightedEdge> t;
  for (u64 i = 1; i < k; ++i) t.push_back(we(label[i], label[rng() % i], w[i]));
  return t;
}

struct Solved {
  MstResult r;
  std::vector<WeightedEdge> edges;
  IoCounters io;
  u64 random_on_io_files = 0;
};

Solved solve(const HostGrid& hg, bool oblivious, int h = 0, SimConfig cfg = testutil::small_cfg()) {
  SimDisk sim(cfg);
  GridGraph g = store_grid(sim, "in", hg, Order::z_order);
  sim.reset_counters();
  MstOptions o;
  o.h = h;
  auto r = oblivious ? mst_cache_oblivious(g, o) : mst_cache_aware(g, o);
  sim.flush();
  u64 rnd = sim.file_counters(g.file).random_blocks + sim.file_counters(r.output).random_blocks;
  return {r, sorted(read_mst(sim, r.output)), sim.counters(), rnd};
}

/// Spanning forest of the same components with the given weight.
bool is_msf(const HostGrid& hg, const std::vector<WeightedEdge>& e) {
  auto ref = ref_mst(hg);
  if (e.size() != ref.edges.size()) return false;
  std::vector<u64> p(hg.n());
  std::iota(p.begin(), p.end(), 0);
  auto find = [&](u64 x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  };
  u64 w = 0;
  for (auto& x : e) {
    u64 a = find(x.a), b = find(x.b);
    if (a == b) return false;
    p[a] = b;
    w += x.w;
  }
  return w == ref.weight;
}

}  // namespace

TEST_SUITE("mst") {
  TEST_CASE("contraction: star and path") {
    std::vector<WeightedEdge> star{we(0, 1, 5), we(0, 2, 6), we(0, 3, 7)};
    auto t = prune_and_contract(star, [](u64 v) { return v != 0; });
    CHECK(t.dead_ends.empty());
    CHECK(sorted(t.edges()) == sorted(star));

    std::vector<WeightedEdge> path{we(0, 1, 3), we(1, 2, 9), we(2, 3, 4), we(3, 4, 1)};
    auto p = prune_and_contract(path, [](u64 v) { return v == 0 || v == 4; });
    REQUIRE(p.chains.size() == 1);
    CHECK(p.chains[0].rep().w == 9);
    CHECK(p.edges().size() == 1);
    CHECK(p.kept == std::vector<u64>{0, 4});
    // unselected chain: everything but its heaviest edge
    CHECK(sorted(expand(p, {})) == sorted({we(0, 1, 3), we(2, 3, 4), we(3, 4, 1)}));
    CHECK(sorted(expand(p, {key_of(p.chains[0].rep())})) == sorted(path));

    auto d = prune_and_contract(path, [](u64 v) { return v == 0; });
    CHECK(d.edges().empty());
    CHECK(sorted(d.dead_ends) == sorted(path));
  }

  TEST_CASE("property: expand_all inverts prune_and_contract") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 300; ++it) {
      u64 k = 1 + rng() % 64;
      auto t = random_tree(k, rng);
      std::set<u64> keep;
      for (auto& e : t)
        for (u64 v : {e.a, e.b})
          if (rng() % 4 == 0) keep.insert(v);
      auto c = prune_and_contract(t, [&](u64 v) { return keep.count(v) > 0; });
      REQUIRE(sorted(expand_all(c)) == sorted(t));
      // chains end at kept or branching vertices
      auto anchor = [&](u64 v) { return std::binary_search(c.kept.begin(), c.kept.end(), v); };
      for (auto& ch : c.chains) {
        REQUIRE(anchor(ch.u0));
        REQUIRE(anchor(ch.um));
      }
      if (keep.size() >= 2)
        for (u64 v : keep) REQUIRE(anchor(v));
    }
  }

  TEST_CASE("prim_forest") {
    std::vector<WeightedEdge> e{we(0, 1, 4), we(1, 2, 1), we(0, 2, 2), we(5, 6, 3)};
    auto f = sorted(prim_forest(e));
    CHECK(f == sorted({we(1, 2, 1), we(0, 2, 2), we(5, 6, 3)}));
  }

  TEST_CASE("2x2 example and uniform weights") {
    HostGrid hg(2, 2, Encoding::weighted_undirected);
    hg.add_edge({1, 1}, E, 1);
    hg.add_edge({1, 1}, S, 2);
    hg.add_edge({1, 2}, S, 3);
    hg.add_edge({2, 1}, E, 4);
    for (bool obl : {false, true}) {
      auto s = solve(hg, obl, obl ? 0 : 1);
      CHECK(s.r.weight == 6);
      CHECK(s.edges.size() == 3);
    }

    HostGrid u(9, 11, Encoding::weighted_undirected);
    for (u64 r = 1; r <= 9; ++r)
      for (u64 c = 1; c <= 11; ++c) {
        if (c < 11) u.add_edge({r, c}, E, 7);
        if (r < 9) u.add_edge({r, c}, S, 7);
      }
    for (bool obl : {false, true}) {
      auto s = solve(u, obl, obl ? 0 : 2);
      CHECK(s.r.weight == 7 * 98);
      CHECK(is_msf(u, s.edges));
    }
  }

  TEST_CASE("property: distinct weights give the oracle's edge set") {
    GenOptions go;
    go.distinct_weights = true;
    for (u64 seed = 0; seed < 20; ++seed) {
      HostGrid hg = generate(5 + seed % 20, 3 + seed % 27, Model::weighted_undirected, seed, go);
      auto ref = ref_mst(hg);
      for (int h : {1, 2, 3}) REQUIRE(solve(hg, false, h).edges == ref.edges);
      REQUIRE(solve(hg, true).edges == ref.edges);
    }
  }

  TEST_CASE("property: aware and oblivious agree on weight, with ties") {
    GenOptions go;
    go.max_weight = 4;
    for (u64 seed = 0; seed < 20; ++seed) {
      HostGrid hg = generate(1 + seed % 30, 1 + (seed * 7) % 30, Model::weighted_undirected, seed, go);
      auto a = solve(hg, false, 1 + int(seed % 3)), o = solve(hg, true);
      REQUIRE(a.r.weight == o.r.weight);
      REQUIRE(is_msf(hg, a.edges));
      REQUIRE(is_msf(hg, o.edges));
    }
  }

  TEST_CASE("oblivious: input and output scanned, linear scratch") {
    for (u64 side : {16, 32, 64}) {
      HostGrid hg = generate(side, side, Model::weighted_undirected, side);
      auto o = solve(hg, true, 0, SimConfig{64, 4096});
      CHECK(o.random_on_io_files == 0);
      // records of a few u32 fields per edge
      CHECK(o.r.expansion_bytes <= 64 * hg.n());
      CHECK(o.r.connection_bytes <= 64 * hg.n());
    }
  }

  TEST_CASE("property: cluster MSTs plus crossing edges hold an MST") {
    for (u64 seed = 0; seed < 40; ++seed) {
      GenOptions go;
      go.max_weight = seed % 2 ? 3 : u64(1) << 20;
      HostGrid hg = generate(3 + seed % 30, 3 + (seed * 3) % 30, Model::weighted_undirected, seed, go);
      for (int h : {1, 2, 3}) REQUIRE(union_contains_mst_check(hg, h));
    }
  }

  TEST_CASE("input errors") {
    SimDisk sim(testutil::small_cfg());
    GridGraph g = store_grid(sim, "d", generate(4, 4, Model::weighted_directed, 1), Order::z_order);
    CHECK_THROWS_AS(mst_cache_aware(g), std::invalid_argument);
    CHECK_THROWS_AS(mst_cache_oblivious(g), std::invalid_argument);
  }
}
