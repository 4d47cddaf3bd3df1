#include <map>

#include "doctest.h"
#include "gridio/euler.hpp"
#include "gridio/oracle.hpp"
#include "helpers.hpp"

using namespace gridio;

namespace {

std::vector<u64> tour(const HostGrid& hg, std::optional<Coord> root, int h, bool full_ids = false,
                      SimConfig cfg = testutil::small_cfg()) {
  SimDisk sim(cfg);
  GridGraph g = store_grid(sim, "in", hg, Order::z_order);
  EulerOptions o;
  o.h = h;
  o.root = root;
  o.full_ids = full_ids;
  return read_euler(sim, euler_tour(g, o).output);
}

/// Closed walk along tree edges using each arc exactly once.
bool is_euler_tour(const HostGrid& hg, u64 root, const std::vector<u64>& t) {
  if (t.size() != 2 * hg.n() - 1 || t.front() != root || t.back() != root) return false;
  std::map<std::pair<u64, u64>, int> arcs;
  for (u64 i = 0; i + 1 < t.size(); ++i) {
    Coord a = index_to_coord(Order::z_order, hg.rows, hg.cols, t[i]);
    Coord b = index_to_coord(Order::z_order, hg.rows, hg.cols, t[i + 1]);
    int dr = int(b.row) - int(a.row), dc = int(b.col) - int(a.col);
    if (std::abs(dr) > 1 || std::abs(dc) > 1 || (dr == 0 && dc == 0)) return false;
    if (!hg.at(a).has(direction_of(dr, dc))) return false;
    if (++arcs[{t[i], t[i + 1]}] > 1) return false;
  }
  return arcs.size() == 2 * (hg.n() - 1);
}

}  // namespace

TEST_SUITE("euler") {
  TEST_CASE("two vertices") {
    HostGrid hg = generate(1, 2, Model::tree, 1);
    CHECK(tour(hg, std::nullopt, 1) == std::vector<u64>{0, 1, 0});
    CHECK(tour(hg, Coord{1, 2}, 1) == std::vector<u64>{1, 0, 1});
    HostGrid one(1, 1, Encoding::unweighted_directed);
    CHECK(tour(one, std::nullopt, 1) == std::vector<u64>{0});
  }

  TEST_CASE("star visits its leaves clockwise from north") {
    HostGrid hg(3, 3, Encoding::unweighted_directed);
    for (int d = 0; d < 8; ++d) hg.add_edge({2, 2}, d);
    for (int d = 0; d < 8; ++d) {
      Coord o;
      neighbour(3, 3, {2, 2}, d, o);
      hg.add_edge(o, opposite(d));
    }
    auto t = tour(hg, Coord{2, 2}, 1);
    REQUIRE(t.size() == 17);
    u64 c = z_index(3, 3, {2, 2});
    for (int d = 0; d < 8; ++d) {
      Coord o;
      neighbour(3, 3, {2, 2}, d, o);
      CHECK(t[2 * d] == c);
      CHECK(t[2 * d + 1] == z_index(3, 3, o));
    }
    CHECK(t == ref_euler(hg, {2, 2}));
  }

  TEST_CASE("32x32 random tree against the reference") {
    HostGrid hg = generate(32, 32, Model::tree, 9);
    for (int h : {1, 2, 3, 4}) CHECK(tour(hg, Coord{7, 20}, h) == ref_euler(hg, {7, 20}));
  }

  TEST_CASE("property: closed, adjacent, every arc once; encodings agree") {
    for (u64 seed = 0; seed < 30; ++seed) {
      u64 r = 1 + seed % 25, c = 1 + (seed * 7) % 27;
      HostGrid hg = generate(r, c, Model::tree, seed);
      Coord root{1 + seed % r, 1 + (seed * 3) % c};
      int h = 1 + int(seed % 3);
      auto t = tour(hg, root, h);
      REQUIRE(is_euler_tour(hg, z_index(r, c, root), t));
      REQUIRE(t == ref_euler(hg, root));
      REQUIRE(tour(hg, root, h, true) == t);
    }
  }

  TEST_CASE("entry capacity") {
    for (int h : {1, 2, 3}) {
      ClusterScheme s(40, 40, h);
      for (u64 q = 0; q < s.num_clusters(); ++q) CHECK(entry_points(s, s.at_rank(q)).size() <= entry_capacity(h));
    }
  }

  TEST_CASE("non-trees are rejected") {
    HostGrid cyc(2, 2, Encoding::unweighted_directed);
    for (auto [c, d] : {std::pair<Coord, int>{{1, 1}, E}, {{1, 1}, S}, {{1, 2}, S}, {{2, 1}, E}}) {
      cyc.add_edge(c, d);
      Coord o;
      neighbour(2, 2, c, d, o);
      cyc.add_edge(o, opposite(d));
    }
    SimDisk sim(testutil::small_cfg());
    GridGraph g = store_grid(sim, "c", cyc, Order::z_order);
    CHECK_THROWS_AS(euler_tour(g), std::invalid_argument);
    HostGrid split(1, 3, Encoding::unweighted_directed);
    split.add_edge({1, 1}, E);
    split.add_edge({1, 2}, W);
    SimDisk sim2(testutil::small_cfg());
    GridGraph s2 = store_grid(sim2, "s", split, Order::z_order);
    CHECK_THROWS_AS(euler_tour(s2), std::invalid_argument);
  }
}
