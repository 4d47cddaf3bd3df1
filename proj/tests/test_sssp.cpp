#include <cstring>

#include "doctest.h"
#include "gridio/oracle.hpp"
#include "gridio/sssp.hpp"
#include "helpers.hpp"

using namespace gridio;

namespace {

std::vector<u64> run(const HostGrid& hg, Coord s, int h, bool hier, SimConfig cfg = testutil::small_cfg()) {
  SimDisk sim(cfg);
  GridGraph g = store_grid(sim, "in", hg, Order::z_order);
  SsspOptions o;
  o.h = h;
  auto r = hier ? sssp_hierarchical(g, s, o) : sssp_simple(g, s, o);
  return result_u64(sim, r.output);
}

}  // namespace

TEST_SUITE("sssp") {
  TEST_CASE("hierarchy levels") {
    CHECK(build_hierarchy(12, u64(1) << 20, u64(1) << 20).levels == std::vector<int>{12, 15, 30});
    CHECK(build_hierarchy(2, 32, 32).levels == std::vector<int>{2, 5});
    CHECK(build_hierarchy(3, 8, 8).k() == 0);
  }

  TEST_CASE("degenerate cases") {
    HostGrid one(1, 1, Encoding::weighted_directed);
    CHECK(run(one, {1, 1}, 1, false) == std::vector<u64>{0});
    HostGrid hg = generate(6, 7, Model::weighted_directed, 2);
    CHECK(run(hg, {3, 3}, 3, false) == ref_sssp(hg, {3, 3}));  // one cluster
    CHECK(run(hg, {3, 3}, 3, true) == ref_sssp(hg, {3, 3}));
    auto d = run(hg, {2, 5}, 1, false);
    CHECK(d[z_index(6, 7, {2, 5})] == 0);
  }

  TEST_CASE("random 32x32, h=2") {
    HostGrid hg = generate(32, 32, Model::weighted_directed, 17);
    auto ref = ref_sssp(hg, {5, 9});
    CHECK(run(hg, {5, 9}, 2, false) == ref);
    CHECK(run(hg, {5, 9}, 2, true) == ref);
  }

  TEST_CASE("64x64, hierarchical, h0=2") {
    HostGrid hg = generate(64, 64, Model::weighted_directed, 23);
    CHECK(run(hg, {40, 3}, 2, true, SimConfig{64, 4096}) == ref_sssp(hg, {40, 3}));
  }

  TEST_CASE("property: both solvers agree bit for bit, with zero weights") {
    for (u64 seed = 0; seed < 30; ++seed) {
      GenOptions go;
      go.max_weight = seed % 3 == 0 ? 2 : u64(1) << 20;  // many zero-weight edges when small
      u64 r = 1 + seed % 23, c = 1 + (seed * 5) % 19;
      HostGrid hg = generate(r, c, seed % 2 ? Model::weighted_directed : Model::weighted_dag, seed, go);
      Coord s{1 + seed % r, 1 + (seed * 7) % c};
      int h = 1 + int(seed % 3);
      auto a = run(hg, s, h, false), b = run(hg, s, h, true);
      REQUIRE(a == b);
      REQUIRE(a == ref_sssp(hg, s));
    }
  }

  TEST_CASE("property: finalized separator estimates are exact") {
    for (u64 seed = 0; seed < 10; ++seed) {
      HostGrid hg = generate(20, 20, Model::weighted_directed, seed);
      Coord s{1 + seed, 20 - seed};
      SimDisk sim(testutil::small_cfg());
      GridGraph g = store_grid(sim, "in", hg, Order::z_order);
      SsspOptions o;
      o.h = 2;
      sssp_simple(g, s, o);
      auto ref = ref_sssp(hg, s);
      ClusterScheme cs(20, 20, 2);
      const auto& raw = sim.raw(sim.file("sssp.D"));
      for (u64 hn = 0; hn < cs.hnum_space(); ++hn) {
        if (!cs.hnum_valid(hn)) continue;
        u64 e;
        std::memcpy(&e, raw.data() + 8 * hn, 8);
        if (DistanceFile::final(e)) REQUIRE(DistanceFile::value(e) == ref[z_index(20, 20, cs.hnum_coord(hn))]);
      }
    }
  }

  TEST_CASE("property: h0-cluster calls stay linear in the separator size") {
    std::vector<double> per;
    for (u64 side : {32, 64, 128}) {
      HostGrid hg = generate(side, side, Model::weighted_directed, 3);
      SimDisk sim(SimConfig{256, 65536});
      GridGraph g = store_grid(sim, "in", hg, Order::z_order);
      SsspOptions o;
      o.h = 2;
      auto r = sssp_hierarchical(g, {1, 1}, o);
      per.push_back(double(r.stats.h0_calls) / double(r.stats.separator_vertices));
    }
    for (double x : per) CHECK(x <= 4.0);
  }

  TEST_CASE("property: bytes per vertex bounded across n") {
    std::vector<double> per;
    for (u64 side : {32, 64, 128, 256}) {
      SimDisk sim(SimConfig{256, 65536});
      GridGraph g = store_grid(sim, "in", generate(side, side, Model::weighted_directed, 1), Order::z_order);
      sim.reset_counters();
      sssp_hierarchical(g, {1, 1});
      sim.flush();
      per.push_back(double(sim.counters().bytes_transferred) / double(side * side));
    }
    auto [lo, hi] = std::minmax_element(per.begin(), per.end());
    CHECK(*hi <= 2.0 * *lo);
  }

  TEST_CASE("errors") {
    SimDisk sim(testutil::small_cfg());
    GridGraph g = store_grid(sim, "u", generate(4, 4, Model::unit_directed, 1), Order::z_order);
    CHECK_THROWS_AS(sssp_simple(g, {1, 1}), std::invalid_argument);
    GridGraph w = store_grid(sim, "w", generate(4, 4, Model::weighted_directed, 1), Order::z_order);
    CHECK_THROWS(sssp_simple(w, {5, 1}));
  }
}
