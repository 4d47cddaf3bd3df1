#include "doctest.h"
#include "gridio/costmodel.hpp"

using namespace gridio;

namespace {

IoCostReport at_reference(CostAlg a) { return volume_model(a, reference_params(a)); }

}  // namespace

TEST_SUITE("costmodel") {
  TEST_CASE("rational arithmetic") {
    CHECK(Rational(6, 4) == Rational(3, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)).str() == "1/2");
    CHECK((Rational(904) / Rational(72)).str() == "113/9");
    CHECK(Rational(3).str() == "3");
    CHECK_THROWS(Rational(1, 0));
    CHECK(Rational(1, 3) < Rational(1, 2));
  }

  TEST_CASE("totals and ratios at the reference configuration") {
    struct Want {
      CostAlg a;
      i64 total, io;
    };
    for (auto [a, total, io] : {Want{CostAlg::sssp, 904, 72}, Want{CostAlg::bfs, 828, 9},
                                Want{CostAlg::mst_aware, 992, 64}, Want{CostAlg::mst_oblivious, 160, 64},
                                Want{CostAlg::toposort, 84, 9}, Want{CostAlg::tfp, 592, 9},
                                Want{CostAlg::euler, 40, 3}, Want{CostAlg::tfp_pq_baseline, 641, 9}}) {
      auto r = at_reference(a);
      CAPTURE(to_string(a));
      CHECK(r.total == Rational(total));
      CHECK(r.io_size == Rational(io));
      CHECK(r.ratio == Rational(total, io));
      Rational sum;
      for (auto& p : r.phases) sum += p.volume;
      CHECK(sum == r.total);
    }
    CHECK(at_reference(CostAlg::sssp).ratio < Rational(13));
    CHECK(at_reference(CostAlg::bfs).ratio < Rational(100));
    CHECK(at_reference(CostAlg::mst_oblivious).ratio == Rational(5, 2));
  }

  TEST_CASE("cluster levels at the reference configuration") {
    CHECK(reference_params(CostAlg::sssp).h == 12);
    CHECK(reference_params(CostAlg::toposort).h == 14);
    CHECK(reference_params(CostAlg::euler).h == 15);
    CHECK(reference_params(CostAlg::sssp).n == u64(1) << 40);
  }

  TEST_CASE("full vertex ids in the Euler output") {
    // 8-byte ids replace 1-byte steps in both the last phase and the output size
    auto r = at_reference(CostAlg::euler_full_ids);
    CHECK(r.total == Rational(54));
    CHECK(r.ratio == Rational(54, 17));
    CHECK(r.ratio < at_reference(CostAlg::euler).ratio);
  }

  TEST_CASE("cache-aware MST with U' in memory") {
    CostParams p = reference_params(CostAlg::mst_aware);
    p.n = u64(1) << 32;
    auto r = volume_model(CostAlg::mst_aware, p);
    CHECK(r.small_regime);
    CHECK(r.ratio == Rational(3, 2));
    CHECK_FALSE(at_reference(CostAlg::mst_aware).small_regime);
  }

  TEST_CASE("runtime configuration and errors") {
    SimConfig cfg{256, 65536};
    for (CostAlg a : all_cost_algs()) {
      auto p = desk_params(a, u64(1) << 20, cfg);
      CHECK(p.h >= 1);
      auto r = volume_model(a, p);
      CHECK(r.total > Rational(0));
      CHECK(r.predicted_bytes() > 0.0);
      CHECK(parse_cost_alg(to_string(a)) == a);
    }
    CostParams bad = reference_params(CostAlg::sssp);
    bad.h = 14;
    CHECK_THROWS_AS(volume_model(CostAlg::sssp, bad), std::invalid_argument);
    bad.h = 12;
    bad.m = bad.b / 2;
    CHECK_THROWS(volume_model(CostAlg::sssp, bad));
    CHECK_THROWS(parse_cost_alg("quicksort"));
  }

  TEST_CASE("minor terms only add volume") {
    for (CostAlg a : all_cost_algs()) {
      CostOptions o;
      o.minor_terms = true;
      CHECK(volume_model(a, reference_params(a), o).total >= at_reference(a).total);
    }
  }
}
