#include <benchmark/benchmark.h>

#include "gridio/clusters.hpp"

using namespace gridio;

namespace {

// args: grid side, h, parallel
void BM_BuildSeparator(benchmark::State& st) {
  u64 side = u64(st.range(0));
  int h = int(st.range(1));
  bool parallel = st.range(2) != 0;
  HostGrid hg = generate(side, side, Model::weighted_directed, 7);
  for (auto _ : st) {
    SimDisk sim(SimConfig{256, 1 << 20});
    GridGraph g = store_grid(sim, "in", hg, Order::z_order);
    SepOptions o;
    o.parallel = parallel;
    auto gp = build_separator_graph(g, h, SepMode::weighted_distance, o);
    benchmark::DoNotOptimize(gp.file);
  }
  st.SetItemsProcessed(int64_t(st.iterations()) * int64_t(side * side));
}

void BM_BoundaryPayload(benchmark::State& st) {
  int h = int(st.range(0));
  bool parallel = st.range(1) != 0;
  u64 side = u64(1) << h;
  HostGrid hg = generate(side, side, Model::weighted_directed, 11);
  SimDisk sim(SimConfig{256, 1 << 20});
  GridGraph g = store_grid(sim, "in", hg, Order::z_order);
  ClusterScheme s(side, side, h);
  InMemoryCluster c = load_cluster(g, s, s.at_rank(0));
  for (auto _ : st) benchmark::DoNotOptimize(boundary_payload(c, s, SepMode::weighted_distance, parallel));
}

}  // namespace

BENCHMARK(BM_BuildSeparator)->ArgsProduct({{128, 256}, {4, 5}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundaryPayload)->ArgsProduct({{4, 5, 6}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
