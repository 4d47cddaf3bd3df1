#include "gridio/oracle.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <queue>

namespace gridio {

namespace {

void check_size(const HostGrid& g) {
  if (g.n() > kOracleMaxVertices) throw std::invalid_argument("instance too large for the in-memory oracle");
}

u64 zi(const HostGrid& g, u64 row_major) { return z_index(g.rows, g.cols, g.coord(row_major)); }

std::vector<u64> to_z(const HostGrid& g, const std::vector<u64>& by_row) {
  std::vector<u64> out(by_row.size());
  for (u64 i = 0; i < by_row.size(); ++i) out[zi(g, i)] = by_row[i];
  return out;
}

template <class F>
void for_out(const HostGrid& g, u64 i, F&& f) {
  const VertexRecord& r = g.v[i];
  Coord c = g.coord(i), o;
  for (int d = 0; d < 8; ++d)
    if (r.has(d) && neighbour(g.rows, g.cols, c, d, o)) f(d, g.idx(o), r.w[d]);
}

u64 weight_of(const HostGrid& g, u64 w) {
  return g.encoding == Encoding::unweighted_directed ? 1 : w;
}

}  // namespace

LabelOracle builtin_oracle(const std::string& name) {
  if (name == "indegree") return [](Coord, std::span<const u64> in) -> u64 { return in.size(); };
  if (name == "longest_path")
    return [](Coord, std::span<const u64> in) -> u64 {
      u64 best = 0;
      for (u64 x : in) best = std::max(best, x + 1);
      return best;
    };
  if (name == "path_count")
    return [](Coord, std::span<const u64> in) -> u64 {
      if (in.empty()) return 1;
      return std::accumulate(in.begin(), in.end(), u64(0));  // wraps mod 2^64
    };
  throw std::invalid_argument("unknown oracle: " + name);
}

std::vector<u64> ref_sssp(const HostGrid& g, Coord s) {
  check_size(g);
  std::vector<u64> dist(g.n(), kInfinity);
  using Item = std::pair<u64, u64>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[g.idx(s)] = 0;
  pq.push({0, g.idx(s)});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for_out(g, u, [&](int, u64 v, u64 w) {
      u64 nd = d + weight_of(g, w);
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    });
  }
  return to_z(g, dist);
}

namespace {
std::pair<std::vector<u64>, std::vector<u64>> bfs_impl(const HostGrid& g, Coord s) {
  check_size(g);
  std::vector<u64> dist(g.n(), kInfinity), order;
  std::deque<u64> q{g.idx(s)};
  dist[g.idx(s)] = 0;
  while (!q.empty()) {
    u64 u = q.front();
    q.pop_front();
    order.push_back(zi(g, u));
    for_out(g, u, [&](int, u64 v, u64) {
      if (dist[v] == kInfinity) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    });
  }
  return {to_z(g, dist), order};
}
}  // namespace

std::vector<u64> ref_bfs_dist(const HostGrid& g, Coord s) { return bfs_impl(g, s).first; }
std::vector<u64> ref_bfs_order(const HostGrid& g, Coord s) { return bfs_impl(g, s).second; }

MstSolution ref_mst(const HostGrid& g) {
  check_size(g);
  std::vector<WeightedEdge> all;
  for (u64 i = 0; i < g.n(); ++i)
    for_out(g, i, [&](int, u64 j, u64 w) {
      u64 a = zi(g, i), b = zi(g, j);
      if (a < b) all.push_back({a, b, w});
    });
  std::sort(all.begin(), all.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    return std::tie(x.w, x.a, x.b) < std::tie(y.w, y.a, y.b);
  });
  std::vector<u64> parent(g.n());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](u64 x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  MstSolution out;
  for (const auto& e : all) {
    u64 ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    out.edges.push_back(e);
    out.weight += e.w;
  }
  if (g.n() > 0 && out.edges.size() != g.n() - 1) throw std::invalid_argument("graph is disconnected");
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::vector<u64> ref_toposort(const HostGrid& g) {
  check_size(g);
  std::vector<u32> indeg(g.n(), 0);
  for (u64 i = 0; i < g.n(); ++i) for_out(g, i, [&](int, u64 j, u64) { ++indeg[j]; });
  using Item = std::pair<u64, u64>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (u64 i = 0; i < g.n(); ++i)
    if (!indeg[i]) ready.push({zi(g, i), i});
  std::vector<u64> order;
  while (!ready.empty()) {
    auto [z, u] = ready.top();
    ready.pop();
    order.push_back(z);
    for_out(g, u, [&](int, u64 v, u64) {
      if (--indeg[v] == 0) ready.push({zi(g, v), v});
    });
  }
  if (order.size() != g.n()) throw std::invalid_argument("graph has a cycle");
  return order;
}

std::vector<u64> ref_tfp(const HostGrid& g, const LabelOracle& phi) {
  auto order = ref_toposort(g);
  std::vector<u64> label(g.n(), 0);  // by Z-index
  std::vector<u64> in;
  for (u64 z : order) {
    Coord c = index_to_coord(Order::z_order, g.rows, g.cols, z), x;
    in.clear();
    for (int d = 0; d < 8; ++d)
      if (neighbour(g.rows, g.cols, c, d, x) && g.at(x).has(opposite(d))) in.push_back(label[z_index(g.rows, g.cols, x)]);
    label[z] = phi(c, in);
  }
  return label;
}

bool is_spanning_tree(const HostGrid& g) {
  u64 half = 0;
  for (u64 i = 0; i < g.n(); ++i) {
    Coord c = g.coord(i), o;
    for (int d = 0; d < 8; ++d) {
      if (!g.v[i].has(d)) continue;
      if (!neighbour(g.rows, g.cols, c, d, o) || !g.at(o).has(opposite(d))) return false;
      ++half;
    }
  }
  if (half != 2 * (g.n() - 1)) return false;
  std::vector<bool> seen(g.n(), false);
  std::vector<u64> st{0};
  seen[0] = true;
  u64 count = 1;
  while (!st.empty()) {
    u64 u = st.back();
    st.pop_back();
    for_out(g, u, [&](int, u64 v, u64) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        st.push_back(v);
      }
    });
  }
  return count == g.n();
}

std::vector<u64> ref_euler(const HostGrid& g, Coord root) {
  check_size(g);
  if (!is_spanning_tree(g)) throw std::invalid_argument("input is not a tree");
  std::vector<u64> tour{z_index(g.rows, g.cols, root)};
  u64 steps = 2 * (g.n() - 1);
  Coord v = root;
  int from = NW;  // root scans from north
  for (u64 k = 0; k < steps; ++k) {
    const VertexRecord& r = g.at(v);
    int d = from;
    do d = (d + 1) & 7;
    while (!r.has(d));
    Coord o;
    neighbour(g.rows, g.cols, v, d, o);
    v = o;
    from = opposite(d);
    tour.push_back(z_index(g.rows, g.cols, v));
  }
  return tour;
}

RefSolution reference_solve(Problem p, const HostGrid& g, const RefParams& params) {
  switch (p) {
    case Problem::sssp: return {p, ref_sssp(g, params.source)};
    case Problem::bfs_order: return {p, ref_bfs_order(g, params.source)};
    case Problem::mst: return {p, ref_mst(g)};
    case Problem::toposort: return {p, ref_toposort(g)};
    case Problem::tfp: return {p, ref_tfp(g, builtin_oracle(params.oracle))};
    case Problem::euler: return {p, ref_euler(g, params.source)};
  }
  throw std::logic_error("problem");
}

}  // namespace gridio
