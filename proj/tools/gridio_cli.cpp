#include <bit>
#include <chrono>
#include <iomanip>
#include <filesystem>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "gridio/costmodel.hpp"
#include "gridio/euler.hpp"
#include "gridio/mst.hpp"
#include "gridio/tfp.hpp"
#include "json.hpp"

using namespace gridio;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInstance = 2, kMismatch = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto usage_parse(F f, const std::string& s) {
  try {
    return f(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

/// Accepts plain integers and powers written as 2^k.
u64 parse_size(const std::string& s) {
  static const std::regex pow_re(R"((\d+)\^(\d+))");
  std::smatch m;
  try {
    if (std::regex_match(s, m, pow_re)) {
      u64 base = std::stoull(m[1]), e = std::stoull(m[2]), v = 1;
      for (u64 i = 0; i < e; ++i) {
        if (v > ~u64(0) / std::max<u64>(base, 1)) throw UsageError("size overflows 64 bits: " + s);
        v *= base;
      }
      return v;
    }
    size_t used = 0;
    u64 v = std::stoull(s, &used);
    if (used != s.size()) throw UsageError("not a size: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("not a size: " + s);
  }
}

Coord parse_coord(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw UsageError("expected row,col: " + s);
  return {parse_size(s.substr(0, comma)), parse_size(s.substr(comma + 1))};
}

struct Common {
  std::string mem = "65536", block = "256", h = "auto", out, report = "json", workspace;

  void add(CLI::App* app, bool with_out = true) {
    app->add_option("--mem", mem, "memory size M in bytes (integer or 2^k)");
    app->add_option("--block", block, "block size B in bytes (integer or 2^k)");
    app->add_option("--h", h, "cluster level: auto or an integer");
    if (with_out) app->add_option("--out", out, "output artifact path");
    app->add_option("--report", report, "report format")->check(CLI::IsMember({"json", "table"}));
    app->add_option("--workspace", workspace, "directory receiving every simulated file of the run");
  }

  SimConfig config() const {
    SimConfig c{parse_size(block), parse_size(mem)};
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return c;
  }

  int level() const {
    if (h == "auto") return 0;
    u64 v = parse_size(h);
    if (v < 1 || v > 31) throw UsageError("--h must be auto or in [1, 31]");
    return int(v);
  }
};

void emit(const ordered_json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::function<void(const ordered_json&, const std::string&)> rec = [&](const ordered_json& v, const std::string& pre) {
    for (const auto& [k, x] : v.items()) {
      std::string key = pre.empty() ? k : pre + "." + k;
      if (x.is_object()) rec(x, key);
      else std::cout << std::left << std::setw(34) << key << " " << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
    }
  };
  rec(j, "");
}

ordered_json counters_json(const IoCounters& c) {
  return {{"blocks_read", c.blocks_read},           {"blocks_written", c.blocks_written},
          {"sequential_blocks", c.sequential_blocks}, {"random_blocks", c.random_blocks},
          {"bytes_transferred", c.bytes_transferred}};
}

GridGraph load_grid(SimDisk& sim, const std::string& path, const std::string& name = "input") {
  FileId f = sim.open_file(name);
  sim.set_raw(f, load_file(path));
  return open_grid(sim, f);
}

void dump_workspace(const SimDisk& sim, const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  for (const auto& name : sim.file_names()) save_file((std::filesystem::path(dir) / name).string(), sim.raw(sim.file(name)));
}

int cmd_gen(const Common& c, u64 rows, u64 cols, u64 seed, const std::string& model, const std::string& order,
            bool distinct) {
  if (c.out.empty()) throw UsageError("gen needs --out");
  SimDisk sim(c.config());
  GenOptions go;
  go.distinct_weights = distinct;
  Model md = usage_parse(parse_model, model);
  Order od = usage_parse(parse_order, order);
  HostGrid hg = generate(rows, cols, md, seed, go);
  GridGraph g = store_grid(sim, "grid", hg, od);
  save_file(c.out, sim.raw(g.file));
  emit({{"command", "gen"},
        {"rows", rows},
        {"cols", cols},
        {"model", model},
        {"seed", seed},
        {"order", order},
        {"encoding", to_string(g.header.encoding)},
        {"edges", hg.edge_count()},
        {"output", c.out}},
       c.report);
  return kOk;
}

int cmd_convert(const Common& c, const std::string& in, const std::string& order) {
  if (c.out.empty()) throw UsageError("convert needs --out");
  SimDisk sim(c.config());
  GridGraph g = load_grid(sim, in);
  Order target = usage_parse(parse_order, order);
  if (g.header.order == target) throw std::invalid_argument("input is already in " + order + " order");
  sim.reset_counters();
  auto t0 = std::chrono::steady_clock::now();
  GridGraph out = convert_order(g, target, "converted");
  sim.flush();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_file(c.out, sim.raw(out.file));
  dump_workspace(sim, c.workspace);
  emit({{"command", "convert"},
        {"from", to_string(g.header.order)},
        {"to", order},
        {"n", g.n()},
        {"counters", counters_json(sim.counters())},
        {"wall_seconds", secs},
        {"output", c.out}},
       c.report);
  return kOk;
}

struct RunArgs {
  std::string input, variant, oracle = "longest_path", source = "1,1";
  bool parallel = false, full_ids = false;
};

int cmd_run(const std::string& alg, const Common& c, const RunArgs& a) {
  if (!a.variant.empty() && alg != "sssp" && alg != "mst") throw UsageError("--variant applies to sssp and mst only");
  SimConfig cfg = c.config();
  int h = c.level();
  SimDisk sim(cfg);
  GridGraph g = load_grid(sim, a.input);
  if (g.header.order != Order::z_order) throw std::invalid_argument("algorithms need a Z-order grid; run convert first");
  Coord src = parse_coord(a.source);
  sim.reset_counters();
  ordered_json stats;
  FileId out;
  std::string variant = a.variant;
  auto t0 = std::chrono::steady_clock::now();
  if (alg == "sssp") {
    if (variant.empty()) variant = "simple";
    SsspOptions o;
    o.h = h;
    o.parallel = a.parallel;
    SsspResult r;
    if (variant == "simple") r = sssp_simple(g, src, o);
    else if (variant == "hierarchical") r = sssp_hierarchical(g, src, o);
    else throw UsageError("sssp variants: simple, hierarchical");
    out = r.output;
    stats = {{"h", r.stats.h}, {"finalizations", r.stats.finalizations}, {"separator_vertices", r.stats.separator_vertices}};
    if (variant == "hierarchical") stats["h0_calls"] = r.stats.h0_calls;
  } else if (alg == "bfs") {
    BfsOptions o;
    o.h = h;
    o.parallel = a.parallel;
    auto r = bfs(g, src, o);
    out = r.output;
    stats = {{"h", r.stats.h}, {"chunks", r.stats.chunks}, {"emitted", r.stats.emitted},
             {"max_live_stacks", r.stats.max_live_stacks}, {"sort_passes", r.stats.sort.passes}};
  } else if (alg == "mst") {
    if (variant.empty()) variant = "aware";
    MstOptions o;
    o.h = h;
    MstResult r;
    if (variant == "aware") r = mst_cache_aware(g, o);
    else if (variant == "oblivious") r = mst_cache_oblivious(g, o);
    else throw UsageError("mst variants: aware, oblivious");
    out = r.output;
    stats = {{"weight", r.weight}, {"edges", r.edges}};
    if (variant == "aware") stats["h"] = r.h;
    else stats.update({{"expansion_bytes", r.expansion_bytes}, {"connection_bytes", r.connection_bytes}});
  } else if (alg == "toposort") {
    TopoOptions o;
    o.h = h;
    o.parallel = a.parallel;
    auto r = toposort(g, o);
    out = r.output;
    stats = {{"h", r.stats.h}, {"separator_vertices", r.stats.separator_vertices}, {"chunks", r.stats.chunks},
             {"rounds", r.stats.rounds}, {"leftover_components", r.stats.leftover_components}};
  } else if (alg == "tfp") {
    TfpOptions o;
    o.h = h;
    o.parallel = a.parallel;
    auto r = tfp(g, builtin_oracle(a.oracle), o);
    out = r.output;
    stats = {{"h", r.stats.h},           {"oracle", a.oracle},           {"chunks", r.stats.chunks},
             {"inter_slots", r.stats.inter_slots}, {"intra_slots", r.stats.intra_slots}, {"messages", r.stats.messages}};
  } else if (alg == "euler") {
    EulerOptions o;
    o.h = h;
    o.root = src;
    o.full_ids = a.full_ids;
    auto r = euler_tour(g, o);
    out = r.output;
    stats = {{"h", r.stats.h}, {"segments", r.stats.segments}, {"steps", r.stats.steps}};
  }
  sim.flush();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!c.out.empty()) save_file(c.out, sim.raw(out));
  dump_workspace(sim, c.workspace);

  ordered_json files = ordered_json::object();
  for (const auto& name : sim.file_names()) {
    IoCounters fc = sim.file_counters(sim.file(name));
    if (fc.bytes_transferred) files[name] = counters_json(fc);
  }
  ordered_json rep = {{"algorithm", alg}};
  if (!variant.empty()) rep["variant"] = variant;
  rep["instance"] = {{"path", a.input}, {"rows", g.header.rows}, {"cols", g.header.cols},
                     {"encoding", to_string(g.header.encoding)}, {"n", g.n()}};
  rep["config"] = {{"memory_bytes", cfg.memory_bytes}, {"block_bytes", cfg.block_bytes}};
  rep["stats"] = stats;
  rep["counters"] = counters_json(sim.counters());
  rep["bytes_per_vertex"] = double(sim.counters().bytes_transferred) / double(g.n());
  rep["files"] = files;
  rep["wall_seconds"] = secs;
  if (!c.out.empty()) rep["output"] = c.out;
  emit(rep, c.report);
  return kOk;
}

struct VerifyArgs {
  std::string input, result, alg, oracle = "longest_path", source = "1,1";
};

/// "exact" when the artifact equals the oracle's answer, "valid" when it differs
/// but still satisfies the problem, "mismatch" otherwise.
std::string verdict(const VerifyArgs& a, const HostGrid& hg, const SimDisk& sim, FileId res, ordered_json& info) {
  Coord src = parse_coord(a.source);
  auto zc = [&](u64 z) { return index_to_coord(Order::z_order, hg.rows, hg.cols, z); };
  if (a.alg == "sssp") {
    auto got = result_u64(sim, res), want = ref_sssp(hg, src);
    return got == want ? "exact" : "mismatch";
  }
  if (a.alg == "bfs") {
    auto got = result_u64(sim, res), want = ref_bfs_order(hg, src);
    if (got == want) return "exact";
    auto dist = ref_bfs_dist(hg, src);
    std::vector<u64> a1 = got, a2 = want;
    std::sort(a1.begin(), a1.end());
    std::sort(a2.begin(), a2.end());
    if (a1 != a2) return "mismatch";
    for (size_t i = 1; i < got.size(); ++i)
      if (dist[got[i - 1]] > dist[got[i]]) return "mismatch";
    return "valid";
  }
  if (a.alg == "mst") {
    auto got = read_mst(sim, res);
    auto want = ref_mst(hg);
    u64 w = 0;
    for (const auto& e : got) w += e.w;
    info["weight"] = w;
    info["oracle_weight"] = want.weight;
    std::sort(got.begin(), got.end());
    if (got == want.edges) return "exact";
    HostGrid t(hg.rows, hg.cols, hg.encoding);
    for (const auto& e : got) {
      Coord x = zc(e.a), y = zc(e.b);
      int d = direction_of(int(y.row) - int(x.row), int(y.col) - int(x.col));
      if (d < 0 || !hg.at(x).has(d) || hg.at(x).w[d] != e.w) return "mismatch";
      t.add_edge(x, d, e.w);
    }
    return is_spanning_tree(t) && w == want.weight ? "valid" : "mismatch";
  }
  if (a.alg == "toposort") {
    auto got = result_u64(sim, res), want = ref_toposort(hg);
    if (got == want) return "exact";
    if (got.size() != hg.n()) return "mismatch";
    std::vector<u64> pos(hg.n(), kInfinity);
    for (u64 i = 0; i < got.size(); ++i) {
      if (got[i] >= hg.n() || pos[got[i]] != kInfinity) return "mismatch";
      pos[got[i]] = i;
    }
    for (u64 i = 0; i < hg.n(); ++i) {
      Coord c = hg.coord(i), o;
      for (int d = 0; d < 8; ++d)
        if (hg.v[i].has(d) && neighbour(hg.rows, hg.cols, c, d, o) &&
            pos[z_index(hg.rows, hg.cols, c)] > pos[z_index(hg.rows, hg.cols, o)])
          return "mismatch";
    }
    return "valid";
  }
  if (a.alg == "tfp") {
    info["oracle"] = a.oracle;
    return result_u64(sim, res) == ref_tfp(hg, builtin_oracle(a.oracle)) ? "exact" : "mismatch";
  }
  if (a.alg == "euler") return read_euler(sim, res) == ref_euler(hg, src) ? "exact" : "mismatch";
  throw UsageError("unknown --alg for verify: " + a.alg);
}

int cmd_verify(const Common& c, const VerifyArgs& a) {
  SimDisk sim(c.config());
  HostGrid hg = load_host(load_grid(sim, a.input));
  FileId res = sim.open_file("result");
  sim.set_raw(res, load_file(a.result));
  ordered_json info = {{"command", "verify"}, {"algorithm", a.alg}, {"instance", a.input}, {"result", a.result}};
  std::string v = verdict(a, hg, sim, res, info);
  info["verdict"] = v;
  emit(info, c.report);
  return v == "mismatch" ? kMismatch : kOk;
}

struct CostArgs {
  std::string alg = "sssp", n = "2^40";
  bool minor = false, reference = false;
};

ordered_json cost_json(const IoCostReport& r) {
  ordered_json phases = ordered_json::array();
  for (const auto& p : r.phases) phases.push_back({{"phase", p.name}, {"volume_per_n", p.volume.str()}});
  return {{"algorithm", to_string(r.alg)},
          {"n", r.params.n},
          {"memory_bytes", r.params.m},
          {"block_bytes", r.params.b},
          {"h", r.params.h},
          {"phases", phases},
          {"total_per_n", r.total.str()},
          {"io_size_per_n", r.io_size.str()},
          {"ratio", r.ratio.str()},
          {"ratio_decimal", r.ratio.to_double()},
          {"small_regime", r.small_regime}};
}

void cost_table(const IoCostReport& r) {
  std::cout << to_string(r.alg) << "  n=" << r.params.n << " M=" << r.params.m << " B=" << r.params.b
            << " h=" << r.params.h << (r.small_regime ? "  (U' fits in memory)" : "") << "\n";
  for (const auto& p : r.phases)
    std::cout << "  " << std::left << std::setw(72) << p.name << std::right << std::setw(10) << p.volume.str() << " n\n";
  std::cout << "  " << std::left << std::setw(72) << "total" << std::right << std::setw(10) << r.total.str() << " n\n";
  std::cout << "  " << std::left << std::setw(72) << "input + output" << std::right << std::setw(10) << r.io_size.str()
            << " n\n";
  std::cout << "  ratio " << r.ratio.str() << " = " << r.ratio.to_double() << "\n";
}

int cmd_costmodel(const Common& c, const CostArgs& a) {
  std::vector<CostAlg> algs;
  if (a.alg == "all") algs = all_cost_algs();
  else algs = {usage_parse(parse_cost_alg, a.alg)};
  // no tall-cache check here: the reference parameters themselves have M < B^2
  u64 m = parse_size(c.mem), b = parse_size(c.block), n = parse_size(a.n);
  CostOptions opt{a.minor};
  ordered_json all = ordered_json::array();
  for (CostAlg alg : algs) {
    CostParams p{n, m, b, 0};
    if (a.reference) p = reference_params(alg);
    if (c.h == "auto" && !a.reference) {
      if (!std::has_single_bit(b)) throw UsageError("block size must be a power of two");
      p.h = desk_params(alg, n, SimConfig{b, m}).h;
    } else if (c.h != "auto") {
      p.h = c.level();
    }
    auto r = volume_model(alg, p, opt);
    if (c.report == "table") cost_table(r);
    else all.push_back(cost_json(r));
  }
  if (c.report == "json") std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"I/O-efficient grid graph algorithms on a simulated disk"};
  app.set_help_flag("--help", "print help");  // -h would clash with the cluster level option
  app.require_subcommand(1);
  Common common;

  u64 rows = 0, cols = 0, seed = 1;
  std::string model = "weighted_directed", order = "z_order";
  bool distinct = false;
  auto* gen = app.add_subcommand("gen", "generate a seeded instance");
  common.add(gen);
  gen->add_option("--rows", rows)->required();
  gen->add_option("--cols", cols)->required();
  gen->add_option("--seed", seed);
  gen->add_option("--model", model,
                  "weighted_dag|weighted_undirected|weighted_directed|unit_directed|tree|planar_dag");
  gen->add_option("--order", order, "row_major|col_major|z_order");
  gen->add_flag("--distinct", distinct, "distinct edge weights");

  std::string in;
  auto* conv = app.add_subcommand("convert", "permute a grid file into another vertex order");
  common.add(conv);
  conv->add_option("input", in)->required();
  conv->add_option("--order", order)->required();

  RunArgs run;
  std::vector<std::pair<std::string, CLI::App*>> algs;
  for (const char* name : {"sssp", "bfs", "mst", "toposort", "tfp", "euler"}) {
    auto* s = app.add_subcommand(name, std::string("run ") + name);
    common.add(s);
    s->add_option("input", run.input, "grid file")->required();
    s->add_option("--variant", run.variant, "simple|hierarchical (sssp), aware|oblivious (mst)");
    s->add_option("--source", run.source, "source or root vertex as row,col");
    s->add_flag("--parallel", run.parallel, "OpenMP separator construction");
    if (std::string(name) == "tfp") s->add_option("--oracle", run.oracle, "indegree|longest_path|path_count");
    if (std::string(name) == "euler") s->add_flag("--full-ids", run.full_ids, "write vertex ids instead of steps");
    algs.push_back({name, s});
  }

  VerifyArgs ver;
  auto* vf = app.add_subcommand("verify", "compare a result file with the in-memory oracle");
  common.add(vf, false);
  vf->add_option("input", ver.input, "grid file")->required();
  vf->add_option("result", ver.result, "result file")->required();
  vf->add_option("--alg", ver.alg)->required()->check(CLI::IsMember({"sssp", "bfs", "mst", "toposort", "tfp", "euler"}));
  vf->add_option("--oracle", ver.oracle);
  vf->add_option("--source", ver.source);

  CostArgs cost;
  auto* cm = app.add_subcommand("costmodel", "analytic I/O volume per phase");
  common.add(cm, false);
  cm->add_option("--alg", cost.alg, "algorithm name or all");
  cm->add_option("--n", cost.n, "number of vertices (integer or 2^k)");
  cm->add_flag("--minor", cost.minor, "include lower-order terms");
  cm->add_flag("--reference", cost.reference, "n=2^40, M=2^31, B=2^17 with the per-algorithm h");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(common, rows, cols, seed, model, order, distinct);
    if (conv->parsed()) return cmd_convert(common, in, order);
    if (vf->parsed()) return cmd_verify(common, ver);
    if (cm->parsed()) return cmd_costmodel(common, cost);
    for (auto& [name, s] : algs)
      if (s->parsed()) return cmd_run(name, common, run);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInstance;
  }
  return kUsage;
}
