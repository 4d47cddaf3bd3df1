#include "gridio/costmodel.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace gridio {

Rational::Rational(i64 num, i64 den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) num = -num, den = -den;
  i64 g = std::gcd(num, den);
  num_ = num / (g ? g : 1);
  den_ = den / (g ? g : 1);
}

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(__int128 num, __int128 den) {
  __int128 g = gcd128(num, den);
  if (g > 1) num /= g, den /= g;
  constexpr __int128 lim = std::numeric_limits<i64>::max();
  if (num > lim || -num > lim || den > lim || -den > lim) throw std::overflow_error("rational overflow");
  return Rational(static_cast<i64>(num), static_cast<i64>(den));
}

}  // namespace

Rational operator+(Rational a, Rational b) {
  return make(__int128(a.num_) * b.den_ + __int128(b.num_) * a.den_, __int128(a.den_) * b.den_);
}
Rational operator-(Rational a, Rational b) {
  return make(__int128(a.num_) * b.den_ - __int128(b.num_) * a.den_, __int128(a.den_) * b.den_);
}
Rational operator*(Rational a, Rational b) { return make(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_); }
Rational operator/(Rational a, Rational b) {
  if (b.num_ == 0) throw std::domain_error("division by zero");
  return make(__int128(a.num_) * b.den_, __int128(a.den_) * b.num_);
}

std::string Rational::str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

std::string to_string(CostAlg a) {
  switch (a) {
    case CostAlg::sssp: return "sssp";
    case CostAlg::bfs: return "bfs";
    case CostAlg::mst_aware: return "mst_cache_aware";
    case CostAlg::mst_oblivious: return "mst_cache_oblivious";
    case CostAlg::toposort: return "toposort";
    case CostAlg::tfp: return "tfp";
    case CostAlg::euler: return "euler";
    case CostAlg::euler_full_ids: return "euler_full_ids";
    case CostAlg::tfp_pq_baseline: return "tfp_pq_baseline";
  }
  return "?";
}

std::vector<CostAlg> all_cost_algs() {
  return {CostAlg::sssp,     CostAlg::bfs, CostAlg::mst_aware, CostAlg::mst_oblivious,  CostAlg::toposort,
          CostAlg::tfp,      CostAlg::euler, CostAlg::euler_full_ids, CostAlg::tfp_pq_baseline};
}

CostAlg parse_cost_alg(const std::string& s) {
  for (CostAlg a : all_cost_algs())
    if (to_string(a) == s) return a;
  if (s == "mst") return CostAlg::mst_aware;
  throw std::invalid_argument("unknown algorithm: " + s);
}

namespace {

std::optional<Alg> impl_alg(CostAlg a) {
  switch (a) {
    case CostAlg::sssp: return Alg::sssp;
    case CostAlg::bfs: return Alg::bfs;
    case CostAlg::mst_aware: return Alg::mst_aware;
    case CostAlg::toposort: return Alg::toposort;
    case CostAlg::tfp: return Alg::tfp;
    case CostAlg::euler:
    case CostAlg::euler_full_ids: return Alg::euler;
    default: return std::nullopt;
  }
}

}  // namespace

CostParams reference_params(CostAlg a) {
  CostParams p{u64(1) << 40, u64(1) << 31, u64(1) << 17, 12};
  if (a == CostAlg::toposort) p.h = 14;
  if (a == CostAlg::tfp) p.h = 13;
  if (a == CostAlg::euler || a == CostAlg::euler_full_ids) p.h = 15;
  return p;
}

CostParams desk_params(CostAlg a, u64 n, const SimConfig& cfg) {
  CostParams p{n, cfg.memory_bytes, cfg.block_bytes, 1};
  u64 side = 1;
  while (side * side < n) ++side;
  if (auto ia = impl_alg(a)) p.h = auto_h(cfg, *ia, side, side);
  return p;
}

IoCostReport volume_model(CostAlg a, const CostParams& p, const CostOptions& opt) {
  if (p.n == 0 || p.b == 0 || p.m == 0) throw std::invalid_argument("n, M and B must be positive");
  if (p.m < p.b) throw std::invalid_argument("memory smaller than one block");
  if (p.h < 1 || p.h > 40) throw std::invalid_argument("h out of range");
  if (auto ia = impl_alg(a); ia && working_set(*ia, p.h) > p.m)
    throw std::invalid_argument("h=" + std::to_string(p.h) + " does not fit in memory for " + to_string(a));

  IoCostReport r{a, p, {}, {}, {}, {}, false};
  const i64 side = i64(1) << p.h;
  // one random block access per separator vertex: 4n/2^h blocks of B bytes
  const Rational ra(4 * i64(p.b), side);
  const bool minor = opt.minor_terms;
  auto phase = [&](std::string name, Rational v) { r.phases.push_back({std::move(name), v}); };

  switch (a) {
    case CostAlg::sssp: {
      phase("read input, write G'", Rational(64) + 128);
      phase("separator Dijkstra: G' once, D twice per access", Rational(128) + ra * 4);
      phase("read input, write distances", Rational(64) + 8 + (minor ? Rational(32, side) : 0));
      r.io_size = 64 + 8;
      break;
    }
    case CostAlg::bfs: {
      phase("read input, write G'", Rational(1) + 64);
      phase("boundary distances: G' once, D twice per access", Rational(64) + ra * 4);
      phase("read input", Rational(1) + (minor ? Rational(32, side) : 0));
      phase("write chunks", 1);
      phase("emit: chunk reads, stacks, output", Rational(1) + ra * Rational(5, 4) + 16 + 8);
      r.io_size = 1 + 8;
      break;
    }
    case CostAlg::mst_aware: {
      Rational u_prime(1024, side);  // bytes per vertex of U'
      r.small_regime = (u_prime * Rational(i64(p.n))) <= Rational(i64(p.m / 2));
      phase("read input, write U'", Rational(32) + (minor ? u_prime : 0));
      if (r.small_regime) phase("MST of U' in memory", minor ? u_prime : 0);
      else phase("MST of U' with random access", ra * 7);
      phase("read input, write output", Rational(32) + 32);
      r.io_size = 32 + 32;
      break;
    }
    case CostAlg::mst_oblivious: {
      phase("read input", 32);
      phase("expansions stack write and read", 96);
      phase("write output", 32);
      r.io_size = 32 + 32;
      break;
    }
    case CostAlg::toposort: {
      phase("read input, write G'", Rational(1) + 2);
      phase("number G'", ra + (minor ? Rational(3 * 32, side) : 0));
      phase("read input, write chunks", Rational(1) + 4);
      phase("emit: chunk starts, chunk reads, output", ra + 4 + 8);
      r.io_size = 1 + 8;
      break;
    }
    case CostAlg::tfp: {
      phase("read input, write G'", Rational(1) + 2);
      phase("number G'", ra + (minor ? Rational(3 * 32, side) : 0));
      phase("read input, write chunks with message space", Rational(1) + 42);
      phase("evaluate: chunks, labels, messages, six random accesses per chunk", Rational(42) + 12 + 24 + ra * 6);
      phase("read L, write labels", Rational(12) + 8);
      r.io_size = 1 + 8;
      break;
    }
    case CostAlg::euler:
    case CostAlg::euler_full_ids: {
      bool ids = a == CostAlg::euler_full_ids;
      Rational out = ids ? Rational(16) : Rational(2);
      phase("read input", Rational(1) + (minor ? Rational(48, side) : 0));
      phase("chain segments", ra);
      phase("read input, write chunks", Rational(1) + 2);
      phase("emit: chunk starts, chunk reads, output", ra + 2 + out);
      r.io_size = Rational(1) + out;
      break;
    }
    case CostAlg::tfp_pq_baseline: {
      // estimate: three-pass merge sorts and a three-level priority queue
      phase("sort input into topological order", Rational(9) + 40 + 2 * 80);
      phase("priority-queue time-forward pass", Rational(288) + 56);
      phase("sort labels into vertex order", Rational(6 * 16) - 8);
      r.io_size = 1 + 8;
      break;
    }
  }
  for (const auto& ph : r.phases) r.total += ph.volume;
  r.ratio = r.total / r.io_size;
  return r;
}

}  // namespace gridio
