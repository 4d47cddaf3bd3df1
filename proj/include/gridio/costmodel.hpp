#pragma once

#include <string>
#include <vector>

#include "gridio/clusters.hpp"

namespace gridio {

/// Exact fraction with a positive denominator, always reduced.
class Rational {
 public:
  Rational(i64 num = 0, i64 den = 1);
  i64 num() const { return num_; }
  i64 den() const { return den_; }
  double to_double() const { return double(num_) / double(den_); }
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  Rational& operator+=(Rational b) { return *this = *this + b; }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend auto operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }

 private:
  i64 num_, den_;
};

enum class CostAlg { sssp, bfs, mst_aware, mst_oblivious, toposort, tfp, euler, euler_full_ids, tfp_pq_baseline };
std::string to_string(CostAlg a);
CostAlg parse_cost_alg(const std::string& s);
std::vector<CostAlg> all_cost_algs();

struct CostParams {
  u64 n = 0;
  u64 m = 0;  // memory bytes
  u64 b = 0;  // block bytes
  int h = 0;
};

/// n = 2^40, M = 2^31, B = 2^17 and the per-algorithm cluster level.
CostParams reference_params(CostAlg a);
/// Cluster level the implementation picks for a square grid of n vertices: auto_h.
CostParams desk_params(CostAlg a, u64 n, const SimConfig& cfg);

struct CostOptions {
  bool minor_terms = false;  // include the small terms dropped by default
};

struct CostPhase {
  std::string name;
  Rational volume;  // bytes per vertex
};

struct IoCostReport {
  CostAlg alg;
  CostParams params;
  std::vector<CostPhase> phases;
  Rational total;    // sum of phases
  Rational io_size;  // input + output bytes per vertex
  Rational ratio;    // total / io_size
  bool small_regime = false;  // cache-aware MST with U' in memory
  /// Predicted bytes transferred for the whole run.
  double predicted_bytes() const { return total.to_double() * double(params.n); }
};

IoCostReport volume_model(CostAlg a, const CostParams& p, const CostOptions& opt = {});

}  // namespace gridio
