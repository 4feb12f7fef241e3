#ifndef BCB_OPTIMIZER_HPP
#define BCB_OPTIMIZER_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bcb/channel.hpp"
#include "bcb/probkit.hpp"
#include "bcb/regions.hpp"

namespace bcb {

enum class BoundKind { nj, bound2, uvw, uv };

std::string to_string(BoundKind kind);
BoundKind bound_kind_from_string(const std::string& name);

// Cardinality assignment for the auxiliaries of one bound kind. With
// x_deterministic (the default) the encoder input is searched over
// deterministic maps x = f(aux) combined with a free joint pmf on the
// auxiliaries; otherwise the joint pmf extends over (aux, X).
struct AuxSpec {
  BoundKind kind = BoundKind::uvw;
  std::map<std::string, int> cards;
  bool x_deterministic = true;

  // uvw/bound2: |W| = |X|+5, |U| = |V| = |X|+1; uv: |U| = |V| = |X|+1;
  // nj: |U| = |V| = |T| = |X|+1, |W1| = |W2| = 2.
  static AuxSpec defaults(BoundKind kind, const Channel& ch);

  // Auxiliary variable order used for the joint simplex layout.
  const std::vector<std::string>& aux_names() const;
  int card_of(const std::string& name) const;
  void validate(const Channel& ch) const;
};

struct OptimizerConfig {
  int restarts = 40;
  int max_iters = 150;
  double step_init = 0.1;
  double fd_step = 1e-5;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency; result is thread-count independent

  void validate() const;
};

// One traced boundary direction: the best support value found, the vertex
// attaining it, and the distribution (over aux and X) that produced it.
struct SupportRecord {
  std::array<double, 3> weight{};
  double value = 0.0;  // bits
  RatePoint argmax;
  JointPmf argmax_joint;  // over aux variables plus X
  std::string digest;     // FNV-1a 64 of the joint mass bytes, hex
  int restarts_to_best = 0;  // 1-based restart index attaining the best
};

struct RegionEstimate {
  std::vector<SupportRecord> records;  // sorted by weight vector
};

// Best weighted support value over cardinality-capped distributions:
// deterministic encoder maps (exhaustive when |X|^cells <= 4096, a seeded
// 512-map sample otherwise) combined with projected-gradient ascent on
// the auxiliary joint pmf from `restarts` scheduled starts. The result is
// a lower bound on the true support value; for a fixed seed, more
// restarts never decrease it.
SupportRecord maximize_support(const Channel& ch, const AuxSpec& spec,
                               const std::array<double, 3>& w,
                               const OptimizerConfig& cfg);

RegionEstimate trace_region(const Channel& ch, const AuxSpec& spec,
                            const std::vector<std::array<double, 3>>& weights,
                            const OptimizerConfig& cfg);

// Empirical saturation check of the auxiliary cardinality caps: support
// values for the base spec against enlarged specs, per weight. Passes iff
// no enlargement gains more than tol_sat bits anywhere.
struct SaturationRow {
  std::array<double, 3> weight{};
  double base_value = 0.0;
  std::vector<double> enlarged_values;
  double max_gap = 0.0;  // max(enlarged) - base
  bool pass = true;
};

struct SaturationTable {
  std::vector<SaturationRow> rows;
  double tol_sat = 5e-3;
  bool pass = true;
};

SaturationTable cardinality_saturation(
    const Channel& ch, const AuxSpec& base,
    const std::vector<AuxSpec>& enlarged,
    const std::vector<std::array<double, 3>>& weights,
    const OptimizerConfig& cfg, double tol_sat = 5e-3);

// Twin optimization of two bound kinds over the same weights.
struct CompareRow {
  std::array<double, 3> weight{};
  double value_a = 0.0;
  double value_b = 0.0;
  double diff = 0.0;  // value_a - value_b
};

struct CompareTable {
  std::vector<CompareRow> rows;
  double max_abs_diff = 0.0;
};

CompareTable compare_bounds(const Channel& ch, const AuxSpec& spec_a,
                            const AuxSpec& spec_b,
                            const std::vector<std::array<double, 3>>& weights,
                            const OptimizerConfig& cfg);

// 13 directions: the 3 axes, 3 face diagonals, the space diagonal, and
// the six (2,1,0)-type directions, each normalized to unit length.
std::vector<std::array<double, 3>> default_weight_fan();

// 9 directions with zero R0 weight: (0, cos t, sin t), t = k*pi/16.
std::vector<std::array<double, 3>> private_weight_fan();

// FNV-1a 64 over the raw bytes of the mass array, as fixed-width hex.
std::string pmf_digest(const JointPmf& p);

}  // namespace bcb

#endif  // BCB_OPTIMIZER_HPP
