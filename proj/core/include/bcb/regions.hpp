#ifndef BCB_REGIONS_HPP
#define BCB_REGIONS_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "bcb/probkit.hpp"

namespace bcb {

struct RatePoint {
  double r0 = 0.0, r1 = 0.0, r2 = 0.0;

  double dot(const std::array<double, 3>& w) const {
    return w[0] * r0 + w[1] * r1 + w[2] * r2;
  }
};

struct PolyRow {
  std::array<double, 3> coeffs{};  // over (R0, R1, R2)
  double rhs = 0.0;
  std::string tag;
};

// An inequality system in (R0, R1, R2) with nonnegativity of all rates
// implicit. Every builder in this module emits rows with coefficients in
// {0,1} and rhs >= 0, so the origin is always feasible.
class Polytope3 {
 public:
  Polytope3() = default;
  explicit Polytope3(std::vector<PolyRow> rows) : rows_(std::move(rows)) {}

  const std::vector<PolyRow>& rows() const { return rows_; }
  void add_row(PolyRow row) { rows_.push_back(std::move(row)); }

  // Rows grouped by coefficient pattern, rhs sorted ascending within each
  // group. Two polytopes describe the same inequality system iff these
  // maps agree.
  std::map<std::array<double, 3>, std::vector<double>> rows_by_pattern() const;

  Polytope3 without_tags(const std::vector<std::string>& tags) const;

 private:
  std::vector<PolyRow> rows_;
};

inline constexpr double kFeasSlack = 1e-9;   // vertex feasibility slack
inline constexpr double kVertexDedup = 1e-8; // vertex identity radius
inline constexpr double kContainSlack = 1e-8;

// All vertices of {r >= 0} intersected with the rows, by solving every
// 3-subset of planes (rows plus coordinate planes) and filtering by
// feasibility. Throws if some coordinate direction is uncapped.
std::vector<RatePoint> vertices(const Polytope3& p);

// Support function: max of w . r over the polytope, with the attaining
// vertex (ties broken toward the lexicographically smallest vertex).
// Requires w >= 0 componentwise and w != 0.
std::pair<double, RatePoint> support_value(const Polytope3& p,
                                           const std::array<double, 3>& w);

struct ContainsReport {
  bool ok = true;
  double worst_violation = 0.0;  // max over (inner vertex, outer row)
  RatePoint vertex;
  std::string row_tag;
};

// True iff every vertex of `inner` satisfies every row of `outer` with
// slack >= -kContainSlack.
ContainsReport contains(const Polytope3& outer, const Polytope3& inner);

// True iff removing the named rows leaves the vertex set unchanged.
bool redundancy_check(const Polytope3& p, const std::vector<std::string>& tags);

// The R0 = 0 slice as a Polytope3: R0 coefficients are zeroed (rows that
// become vacuous are dropped) and a row "R0 <= 0" is added.
Polytope3 slice_r0_zero(const Polytope3& p);

// --- Per-distribution bound polytopes ------------------------------------
//
// Each builder takes a joint pmf that already carries the channel outputs
// (see attach_channel) and evaluates one rate polytope. min{.,.} terms are
// expanded into one row per branch.

// 12 rows over {U, V, T, W1, W2, X, Y, Z}.
Polytope3 nj_polytope(const JointPmf& p);

// 10 rows over {U, V, W, X, Y, Z}.
Polytope3 bound2_polytope(const JointPmf& p);

// Same shape as bound2_polytope, with the sum-rate private terms
// I(U;Y|V,W), I(V;Z|U,W) replaced by I(X;Y|V,W), I(X;Z|U,W).
Polytope3 uvw_polytope(const JointPmf& p);

// 5 rows over {U, V, X, Y, Z}; the common-message rate is pinned by an
// explicit "R0 <= 0" row.
Polytope3 uv_polytope(const JointPmf& p);

}  // namespace bcb

#endif  // BCB_REGIONS_HPP
