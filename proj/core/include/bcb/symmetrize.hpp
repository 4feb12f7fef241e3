#ifndef BCB_SYMMETRIZE_HPP
#define BCB_SYMMETRIZE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bcb/channel.hpp"
#include "bcb/probkit.hpp"

namespace bcb {

// Mod-shift randomization of a source p(U,V,T,W1,W2,X). The starred
// distribution lives on {Ustar, Vstar, Tstar, W1star, W2star, X} where
//   W1star = (w1, i, k)  flattened as (w1 * m1 + i) * m3 + k,
//   W2star = (w2, j, k)  flattened as (w2 * m2 + j) * m3 + k,
// and cells whose two k coordinates disagree carry structural zeros. The
// shifts make (Ustar, Vstar, Tstar) exactly uniform while preserving every
// mutual-information term of the rate bounds.
struct StarConstruction {
  JointPmf source;  // over {U, V, T, W1, W2, X}
  JointPmf result;  // over {Ustar, Vstar, Tstar, W1star, W2star, X}
  int m1, m2, m3;   // |U|, |V|, |T|
  int w1_card, w2_card;
};

StarConstruction star(const JointPmf& source);

// Negative-control construction: the U-shift is applied but its record in
// W1star is collapsed to i = 0, so the mixing is not invertible. Still a
// valid pmf, but identities and MI preservation fail macroscopically.
// Guards the verifiers against passing vacuously.
StarConstruction star_corrupted(const JointPmf& source);

// Cellwise check of the construction identities. Entry k holds the max
// absolute deviation of identity eq(k+1); eq1 is uniformity of
// (Ustar,Vstar,Tstar), eq2..eq10 relate starred marginals to shifted
// source marginals. All are finite rearrangements, so they hold to
// essentially machine precision on any valid source.
struct IdentityReport {
  std::array<double, 10> max_dev{};
  static constexpr double kTol = 1e-12;

  double worst() const;
  bool pass(double tol = kTol) const { return worst() <= tol; }
};

IdentityReport verify_marginal_identities(const StarConstruction& s);

// The 14 preserved conditional mutual informations, evaluated on both the
// source and the starred distribution with the channel attached.
struct MiEqualityReport {
  struct Entry {
    std::string name;
    double starred = 0.0;
    double source = 0.0;
    double dev = 0.0;
  };
  std::vector<Entry> entries;
  static constexpr double kTol = 1e-9;

  double worst() const;
  bool pass(double tol = kTol) const { return worst() <= tol; }
};

MiEqualityReport verify_mi_equalities(const StarConstruction& s,
                                      const Channel& ch);

// --- Substitution embeddings ----------------------------------------------

// W := (T, W1, W2) relabeling of p(U,V,T,W1,W2,X); the Bound-2 polytope of
// the result contains the NJ polytope of the input, per distribution.
JointPmf embed_nj_in_bound2(const JointPmf& p);

// U' := (U,W), V' := (V,W), T' := W with constant W1', W2'. Requires X to
// be a deterministic function of (U,V,W); lift stochastic inputs with
// q_augment first. After removing the two redundant single-rate rows, the
// NJ polytope of the result matches the Bound-2 polytope of the input
// row for row.
JointPmf embed_bound2_in_nj(const JointPmf& p);

// Tags of the two rows made redundant by nonnegativity of rates under the
// embedding above.
const std::vector<std::string>& nj_redundant_row_tags();

// Deterministic-X lift: adjoins Q distributed as X | (U,V,W), enlarging U
// to U' = (U,Q) with |Q| = |X|, and sets X = Q. The (V,W,X) marginal and
// the (U,V,W,X) joint (after dropping the Q coordinate) are preserved
// exactly.
JointPmf q_augment(const JointPmf& p);

// True iff every (U,...,X)-slice of p puts positive mass on at most one x.
bool x_is_deterministic(const JointPmf& p);

// W := constant extension of p(U,V,X); the R0 = 0 slice of the UVW
// polytope of the result coincides with the UV polytope of the input.
JointPmf embed_uv_in_uvw(const JointPmf& p);

// U' := (U,W), V' := (V,W) merge of p(U,V,W,X); the UV polytope of the
// result contains the R0 = 0 slice of the UVW polytope of the input.
JointPmf embed_uvw_in_uv(const JointPmf& p);

// --- Batched verification over seeded random fixtures -----------------------

// Worst-case deviations over `fixtures` random sources and embeddings.
// Tolerances: identities 1e-12, MI equalities 1e-9, polytope containment
// violations 1e-8, row agreement 1e-9.
struct SymmetrizationReport {
  int fixtures = 0;
  std::array<double, 10> identity_worst{};  // eq1..eq10, cellwise deviation
  std::vector<std::pair<std::string, double>> mi_worst;  // 14 equalities
  double nj_in_bound2_violation = 0.0;  // Bound-1-in-Bound-2 containment
  bool redundancy_ok = true;            // redu rows removable everywhere
  double bound2_in_nj_row_gap = 0.0;    // reduced-row agreement, bits
  double uv_in_uvw_violation = 0.0;     // R0 = 0 slice containments
  double uvw_in_uv_violation = 0.0;

  double identity_max() const;
  double mi_max() const;
  bool pass() const;
};

// Runs the star verifiers and all four embeddings on `fixtures` seeded
// random sources. `aux_cards` gives the cardinalities of U, V, T, W1, W2
// for the star sources (X matches the channel input). With `corrupt` set,
// the star construction is replaced by the negative control, which must
// drive the report to failure.
SymmetrizationReport verify_symmetrization(
    const Channel& ch, int fixtures, std::uint64_t seed,
    const std::array<int, 5>& aux_cards = {2, 2, 2, 2, 2},
    bool corrupt = false);

}  // namespace bcb

#endif  // BCB_SYMMETRIZE_HPP
