#ifndef BCB_PROBKIT_HPP
#define BCB_PROBKIT_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcb/rng.hpp"

namespace bcb {

class Channel;

// A named finite random variable: identifier plus alphabet size.
struct VarLabel {
  std::string name;
  int card = 1;

  friend bool operator==(const VarLabel&, const VarLabel&) = default;
};

// Dense joint pmf over an ordered list of named variables. Mass is stored
// row-major with the first variable slowest. Immutable after construction;
// all operations return new values. Entries must be nonnegative and sum to
// one within kNormTol.
class JointPmf {
 public:
  static constexpr double kNormTol = 1e-12;

  JointPmf(std::vector<VarLabel> vars, std::vector<double> mass);

  static JointPmf uniform(std::vector<VarLabel> vars);
  static JointPmf random(std::vector<VarLabel> vars, Rng& rng);

  const std::vector<VarLabel>& vars() const { return vars_; }
  std::span<const double> mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }

  // Position of a named variable; throws std::invalid_argument if absent.
  std::size_t index_of(std::string_view name) const;
  bool has_var(std::string_view name) const;
  int card_of(std::string_view name) const;

  // Flat index from a multi-index given in variable order.
  std::size_t flat_index(std::span<const int> coords) const;
  double at(std::span<const int> coords) const;

  // Stride of variable v in the flat layout.
  std::size_t stride(std::size_t var_pos) const { return strides_[var_pos]; }

 private:
  std::vector<VarLabel> vars_;
  std::vector<double> mass_;
  std::vector<std::size_t> strides_;
};

// Sum out every variable not in `keep`. The result's variable order is the
// order of `keep`, which may also be used to permute.
JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep);

// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const JointPmf& p);

// I(A;B|C) in bits, computed as H(A,C) + H(B,C) - H(A,B,C) - H(C).
// A, B, C must be pairwise disjoint; C may be empty. Clamped to >= 0.
double cond_mutual_info(const JointPmf& p, const std::vector<std::string>& a,
                        const std::vector<std::string>& b,
                        const std::vector<std::string>& c = {});

// Extend a pmf containing X by the broadcast kernel: the output carries
// variables Y and Z appended after the existing ones, with
// mass(..., x, y, z) = mass(..., x) * p(y, z | x).
JointPmf attach_channel(const JointPmf& aux, const Channel& ch);

// Flatten the listed variables into a single variable named `merged_name`,
// mixed-radix with the first listed variable slowest. The merged variable
// takes the position of the first listed one.
JointPmf merge_vars(const JointPmf& p, const std::vector<std::string>& names,
                    const std::string& merged_name);

JointPmf rename_var(const JointPmf& p, std::string_view old_name,
                    const std::string& new_name);

// Append an independent point-mass variable (card `card`, all mass at 0).
JointPmf add_constant_var(const JointPmf& p, const std::string& name,
                          int card = 1);

}  // namespace bcb

#endif  // BCB_PROBKIT_HPP
