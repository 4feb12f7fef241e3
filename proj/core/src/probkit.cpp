#include "bcb/probkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bcb/channel.hpp"

namespace bcb {

namespace {

std::vector<std::size_t> compute_strides(const std::vector<VarLabel>& vars) {
  std::vector<std::size_t> strides(vars.size(), 1);
  for (std::size_t i = vars.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * static_cast<std::size_t>(vars[i].card);
  }
  return strides;
}

std::size_t total_cells(const std::vector<VarLabel>& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) n *= static_cast<std::size_t>(v.card);
  return n;
}

}  // namespace

JointPmf::JointPmf(std::vector<VarLabel> vars, std::vector<double> mass)
    : vars_(std::move(vars)), mass_(std::move(mass)) {
  if (vars_.empty()) throw std::invalid_argument("JointPmf: no variables");
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].card < 1)
      throw std::invalid_argument("JointPmf: cardinality of '" +
                                  vars_[i].name + "' must be >= 1");
    for (std::size_t j = i + 1; j < vars_.size(); ++j) {
      if (vars_[i].name == vars_[j].name)
        throw std::invalid_argument("JointPmf: duplicate variable '" +
                                    vars_[i].name + "'");
    }
  }
  if (mass_.size() != total_cells(vars_))
    throw std::invalid_argument("JointPmf: mass size does not match alphabet");
  double sum = 0.0;
  for (double v : mass_) {
    if (v < 0.0)
      throw std::invalid_argument("JointPmf: negative mass entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormTol)
    throw std::invalid_argument("JointPmf: mass sums to " +
                                std::to_string(sum) + ", not 1");
  strides_ = compute_strides(vars_);
}

JointPmf JointPmf::uniform(std::vector<VarLabel> vars) {
  const std::size_t n = total_cells(vars);
  return JointPmf(std::move(vars),
                  std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointPmf JointPmf::random(std::vector<VarLabel> vars, Rng& rng) {
  const std::size_t n = total_cells(vars);
  return JointPmf(std::move(vars), rng.simplex_point(n));
}

std::size_t JointPmf::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  throw std::invalid_argument("JointPmf: unknown variable '" +
                              std::string(name) + "'");
}

bool JointPmf::has_var(std::string_view name) const {
  return std::any_of(vars_.begin(), vars_.end(),
                     [&](const VarLabel& v) { return v.name == name; });
}

int JointPmf::card_of(std::string_view name) const {
  return vars_[index_of(name)].card;
}

std::size_t JointPmf::flat_index(std::span<const int> coords) const {
  if (coords.size() != vars_.size())
    throw std::invalid_argument("JointPmf: coordinate arity mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] < 0 || coords[i] >= vars_[i].card)
      throw std::out_of_range("JointPmf: coordinate out of range");
    idx += static_cast<std::size_t>(coords[i]) * strides_[i];
  }
  return idx;
}

double JointPmf::at(std::span<const int> coords) const {
  return mass_[flat_index(coords)];
}

JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep) {
  std::vector<std::size_t> keep_pos;
  keep_pos.reserve(keep.size());
  std::vector<VarLabel> out_vars;
  out_vars.reserve(keep.size());
  for (const auto& name : keep) {
    const std::size_t pos = p.index_of(name);
    if (std::find(keep_pos.begin(), keep_pos.end(), pos) != keep_pos.end())
      throw std::invalid_argument("marginalize: repeated variable '" + name +
                                  "'");
    keep_pos.push_back(pos);
    out_vars.push_back(p.vars()[pos]);
  }

  std::vector<std::size_t> out_strides = [&] {
    std::vector<std::size_t> s(out_vars.size(), 1);
    for (std::size_t i = out_vars.size(); i-- > 1;)
      s[i - 1] = s[i] * static_cast<std::size_t>(out_vars[i].card);
    return s;
  }();
  std::size_t out_cells = 1;
  for (const auto& v : out_vars) out_cells *= static_cast<std::size_t>(v.card);

  // For each source cell, the target flat index is a dot product of the
  // kept coordinates with the output strides; walk the source odometer
  // incrementally instead of decoding every cell.
  const auto& vars = p.vars();
  std::vector<int> coord(vars.size(), 0);
  std::vector<std::size_t> contrib(vars.size(), 0);
  for (std::size_t k = 0; k < keep_pos.size(); ++k)
    contrib[keep_pos[k]] = out_strides[k];

  std::vector<double> out(out_cells, 0.0);
  const auto mass = p.mass();
  std::size_t out_idx = 0;
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    out[out_idx] += mass[cell];
    for (std::size_t d = vars.size(); d-- > 0;) {
      if (++coord[d] < vars[d].card) {
        out_idx += contrib[d];
        break;
      }
      coord[d] = 0;
      out_idx -= contrib[d] * static_cast<std::size_t>(vars[d].card - 1);
    }
  }
  return JointPmf(std::move(out_vars), std::move(out));
}

double entropy(const JointPmf& p) {
  double h = 0.0;
  for (double q : p.mass()) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h < 0.0 ? 0.0 : h;
}

double cond_mutual_info(const JointPmf& p, const std::vector<std::string>& a,
                        const std::vector<std::string>& b,
                        const std::vector<std::string>& c) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("cond_mutual_info: A and B must be nonempty");
  auto overlap = [](const std::vector<std::string>& s,
                    const std::vector<std::string>& t) {
    for (const auto& x : s)
      for (const auto& y : t)
        if (x == y) return true;
    return false;
  };
  if (overlap(a, b) || overlap(a, c) || overlap(b, c))
    throw std::invalid_argument(
        "cond_mutual_info: argument sets must be pairwise disjoint");

  auto join = [](const std::vector<std::string>& s,
                 const std::vector<std::string>& t) {
    std::vector<std::string> out(s.begin(), s.end());
    out.insert(out.end(), t.begin(), t.end());
    return out;
  };

  const std::vector<std::string> ac = join(a, c);
  const std::vector<std::string> bc = join(b, c);
  const std::vector<std::string> abc = join(join(a, b), c);

  double mi = entropy(marginalize(p, ac)) + entropy(marginalize(p, bc)) -
              entropy(marginalize(p, abc));
  if (!c.empty()) mi -= entropy(marginalize(p, c));
  return mi < 0.0 ? 0.0 : mi;
}

JointPmf attach_channel(const JointPmf& aux, const Channel& ch) {
  const std::size_t x_pos = aux.index_of("X");
  if (aux.vars()[x_pos].card != ch.x_card())
    throw std::invalid_argument("attach_channel: |X| mismatch with kernel");
  if (aux.has_var("Y") || aux.has_var("Z"))
    throw std::invalid_argument("attach_channel: Y or Z already present");

  std::vector<VarLabel> out_vars = aux.vars();
  out_vars.push_back({"Y", ch.y_card()});
  out_vars.push_back({"Z", ch.z_card()});

  const std::size_t n_yz =
      static_cast<std::size_t>(ch.y_card()) * ch.z_card();
  const auto mass = aux.mass();
  std::vector<double> out(mass.size() * n_yz);
  const std::size_t x_stride = aux.stride(x_pos);
  const int x_card = ch.x_card();
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    const int x = static_cast<int>((cell / x_stride) % x_card);
    const double m = mass[cell];
    const double* row = ch.row(x);
    double* dst = out.data() + cell * n_yz;
    for (std::size_t yz = 0; yz < n_yz; ++yz) dst[yz] = m * row[yz];
  }
  return JointPmf(std::move(out_vars), std::move(out));
}

JointPmf merge_vars(const JointPmf& p, const std::vector<std::string>& names,
                    const std::string& merged_name) {
  if (names.empty())
    throw std::invalid_argument("merge_vars: nothing to merge");
  std::vector<std::size_t> merge_pos;
  for (const auto& n : names) merge_pos.push_back(p.index_of(n));

  int merged_card = 1;
  for (std::size_t pos : merge_pos) merged_card *= p.vars()[pos].card;

  std::vector<VarLabel> out_vars;
  std::vector<std::size_t> out_pos_of_src(p.vars().size(), SIZE_MAX);
  for (std::size_t i = 0; i < p.vars().size(); ++i) {
    if (i == merge_pos.front()) {
      out_vars.push_back({merged_name, merged_card});
    } else if (std::find(merge_pos.begin(), merge_pos.end(), i) ==
               merge_pos.end()) {
      out_vars.push_back(p.vars()[i]);
    }
  }

  std::vector<std::size_t> out_strides(out_vars.size(), 1);
  for (std::size_t i = out_vars.size(); i-- > 1;)
    out_strides[i - 1] = out_strides[i] * static_cast<std::size_t>(out_vars[i].card);

  // Per-source-variable contribution to the output flat index.
  std::size_t merged_out_pos = 0;
  for (std::size_t i = 0; i < out_vars.size(); ++i)
    if (out_vars[i].name == merged_name) merged_out_pos = i;
  std::vector<std::size_t> contrib(p.vars().size(), 0);
  {
    // Mixed radix within the merged variable: first listed slowest.
    std::size_t radix = 1;
    for (std::size_t k = merge_pos.size(); k-- > 0;) {
      contrib[merge_pos[k]] = radix * out_strides[merged_out_pos];
      radix *= static_cast<std::size_t>(p.vars()[merge_pos[k]].card);
    }
    std::size_t out_i = 0;
    for (std::size_t i = 0; i < p.vars().size(); ++i) {
      if (std::find(merge_pos.begin(), merge_pos.end(), i) != merge_pos.end())
        continue;
      if (out_i == merged_out_pos) ++out_i;
      contrib[i] = out_strides[out_i++];
    }
  }

  std::size_t out_cells = 1;
  for (const auto& v : out_vars) out_cells *= static_cast<std::size_t>(v.card);
  std::vector<double> out(out_cells, 0.0);
  const auto mass = p.mass();
  const auto& vars = p.vars();
  std::vector<int> coord(vars.size(), 0);
  std::size_t out_idx = 0;
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    out[out_idx] += mass[cell];
    for (std::size_t d = vars.size(); d-- > 0;) {
      if (++coord[d] < vars[d].card) {
        out_idx += contrib[d];
        break;
      }
      coord[d] = 0;
      out_idx -= contrib[d] * static_cast<std::size_t>(vars[d].card - 1);
    }
  }
  return JointPmf(std::move(out_vars), std::move(out));
}

JointPmf rename_var(const JointPmf& p, std::string_view old_name,
                    const std::string& new_name) {
  std::vector<VarLabel> vars = p.vars();
  vars[p.index_of(old_name)].name = new_name;
  return JointPmf(std::move(vars),
                  std::vector<double>(p.mass().begin(), p.mass().end()));
}

JointPmf add_constant_var(const JointPmf& p, const std::string& name,
                          int card) {
  if (card < 1) throw std::invalid_argument("add_constant_var: card >= 1");
  std::vector<VarLabel> vars = p.vars();
  vars.push_back({name, card});
  std::vector<double> mass(p.size() * static_cast<std::size_t>(card), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    mass[i * static_cast<std::size_t>(card)] = p.mass()[i];
  return JointPmf(std::move(vars), std::move(mass));
}

}  // namespace bcb
