#include "bcb/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcb/regions.hpp"
#include "bcb/rng.hpp"

namespace bcb {

namespace {

const std::vector<std::string> kNjVars{"U", "V", "T", "W1", "W2", "X"};
const std::vector<std::string> kWVars{"U", "V", "W", "X"};

// Reorder to a canonical variable order (pure permutation).
JointPmf canonical(const JointPmf& p, const std::vector<std::string>& order,
                   const char* who) {
  if (p.vars().size() != order.size())
    throw std::invalid_argument(std::string(who) + ": expected variables " +
                                [&] {
                                  std::string s;
                                  for (const auto& n : order) s += n + " ";
                                  return s;
                                }());
  for (const auto& n : order) (void)p.index_of(n);
  return marginalize(p, order);
}

StarConstruction star_impl(const JointPmf& source, bool collapse_i) {
  const JointPmf src = canonical(source, kNjVars, "star");
  const int m1 = src.vars()[0].card;
  const int m2 = src.vars()[1].card;
  const int m3 = src.vars()[2].card;
  const int c1 = src.vars()[3].card;
  const int c2 = src.vars()[4].card;
  const int cx = src.vars()[5].card;

  std::vector<VarLabel> out_vars{
      {"Ustar", m1},          {"Vstar", m2},          {"Tstar", m3},
      {"W1star", c1 * m1 * m3}, {"W2star", c2 * m2 * m3}, {"X", cx}};

  const std::size_t d_w1 = static_cast<std::size_t>(c1) * m1 * m3;
  const std::size_t d_w2 = static_cast<std::size_t>(c2) * m2 * m3;
  std::vector<double> out(static_cast<std::size_t>(m1) * m2 * m3 * d_w1 *
                              d_w2 * cx,
                          0.0);
  const double scale = 1.0 / (static_cast<double>(m1) * m2 * m3);

  const auto mass = src.mass();
  auto src_at = [&](int u, int v, int t, int w1, int w2, int x) {
    return mass[((((static_cast<std::size_t>(u) * m2 + v) * m3 + t) * c1 +
                  w1) *
                     c2 +
                 w2) *
                    cx +
                x];
  };

  for (int u = 0; u < m1; ++u)
    for (int v = 0; v < m2; ++v)
      for (int t = 0; t < m3; ++t)
        for (int w1 = 0; w1 < c1; ++w1)
          for (int w2 = 0; w2 < c2; ++w2)
            for (int i = 0; i < m1; ++i)
              for (int j = 0; j < m2; ++j)
                for (int k = 0; k < m3; ++k) {
                  // The corrupted variant forgets the U-shift record: all
                  // mass lands on i = 0 cells, so the mixing is no longer
                  // invertible and the preservation identities fail.
                  const std::size_t w1s =
                      (static_cast<std::size_t>(w1) * m1 +
                       (collapse_i ? 0 : i)) *
                          m3 +
                      k;
                  const std::size_t w2s =
                      (static_cast<std::size_t>(w2) * m2 + j) * m3 + k;
                  for (int x = 0; x < cx; ++x) {
                    const double m =
                        src_at((u + i) % m1, (v + j) % m2, (t + k) % m3, w1,
                               w2, x);
                    if (m == 0.0) continue;
                    const std::size_t idx =
                        ((((static_cast<std::size_t>(u) * m2 + v) * m3 + t) *
                              d_w1 +
                          w1s) *
                             d_w2 +
                         w2s) *
                            cx +
                        x;
                    out[idx] += m * scale;
                  }
                }

  return StarConstruction{src, JointPmf(std::move(out_vars), std::move(out)),
                          m1, m2, m3, c1, c2};
}

}  // namespace

StarConstruction star(const JointPmf& source) {
  return star_impl(source, false);
}

StarConstruction star_corrupted(const JointPmf& source) {
  return star_impl(source, true);
}

double IdentityReport::worst() const {
  return *std::max_element(max_dev.begin(), max_dev.end());
}

IdentityReport verify_marginal_identities(const StarConstruction& s) {
  IdentityReport rep;
  const int m1 = s.m1, m2 = s.m2, m3 = s.m3;
  const int c1 = s.w1_card, c2 = s.w2_card;
  const int cx = s.source.vars()[5].card;
  const double inv_m123 = 1.0 / (static_cast<double>(m1) * m2 * m3);
  const double inv_m13 = 1.0 / (static_cast<double>(m1) * m3);
  const double inv_m23 = 1.0 / (static_cast<double>(m2) * m3);

  auto marg = [](const JointPmf& p, std::vector<std::string> keep) {
    return marginalize(p, keep);
  };

  // eq1: (Ustar, Vstar, Tstar) is exactly uniform.
  {
    const JointPmf m = marg(s.result, {"Ustar", "Vstar", "Tstar"});
    double dev = 0.0;
    for (double q : m.mass()) dev = std::max(dev, std::abs(q - inv_m123));
    rep.max_dev[0] = dev;
  }

  auto w1s_idx = [&](int w1, int i, int k) { return (w1 * m1 + i) * m3 + k; };
  auto w2s_idx = [&](int w2, int j, int k) { return (w2 * m2 + j) * m3 + k; };

  // eq2/eq3: P(Tstar, W*, X) against the k-shifted source marginal.
  {
    const JointPmf lhs = marg(s.result, {"Tstar", "W1star", "X"});
    const JointPmf rhs = marg(s.source, {"T", "W1", "X"});
    double dev = 0.0;
    for (int t = 0; t < m3; ++t)
      for (int w1 = 0; w1 < c1; ++w1)
        for (int i = 0; i < m1; ++i)
          for (int k = 0; k < m3; ++k)
            for (int x = 0; x < cx; ++x) {
              const double l = lhs.at(std::array{t, w1s_idx(w1, i, k), x});
              const double r =
                  inv_m13 * rhs.at(std::array{(t + k) % m3, w1, x});
              dev = std::max(dev, std::abs(l - r));
            }
    rep.max_dev[1] = dev;
  }
  {
    const JointPmf lhs = marg(s.result, {"Tstar", "W2star", "X"});
    const JointPmf rhs = marg(s.source, {"T", "W2", "X"});
    double dev = 0.0;
    for (int t = 0; t < m3; ++t)
      for (int w2 = 0; w2 < c2; ++w2)
        for (int j = 0; j < m2; ++j)
          for (int k = 0; k < m3; ++k)
            for (int x = 0; x < cx; ++x) {
              const double l = lhs.at(std::array{t, w2s_idx(w2, j, k), x});
              const double r =
                  inv_m23 * rhs.at(std::array{(t + k) % m3, w2, x});
              dev = std::max(dev, std::abs(l - r));
            }
    rep.max_dev[2] = dev;
  }

  // eq4/eq5: P(Ustar, W1star, X) and P(Vstar, W2star, X).
  {
    const JointPmf lhs = marg(s.result, {"Ustar", "W1star", "X"});
    const JointPmf rhs = marg(s.source, {"U", "W1", "X"});
    double dev = 0.0;
    for (int u = 0; u < m1; ++u)
      for (int w1 = 0; w1 < c1; ++w1)
        for (int i = 0; i < m1; ++i)
          for (int k = 0; k < m3; ++k)
            for (int x = 0; x < cx; ++x) {
              const double l = lhs.at(std::array{u, w1s_idx(w1, i, k), x});
              const double r =
                  inv_m13 * rhs.at(std::array{(u + i) % m1, w1, x});
              dev = std::max(dev, std::abs(l - r));
            }
    rep.max_dev[3] = dev;
  }
  {
    const JointPmf lhs = marg(s.result, {"Vstar", "W2star", "X"});
    const JointPmf rhs = marg(s.source, {"V", "W2", "X"});
    double dev = 0.0;
    for (int v = 0; v < m2; ++v)
      for (int w2 = 0; w2 < c2; ++w2)
        for (int j = 0; j < m2; ++j)
          for (int k = 0; k < m3; ++k)
            for (int x = 0; x < cx; ++x) {
              const double l = lhs.at(std::array{v, w2s_idx(w2, j, k), x});
              const double r =
                  inv_m23 * rhs.at(std::array{(v + j) % m2, w2, x});
              dev = std::max(dev, std::abs(l - r));
            }
    rep.max_dev[4] = dev;
  }

  // eq6/eq7: joint with Tstar as well.
  {
    const JointPmf lhs = marg(s.result, {"Ustar", "Tstar", "W1star", "X"});
    const JointPmf rhs = marg(s.source, {"U", "T", "W1", "X"});
    double dev = 0.0;
    for (int u = 0; u < m1; ++u)
      for (int t = 0; t < m3; ++t)
        for (int w1 = 0; w1 < c1; ++w1)
          for (int i = 0; i < m1; ++i)
            for (int k = 0; k < m3; ++k)
              for (int x = 0; x < cx; ++x) {
                const double l =
                    lhs.at(std::array{u, t, w1s_idx(w1, i, k), x});
                const double r = inv_m13 * rhs.at(std::array{(u + i) % m1,
                                                             (t + k) % m3,
                                                             w1, x});
                dev = std::max(dev, std::abs(l - r));
              }
    rep.max_dev[5] = dev;
  }
  {
    const JointPmf lhs = marg(s.result, {"Vstar", "Tstar", "W2star", "X"});
    const JointPmf rhs = marg(s.source, {"V", "T", "W2", "X"});
    double dev = 0.0;
    for (int v = 0; v < m2; ++v)
      for (int t = 0; t < m3; ++t)
        for (int w2 = 0; w2 < c2; ++w2)
          for (int j = 0; j < m2; ++j)
            for (int k = 0; k < m3; ++k)
              for (int x = 0; x < cx; ++x) {
                const double l =
                    lhs.at(std::array{v, t, w2s_idx(w2, j, k), x});
                const double r = inv_m23 * rhs.at(std::array{(v + j) % m2,
                                                             (t + k) % m3,
                                                             w2, x});
                dev = std::max(dev, std::abs(l - r));
              }
    rep.max_dev[6] = dev;
  }

  // eq8..eq10: joints carrying both starred W variables; the shared k
  // coordinate forces structural zeros off the diagonal.
  {
    const JointPmf lhs = marg(s.result, {"Tstar", "W1star", "W2star", "X"});
    const JointPmf rhs = marg(s.source, {"T", "W1", "W2", "X"});
    double dev = 0.0;
    for (int t = 0; t < m3; ++t)
      for (int w1 = 0; w1 < c1; ++w1)
        for (int i = 0; i < m1; ++i)
          for (int k = 0; k < m3; ++k)
            for (int w2 = 0; w2 < c2; ++w2)
              for (int j = 0; j < m2; ++j)
                for (int kk = 0; kk < m3; ++kk)
                  for (int x = 0; x < cx; ++x) {
                    const double l = lhs.at(std::array{
                        t, w1s_idx(w1, i, k), w2s_idx(w2, j, kk), x});
                    const double r =
                        (k == kk)
                            ? inv_m123 *
                                  rhs.at(std::array{(t + k) % m3, w1, w2, x})
                            : 0.0;
                    dev = std::max(dev, std::abs(l - r));
                  }
    rep.max_dev[7] = dev;
  }
  {
    const JointPmf lhs =
        marg(s.result, {"Ustar", "Tstar", "W1star", "W2star", "X"});
    const JointPmf rhs = marg(s.source, {"U", "T", "W1", "W2", "X"});
    double dev = 0.0;
    for (int u = 0; u < m1; ++u)
      for (int t = 0; t < m3; ++t)
        for (int w1 = 0; w1 < c1; ++w1)
          for (int i = 0; i < m1; ++i)
            for (int k = 0; k < m3; ++k)
              for (int w2 = 0; w2 < c2; ++w2)
                for (int j = 0; j < m2; ++j)
                  for (int kk = 0; kk < m3; ++kk)
                    for (int x = 0; x < cx; ++x) {
                      const double l = lhs.at(std::array{
                          u, t, w1s_idx(w1, i, k), w2s_idx(w2, j, kk), x});
                      const double r =
                          (k == kk) ? inv_m123 * rhs.at(std::array{
                                                     (u + i) % m1,
                                                     (t + k) % m3, w1, w2, x})
                                    : 0.0;
                      dev = std::max(dev, std::abs(l - r));
                    }
    rep.max_dev[8] = dev;
  }
  {
    const JointPmf lhs =
        marg(s.result, {"Vstar", "Tstar", "W1star", "W2star", "X"});
    const JointPmf rhs = marg(s.source, {"V", "T", "W1", "W2", "X"});
    double dev = 0.0;
    for (int v = 0; v < m2; ++v)
      for (int t = 0; t < m3; ++t)
        for (int w1 = 0; w1 < c1; ++w1)
          for (int i = 0; i < m1; ++i)
            for (int k = 0; k < m3; ++k)
              for (int w2 = 0; w2 < c2; ++w2)
                for (int j = 0; j < m2; ++j)
                  for (int kk = 0; kk < m3; ++kk)
                    for (int x = 0; x < cx; ++x) {
                      const double l = lhs.at(std::array{
                          v, t, w1s_idx(w1, i, k), w2s_idx(w2, j, kk), x});
                      const double r =
                          (k == kk) ? inv_m123 * rhs.at(std::array{
                                                     (v + j) % m2,
                                                     (t + k) % m3, w1, w2, x})
                                    : 0.0;
                      dev = std::max(dev, std::abs(l - r));
                    }
    rep.max_dev[9] = dev;
  }
  return rep;
}

double MiEqualityReport::worst() const {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.dev);
  return w;
}

MiEqualityReport verify_mi_equalities(const StarConstruction& s,
                                      const Channel& ch) {
  const JointPmf src = attach_channel(s.source, ch);
  const JointPmf starred = attach_channel(s.result, ch);

  struct Term {
    std::string name;
    std::vector<std::string> a, b, c;
  };
  const std::vector<Term> terms{
      {"I(T;Y|W1)", {"T"}, {"Y"}, {"W1"}},
      {"I(T;Z|W2)", {"T"}, {"Z"}, {"W2"}},
      {"I(U;Y|W1)", {"U"}, {"Y"}, {"W1"}},
      {"I(V;Z|W2)", {"V"}, {"Z"}, {"W2"}},
      {"I(T,U;Y|W1)", {"T", "U"}, {"Y"}, {"W1"}},
      {"I(T,V;Z|W2)", {"T", "V"}, {"Z"}, {"W2"}},
      {"I(T,W1,W2;Y)", {"T", "W1", "W2"}, {"Y"}, {}},
      {"I(T,W1,W2;Z)", {"T", "W1", "W2"}, {"Z"}, {}},
      {"I(T,W2;Y|W1)", {"T", "W2"}, {"Y"}, {"W1"}},
      {"I(T,W1;Z|W2)", {"T", "W1"}, {"Z"}, {"W2"}},
      {"I(U;Y|T,W1,W2)", {"U"}, {"Y"}, {"T", "W1", "W2"}},
      {"I(V;Z|T,W1,W2)", {"V"}, {"Z"}, {"T", "W1", "W2"}},
      {"I(U;Y|T,V,W1,W2)", {"U"}, {"Y"}, {"T", "V", "W1", "W2"}},
      {"I(V;Z|T,U,W1,W2)", {"V"}, {"Z"}, {"T", "U", "W1", "W2"}},
  };

  auto starred_names = [](const std::vector<std::string>& names) {
    std::vector<std::string> out;
    out.reserve(names.size());
    for (const auto& n : names)
      out.push_back((n == "Y" || n == "Z") ? n : n + "star");
    return out;
  };

  MiEqualityReport rep;
  for (const auto& t : terms) {
    MiEqualityReport::Entry e;
    e.name = t.name;
    e.source = cond_mutual_info(src, t.a, t.b, t.c);
    e.starred = cond_mutual_info(starred, starred_names(t.a),
                                 starred_names(t.b), starred_names(t.c));
    e.dev = std::abs(e.starred - e.source);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

JointPmf embed_nj_in_bound2(const JointPmf& p) {
  const JointPmf src = canonical(p, kNjVars, "embed_nj_in_bound2");
  const std::vector<std::string> merged{"T", "W1", "W2"};
  const JointPmf with_w = merge_vars(src, merged, "W");
  return marginalize(with_w, kWVars);
}

const std::vector<std::string>& nj_redundant_row_tags() {
  static const std::vector<std::string> tags{"R1 <= I(U;Y|W1)",
                                             "R2 <= I(V;Z|W2)"};
  return tags;
}

bool x_is_deterministic(const JointPmf& p) {
  const std::size_t x_pos = p.index_of("X");
  const int cx = p.vars()[x_pos].card;
  const std::size_t x_stride = p.stride(x_pos);
  const auto mass = p.mass();
  std::vector<int> seen(mass.size() / static_cast<std::size_t>(cx), -1);
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    if (mass[cell] <= 1e-15) continue;
    const int x = static_cast<int>((cell / x_stride) % cx);
    const std::size_t rest =
        (cell / (x_stride * cx)) * x_stride + (cell % x_stride);
    if (seen[rest] >= 0 && seen[rest] != x) return false;
    seen[rest] = x;
  }
  return true;
}

JointPmf embed_bound2_in_nj(const JointPmf& p) {
  const JointPmf src = canonical(p, kWVars, "embed_bound2_in_nj");
  if (!x_is_deterministic(src))
    throw std::invalid_argument(
        "embed_bound2_in_nj: X must be a deterministic function of (U,V,W); "
        "lift the input with q_augment first");

  const int cu = src.vars()[0].card;
  const int cv = src.vars()[1].card;
  const int cw = src.vars()[2].card;
  const int cx = src.vars()[3].card;

  std::vector<VarLabel> out_vars{{"U", cu * cw}, {"V", cv * cw}, {"T", cw},
                                 {"W1", 1},      {"W2", 1},      {"X", cx}};
  std::vector<double> out(static_cast<std::size_t>(cu) * cw * cv * cw * cw *
                              cx,
                          0.0);
  const auto mass = src.mass();
  for (int u = 0; u < cu; ++u)
    for (int v = 0; v < cv; ++v)
      for (int w = 0; w < cw; ++w)
        for (int x = 0; x < cx; ++x) {
          const double m =
              mass[((static_cast<std::size_t>(u) * cv + v) * cw + w) * cx + x];
          if (m == 0.0) continue;
          // U' = (u,w), V' = (v,w), T' = w; W components agree by
          // construction.
          const std::size_t up = static_cast<std::size_t>(u) * cw + w;
          const std::size_t vp = static_cast<std::size_t>(v) * cw + w;
          const std::size_t idx =
              (((up * (static_cast<std::size_t>(cv) * cw) + vp) * cw + w) *
                   1 * 1) *
                  cx +
              x;
          out[idx] = m;
        }
  return JointPmf(std::move(out_vars), std::move(out));
}

JointPmf q_augment(const JointPmf& p) {
  const JointPmf src = canonical(p, kWVars, "q_augment");
  const int cu = src.vars()[0].card;
  const int cv = src.vars()[1].card;
  const int cw = src.vars()[2].card;
  const int cx = src.vars()[3].card;

  std::vector<VarLabel> out_vars{
      {"U", cu * cx}, {"V", cv}, {"W", cw}, {"X", cx}};
  std::vector<double> out(static_cast<std::size_t>(cu) * cx * cv * cw * cx,
                          0.0);
  const auto mass = src.mass();
  for (int u = 0; u < cu; ++u)
    for (int v = 0; v < cv; ++v)
      for (int w = 0; w < cw; ++w)
        for (int q = 0; q < cx; ++q) {
          const double m =
              mass[((static_cast<std::size_t>(u) * cv + v) * cw + w) * cx + q];
          if (m == 0.0) continue;
          const std::size_t up = static_cast<std::size_t>(u) * cx + q;
          out[((up * cv + v) * cw + w) * cx + q] = m;
        }
  return JointPmf(std::move(out_vars), std::move(out));
}

JointPmf embed_uv_in_uvw(const JointPmf& p) {
  const JointPmf src =
      canonical(p, {"U", "V", "X"}, "embed_uv_in_uvw");
  const JointPmf with_w = add_constant_var(src, "W", 1);
  return marginalize(with_w, kWVars);
}

JointPmf embed_uvw_in_uv(const JointPmf& p) {
  const JointPmf src = canonical(p, kWVars, "embed_uvw_in_uv");
  const int cu = src.vars()[0].card;
  const int cv = src.vars()[1].card;
  const int cw = src.vars()[2].card;
  const int cx = src.vars()[3].card;

  std::vector<VarLabel> out_vars{{"U", cu * cw}, {"V", cv * cw}, {"X", cx}};
  std::vector<double> out(
      static_cast<std::size_t>(cu) * cw * cv * cw * cx, 0.0);
  const auto mass = src.mass();
  for (int u = 0; u < cu; ++u)
    for (int v = 0; v < cv; ++v)
      for (int w = 0; w < cw; ++w)
        for (int x = 0; x < cx; ++x) {
          const double m =
              mass[((static_cast<std::size_t>(u) * cv + v) * cw + w) * cx + x];
          if (m == 0.0) continue;
          const std::size_t up = static_cast<std::size_t>(u) * cw + w;
          const std::size_t vp = static_cast<std::size_t>(v) * cw + w;
          out[(up * (static_cast<std::size_t>(cv) * cw) + vp) * cx + x] = m;
        }
  return JointPmf(std::move(out_vars), std::move(out));
}

double SymmetrizationReport::identity_max() const {
  return *std::max_element(identity_worst.begin(), identity_worst.end());
}

double SymmetrizationReport::mi_max() const {
  double worst = 0.0;
  for (const auto& [name, dev] : mi_worst) worst = std::max(worst, dev);
  return worst;
}

bool SymmetrizationReport::pass() const {
  return identity_max() <= IdentityReport::kTol &&
         mi_max() <= MiEqualityReport::kTol &&
         nj_in_bound2_violation <= kContainSlack && redundancy_ok &&
         bound2_in_nj_row_gap <= 1e-9 && uv_in_uvw_violation <= kContainSlack &&
         uvw_in_uv_violation <= kContainSlack;
}

namespace {

JointPmf random_deterministic_x_source(const std::vector<VarLabel>& aux,
                                       int x_card, Rng& rng) {
  std::size_t cells = 1;
  for (const auto& v : aux) cells *= static_cast<std::size_t>(v.card);
  const std::vector<double> p = rng.simplex_point(cells);
  std::vector<VarLabel> vars = aux;
  vars.push_back({"X", x_card});
  std::vector<double> mass(cells * static_cast<std::size_t>(x_card), 0.0);
  for (std::size_t c = 0; c < cells; ++c)
    mass[c * static_cast<std::size_t>(x_card) +
         rng.index(static_cast<std::size_t>(x_card))] = p[c];
  return JointPmf(std::move(vars), std::move(mass));
}

}  // namespace

SymmetrizationReport verify_symmetrization(const Channel& ch, int fixtures,
                                           std::uint64_t seed,
                                           const std::array<int, 5>& aux_cards,
                                           bool corrupt) {
  if (fixtures < 1)
    throw std::invalid_argument("verify_symmetrization: fixtures >= 1");
  SymmetrizationReport rep;
  rep.fixtures = fixtures;

  const std::vector<VarLabel> source_vars{
      {"U", aux_cards[0]},  {"V", aux_cards[1]}, {"T", aux_cards[2]},
      {"W1", aux_cards[3]}, {"W2", aux_cards[4]}, {"X", ch.x_card()}};

  for (int n = 0; n < fixtures; ++n) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n)));

    // Star construction plus both verifiers.
    const JointPmf source = JointPmf::random(source_vars, rng);
    const StarConstruction s =
        corrupt ? star_corrupted(source) : star(source);
    const IdentityReport ids = verify_marginal_identities(s);
    for (std::size_t i = 0; i < ids.max_dev.size(); ++i)
      rep.identity_worst[i] = std::max(rep.identity_worst[i], ids.max_dev[i]);
    const MiEqualityReport mi = verify_mi_equalities(s, ch);
    if (rep.mi_worst.empty()) {
      for (const auto& e : mi.entries) rep.mi_worst.emplace_back(e.name, e.dev);
    } else {
      for (std::size_t i = 0; i < mi.entries.size(); ++i)
        rep.mi_worst[i].second =
            std::max(rep.mi_worst[i].second, mi.entries[i].dev);
    }

    // Bound 1 inside Bound 2 via W = (T, W1, W2).
    const Polytope3 nj = nj_polytope(attach_channel(source, ch));
    const Polytope3 b2 =
        bound2_polytope(attach_channel(embed_nj_in_bound2(source), ch));
    rep.nj_in_bound2_violation = std::max(
        rep.nj_in_bound2_violation, contains(b2, nj).worst_violation);

    // Bound 2 inside Bound 1 via U' = (U,W), V' = (V,W), T' = W, on a
    // deterministic-X fixture; reduced rows must agree value for value.
    const JointPmf det = random_deterministic_x_source(
        {{"U", aux_cards[0]}, {"V", aux_cards[1]}, {"W", aux_cards[2]}},
        ch.x_card(), rng);
    const Polytope3 lifted_nj =
        nj_polytope(attach_channel(embed_bound2_in_nj(det), ch));
    if (!redundancy_check(lifted_nj, nj_redundant_row_tags()))
      rep.redundancy_ok = false;
    const auto reduced =
        lifted_nj.without_tags(nj_redundant_row_tags()).rows_by_pattern();
    const auto target =
        bound2_polytope(attach_channel(det, ch)).rows_by_pattern();
    for (const auto& [pattern, values] : target) {
      const auto it = reduced.find(pattern);
      if (it == reduced.end() || it->second.size() != values.size()) {
        rep.bound2_in_nj_row_gap =
            std::max(rep.bound2_in_nj_row_gap, 1.0);
        continue;
      }
      for (std::size_t i = 0; i < values.size(); ++i)
        rep.bound2_in_nj_row_gap =
            std::max(rep.bound2_in_nj_row_gap,
                     std::abs(it->second[i] - values[i]));
    }

    // R0 = 0 equivalence, both directions.
    const JointPmf uv_src = JointPmf::random(
        {{"U", aux_cards[0]}, {"V", aux_cards[1]}, {"X", ch.x_card()}}, rng);
    const Polytope3 uv = uv_polytope(attach_channel(uv_src, ch));
    const Polytope3 uvw_slice = slice_r0_zero(
        uvw_polytope(attach_channel(embed_uv_in_uvw(uv_src), ch)));
    rep.uv_in_uvw_violation = std::max(
        rep.uv_in_uvw_violation, contains(uvw_slice, uv).worst_violation);

    const JointPmf uvw_src = JointPmf::random(
        {{"U", aux_cards[0]}, {"V", aux_cards[1]}, {"W", aux_cards[2]},
         {"X", ch.x_card()}}, rng);
    const Polytope3 slice =
        slice_r0_zero(uvw_polytope(attach_channel(uvw_src, ch)));
    const Polytope3 uv_emb =
        uv_polytope(attach_channel(embed_uvw_in_uv(uvw_src), ch));
    rep.uvw_in_uv_violation = std::max(
        rep.uvw_in_uv_violation, contains(uv_emb, slice).worst_violation);
  }
  return rep;
}

}  // namespace bcb
