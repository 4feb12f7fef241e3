#include "bcb/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bcb/rng.hpp"
#include "bcb/symmetrize.hpp"

namespace bcb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inequality patterns over (R0, R1, R2); every bound row uses one of
// these coefficient triples.
enum Pattern : int { P0, P1, P2, P01, P02, P12, P012, kNumPatterns };

constexpr std::array<std::array<double, 3>, kNumPatterns> kPatternNormal{{
    {1.0, 0.0, 0.0},
    {0.0, 1.0, 0.0},
    {0.0, 0.0, 1.0},
    {1.0, 1.0, 0.0},
    {1.0, 0.0, 1.0},
    {0.0, 1.0, 1.0},
    {1.0, 1.0, 1.0},
}};

// max w.r over {r >= 0} cut by the pattern caps. Exhaustive 3-subset
// vertex enumeration, the same geometry regions::support_value sees.
std::pair<double, RatePoint> solve_caps(
    const std::array<double, kNumPatterns>& caps,
    const std::array<double, 3>& w) {
  struct Plane {
    std::array<double, 3> n;
    double b;
  };
  std::array<Plane, kNumPatterns + 3> planes;
  std::size_t np = 0;
  for (int p = 0; p < kNumPatterns; ++p) {
    if (caps[p] < kInf) planes[np++] = {kPatternNormal[p], caps[p]};
  }
  // Coordinate planes participate in the vertex equations only; the
  // feasibility check below treats them as r >= 0, not as cap rows.
  const std::size_t n_caps = np;
  planes[np++] = {{1.0, 0.0, 0.0}, 0.0};
  planes[np++] = {{0.0, 1.0, 0.0}, 0.0};
  planes[np++] = {{0.0, 0.0, 1.0}, 0.0};

  auto det3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b,
                 const std::array<double, 3>& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) -
           a[1] * (b[0] * c[2] - b[2] * c[0]) +
           a[2] * (b[0] * c[1] - b[1] * c[0]);
  };

  double best = -kInf;
  RatePoint arg{};
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = i + 1; j < np; ++j)
      for (std::size_t k = j + 1; k < np; ++k) {
        const auto& a = planes[i].n;
        const auto& b = planes[j].n;
        const auto& c = planes[k].n;
        const double d = det3(a, b, c);
        if (std::abs(d) < 1e-9) continue;
        const std::array<double, 3> rhs{planes[i].b, planes[j].b, planes[k].b};
        RatePoint v{
            det3(rhs, {a[1], b[1], c[1]}, {a[2], b[2], c[2]}) / d,
            det3({a[0], b[0], c[0]}, rhs, {a[2], b[2], c[2]}) / d,
            det3({a[0], b[0], c[0]}, {a[1], b[1], c[1]}, rhs) / d};
        if (v.r0 < -1e-9 || v.r1 < -1e-9 || v.r2 < -1e-9) continue;
        bool ok = true;
        for (std::size_t q = 0; q < n_caps; ++q) {
          if (planes[q].n[0] * v.r0 + planes[q].n[1] * v.r1 +
                  planes[q].n[2] * v.r2 >
              planes[q].b + 1e-9) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        v.r0 = std::max(v.r0, 0.0);
        v.r1 = std::max(v.r1, 0.0);
        v.r2 = std::max(v.r2, 0.0);
        const double val = v.dot(w);
        if (val > best + 1e-12) {
          best = val;
          arg = v;
        } else if (val > best - 1e-12) {
          if (v.r0 < arg.r0 ||
              (v.r0 == arg.r0 &&
               (v.r1 < arg.r1 || (v.r1 == arg.r1 && v.r2 < arg.r2))))
            arg = v;
        }
      }
  return {best, arg};
}

// One accumulated marginal of the (aux, X, Y|Z) joint induced by an
// auxiliary pmf and an encoder map.
struct Table {
  std::vector<double> buf;
  std::vector<std::size_t> sim_contrib;  // per simplex variable
  std::size_t x_stride = 0;
  std::size_t y_stride = 0;  // exactly one of y/z stride may be nonzero
  std::size_t z_stride = 0;
  double entropy = 0.0;
};

struct TermSpec {
  std::vector<int> plus;
  std::vector<int> minus;
};

struct RowSpec {
  Pattern pattern;
  std::vector<int> terms;
};

std::vector<std::vector<std::string>> table_specs_for(BoundKind kind) {
  switch (kind) {
    case BoundKind::uv:
      return {{"U"},           {"V"},      {"Y"},      {"Z"},
              {"U", "Y"},      {"V", "Z"}, {"X", "V"}, {"V", "Y"},
              {"X", "V", "Y"}, {"X", "U"}, {"U", "Z"}, {"X", "U", "Z"}};
    case BoundKind::uvw:
      return {{"W"},           {"Y"},
              {"Z"},           {"W", "Y"},
              {"W", "Z"},      {"U", "W"},
              {"V", "W"},      {"U", "W", "Y"},
              {"V", "W", "Z"}, {"X", "V", "W"},
              {"V", "W", "Y"}, {"X", "V", "W", "Y"},
              {"X", "U", "W"}, {"U", "W", "Z"},
              {"X", "U", "W", "Z"}};
    case BoundKind::bound2:
      return {{"W"},           {"Y"},
              {"Z"},           {"W", "Y"},
              {"W", "Z"},      {"U", "W"},
              {"V", "W"},      {"U", "W", "Y"},
              {"V", "W", "Z"}, {"U", "V", "W"},
              {"V", "W", "Y"}, {"U", "V", "W", "Y"},
              {"U", "W", "Z"}, {"U", "V", "W", "Z"}};
    case BoundKind::nj:
      return {
          {"W1"},                          // 0
          {"W2"},                          // 1
          {"W1", "Y"},                     // 2
          {"W2", "Z"},                     // 3
          {"T", "W1"},                     // 4
          {"T", "W1", "Y"},                // 5
          {"T", "W2"},                     // 6
          {"T", "W2", "Z"},                // 7
          {"U", "W1"},                     // 8
          {"U", "W1", "Y"},                // 9
          {"V", "W2"},                     // 10
          {"V", "W2", "Z"},                // 11
          {"T", "U", "W1"},                // 12
          {"T", "U", "W1", "Y"},           // 13
          {"T", "V", "W2"},                // 14
          {"T", "V", "W2", "Z"},           // 15
          {"T", "W1", "W2"},               // 16
          {"T", "W1", "W2", "Y"},          // 17
          {"T", "W1", "W2", "Z"},          // 18
          {"U", "T", "W1", "W2"},          // 19
          {"U", "T", "W1", "W2", "Y"},     // 20
          {"V", "T", "W1", "W2"},          // 21
          {"V", "T", "W1", "W2", "Z"},     // 22
          {"U", "V", "T", "W1", "W2"},     // 23
          {"T", "V", "W1", "W2"},          // 24
          {"T", "V", "W1", "W2", "Y"},     // 25
          {"T", "U", "W1", "W2"},          // 26
          {"T", "U", "W1", "W2", "Z"},     // 27
          {"U", "V", "T", "W1", "W2", "Y"},// 28
          {"U", "V", "T", "W1", "W2", "Z"},// 29
      };
  }
  throw std::logic_error("table_specs_for: bad kind");
}

void terms_and_rows_for(BoundKind kind, std::vector<TermSpec>& terms,
                        std::vector<RowSpec>& rows) {
  terms.clear();
  rows.clear();
  switch (kind) {
    case BoundKind::uv:
      terms = {
          {{0, 2}, {4}},     // I(U;Y)
          {{1, 3}, {5}},     // I(V;Z)
          {{6, 7}, {8, 1}},  // I(X;Y|V)
          {{9, 10}, {11, 0}} // I(X;Z|U)
      };
      rows = {{P0, {}},       {P1, {0}},   {P2, {1}},
              {P12, {2, 1}},  {P12, {0, 3}}};
      return;
    case BoundKind::uvw:
      terms = {
          {{0, 1}, {3}},        // I(W;Y)
          {{0, 2}, {4}},        // I(W;Z)
          {{5, 3}, {7, 0}},     // I(U;Y|W)
          {{6, 4}, {8, 0}},     // I(V;Z|W)
          {{9, 10}, {11, 6}},   // I(X;Y|V,W)
          {{12, 13}, {14, 5}},  // I(X;Z|U,W)
      };
      break;
    case BoundKind::bound2:
      terms = {
          {{0, 1}, {3}},        // I(W;Y)
          {{0, 2}, {4}},        // I(W;Z)
          {{5, 3}, {7, 0}},     // I(U;Y|W)
          {{6, 4}, {8, 0}},     // I(V;Z|W)
          {{9, 10}, {11, 6}},   // I(U;Y|V,W)
          {{9, 12}, {13, 5}},   // I(V;Z|U,W)
      };
      break;
    case BoundKind::nj: {
      terms = {
          {{4, 2}, {5, 0}},    // 0: I(T;Y|W1)
          {{6, 3}, {7, 1}},    // 1: I(T;Z|W2)
          {{8, 2}, {9, 0}},    // 2: I(U;Y|W1)
          {{10, 3}, {11, 1}},  // 3: I(V;Z|W2)
          {{12, 2}, {13, 0}},  // 4: I(T,U;Y|W1)
          {{14, 3}, {15, 1}},  // 5: I(T,V;Z|W2)
          {{19, 17}, {20, 16}},// 6: I(U;Y|T,W1,W2)
          {{21, 18}, {22, 16}},// 7: I(V;Z|T,W1,W2)
          {{16, 3}, {18, 1}},  // 8: I(T,W1;Z|W2)
          {{16, 2}, {17, 0}},  // 9: I(T,W2;Y|W1)
          {{23, 25}, {28, 24}},// 10: I(U;Y|T,V,W1,W2)
          {{23, 27}, {29, 26}},// 11: I(V;Z|T,U,W1,W2)
          {{24, 3}, {25 + 0, 1}}, // 12: I(T,V,W1;Z|W2) -- see fixup below
          {{26, 2}, {27 + 0, 0}}, // 13: I(T,U,W2;Y|W1) -- see fixup below
      };
      // I(T,V,W1;Z|W2) = H(TVW1W2) + H(W2Z) - H(TVW1W2Z) - H(W2). The
      // tables list stores TVW1W2Z nowhere: reuse 22 (VTW1W2Z) which is
      // the same variable set; likewise 20 (UTW1W2Y) for term 13.
      terms[12] = {{24, 3}, {22, 1}};
      terms[13] = {{26, 2}, {20, 0}};
      rows = {
          {P0, {0}},        {P0, {1}},       {P1, {2}},       {P2, {3}},
          {P01, {4}},       {P01, {6, 8}},   {P02, {5}},      {P02, {7, 9}},
          {P012, {10, 12}}, {P012, {11, 13}},{P012, {10, 9, 7}},
          {P012, {11, 8, 6}},
      };
      return;
    }
  }
  // Shared w-family shape (uvw and bound2): terms 4/5 are the sum-rate
  // private terms.
  rows = {
      {P0, {0}},          {P0, {1}},          {P01, {2, 0}},
      {P01, {2, 1}},      {P02, {3, 0}},      {P02, {3, 1}},
      {P012, {4, 3, 0}},  {P012, {4, 3, 1}},  {P012, {2, 5, 0}},
      {P012, {2, 5, 1}},
  };
}

// Allocation-free weighted-support evaluation for one bound kind over a
// fixed channel and cardinality assignment. Holds scratch buffers; one
// instance per thread.
class Evaluator {
 public:
  Evaluator(const Channel& ch, const AuxSpec& spec)
      : kind_(spec.kind), cx_(ch.x_card()), ny_(ch.y_card()),
        nz_(ch.z_card()) {
    sim_names_ = spec.aux_names();
    if (!spec.x_deterministic) sim_names_.push_back("X");
    for (const auto& name : sim_names_) {
      sim_dims_.push_back(name == "X" ? cx_ : spec.card_of(name));
    }
    n_cells_ = 1;
    for (int d : sim_dims_) n_cells_ *= static_cast<std::size_t>(d);

    p_y_.resize(static_cast<std::size_t>(cx_) * ny_, 0.0);
    p_z_.resize(static_cast<std::size_t>(cx_) * nz_, 0.0);
    for (int x = 0; x < cx_; ++x)
      for (int y = 0; y < ny_; ++y)
        for (int z = 0; z < nz_; ++z) {
          p_y_[static_cast<std::size_t>(x) * ny_ + y] += ch.prob(x, y, z);
          p_z_[static_cast<std::size_t>(x) * nz_ + z] += ch.prob(x, y, z);
        }

    for (const auto& names : table_specs_for(kind_)) {
      Table t;
      std::vector<int> dims;
      for (const auto& n : names) {
        if (n == "X") dims.push_back(cx_);
        else if (n == "Y") dims.push_back(ny_);
        else if (n == "Z") dims.push_back(nz_);
        else dims.push_back(spec.card_of(n));
      }
      std::vector<std::size_t> strides(dims.size(), 1);
      for (std::size_t i = dims.size(); i-- > 1;)
        strides[i - 1] = strides[i] * static_cast<std::size_t>(dims[i]);
      std::size_t cells = 1;
      for (int d : dims) cells *= static_cast<std::size_t>(d);
      t.buf.assign(cells, 0.0);
      t.sim_contrib.assign(sim_names_.size(), 0);
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& n = names[i];
        if (n == "Y") {
          t.y_stride = strides[i];
        } else if (n == "Z") {
          t.z_stride = strides[i];
        } else if (n == "X") {
          t.x_stride = strides[i];
        } else {
          for (std::size_t s = 0; s < sim_names_.size(); ++s)
            if (sim_names_[s] == n) t.sim_contrib[s] = strides[i];
        }
      }
      tables_.push_back(std::move(t));
    }
    terms_and_rows_for(kind_, terms_, rows_);
    scratch_.resize(n_cells_);
    term_values_.resize(terms_.size());
    my_.resize(ny_);
    mz_.resize(nz_);

    // The auxiliary part of each table index depends only on the cell;
    // precompute it so the hot loop is index arithmetic plus adds.
    base_idx_.assign(tables_.size(), std::vector<std::size_t>(n_cells_, 0));
    std::vector<int> coord(sim_dims_.size(), 0);
    for (std::size_t cell = 0; cell < n_cells_; ++cell) {
      for (std::size_t t = 0; t < tables_.size(); ++t) {
        std::size_t base = 0;
        for (std::size_t d = 0; d < coord.size(); ++d)
          base += tables_[t].sim_contrib[d] * static_cast<std::size_t>(coord[d]);
        base_idx_[t][cell] = base;
      }
      for (std::size_t d = coord.size(); d-- > 0;) {
        if (++coord[d] < sim_dims_[d]) break;
        coord[d] = 0;
      }
    }
  }

  std::size_t n_cells() const { return n_cells_; }
  const std::vector<int>& sim_dims() const { return sim_dims_; }
  const std::vector<std::string>& sim_names() const { return sim_names_; }

  // Weighted support value of the per-distribution polytope at w, for the
  // auxiliary pmf q (clamped and renormalized in-place into scratch) and
  // encoder map.
  std::pair<double, RatePoint> value(std::span<const double> q,
                                     const std::vector<std::uint8_t>& map,
                                     const std::array<double, 3>& w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_cells_; ++i) {
      scratch_[i] = q[i] > 0.0 ? q[i] : 0.0;
      sum += scratch_[i];
    }
    if (sum <= 0.0) throw std::invalid_argument("evaluator: zero mass");
    const double inv = 1.0 / sum;

    for (auto& t : tables_) std::fill(t.buf.begin(), t.buf.end(), 0.0);

    for (std::size_t cell = 0; cell < n_cells_; ++cell) {
      const double m = scratch_[cell] * inv;
      if (m <= 0.0) continue;
      const int x = map[cell];
      const double* py = p_y_.data() + static_cast<std::size_t>(x) * ny_;
      const double* pz = p_z_.data() + static_cast<std::size_t>(x) * nz_;
      for (int y = 0; y < ny_; ++y) my_[y] = m * py[y];
      for (int z = 0; z < nz_; ++z) mz_[z] = m * pz[z];
      for (std::size_t t = 0; t < tables_.size(); ++t) {
        Table& tb = tables_[t];
        const std::size_t base =
            base_idx_[t][cell] + tb.x_stride * static_cast<std::size_t>(x);
        if (tb.y_stride != 0) {
          for (int y = 0; y < ny_; ++y)
            tb.buf[base + tb.y_stride * static_cast<std::size_t>(y)] += my_[y];
        } else if (tb.z_stride != 0) {
          for (int z = 0; z < nz_; ++z)
            tb.buf[base + tb.z_stride * static_cast<std::size_t>(z)] += mz_[z];
        } else {
          tb.buf[base] += m;
        }
      }
    }

    for (auto& t : tables_) {
      double h = 0.0;
      for (double v : t.buf) {
        if (v > 0.0) h -= v * std::log2(v);
      }
      t.entropy = h < 0.0 ? 0.0 : h;
    }

    for (std::size_t i = 0; i < terms_.size(); ++i) {
      double v = 0.0;
      for (int t : terms_[i].plus) v += tables_[t].entropy;
      for (int t : terms_[i].minus) v -= tables_[t].entropy;
      term_values_[i] = v < 0.0 ? 0.0 : v;
    }

    std::array<double, kNumPatterns> caps;
    caps.fill(kInf);
    for (const auto& row : rows_) {
      double rhs = 0.0;
      for (int t : row.terms) rhs += term_values_[t];
      caps[row.pattern] = std::min(caps[row.pattern], rhs);
    }
    return solve_caps(caps, w);
  }

 private:
  BoundKind kind_;
  int cx_, ny_, nz_;
  std::vector<std::string> sim_names_;
  std::vector<int> sim_dims_;
  std::size_t n_cells_ = 0;
  std::vector<double> p_y_, p_z_;
  std::vector<Table> tables_;
  std::vector<TermSpec> terms_;
  std::vector<RowSpec> rows_;
  std::vector<std::vector<std::size_t>> base_idx_;
  std::vector<double> scratch_;
  std::vector<double> term_values_;
  std::vector<double> my_, mz_;
};

// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(std::vector<double>& v, std::vector<double>& sorted) {
  sorted.assign(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cum += sorted[j];
    const double cand = (cum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - cand > 0.0) {
      rho = static_cast<int>(j + 1);
      tau = cand;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(x - tau, 0.0);
}

struct MapPool {
  std::vector<std::vector<std::uint8_t>> maps;
  bool exhaustive = false;
};

MapPool build_map_pool(const std::vector<int>& sim_dims, int cx,
                       bool stochastic, std::uint64_t seed) {
  MapPool pool;
  std::size_t n_cells = 1;
  for (int d : sim_dims) n_cells *= static_cast<std::size_t>(d);

  if (stochastic) {
    // X is the last simplex coordinate; the "map" just reads it off.
    std::vector<std::uint8_t> proj(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c)
      proj[c] = static_cast<std::uint8_t>(c % static_cast<std::size_t>(cx));
    pool.maps.push_back(std::move(proj));
    pool.exhaustive = true;
    return pool;
  }

  const double log_count =
      static_cast<double>(n_cells) * std::log(static_cast<double>(cx));
  if (log_count <= std::log(4096.0) + 1e-9) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < n_cells; ++i) count *= static_cast<std::size_t>(cx);
    pool.exhaustive = true;
    pool.maps.reserve(count);
    std::vector<std::uint8_t> f(n_cells, 0);
    for (std::size_t id = 0; id < count; ++id) {
      pool.maps.push_back(f);
      for (std::size_t d = n_cells; d-- > 0;) {
        if (++f[d] < cx) break;
        f[d] = 0;
      }
    }
    return pool;
  }

  // Seeded 512-map sample, stratified so that maps depending on a proper
  // subset of the auxiliaries (the known-optimal structures on symmetric
  // channels) are always represented, plus a few canonical linear maps.
  constexpr std::size_t kBudget = 512;
  std::set<std::vector<std::uint8_t>> seen;
  auto push = [&](std::vector<std::uint8_t> f) {
    if (pool.maps.size() >= kBudget) return;
    if (seen.insert(f).second) pool.maps.push_back(std::move(f));
  };

  const std::size_t nv = sim_dims.size();
  auto from_coords = [&](auto&& fn) {
    std::vector<std::uint8_t> f(n_cells);
    std::vector<int> coord(nv, 0);
    for (std::size_t c = 0; c < n_cells; ++c) {
      f[c] = static_cast<std::uint8_t>(fn(coord) % cx);
      for (std::size_t d = nv; d-- > 0;) {
        if (++coord[d] < sim_dims[d]) break;
        coord[d] = 0;
      }
    }
    return f;
  };

  // Canonical maps: single coordinates, pairwise sums, full sum.
  for (std::size_t a = 0; a < nv; ++a)
    push(from_coords([&](const std::vector<int>& c) { return c[a]; }));
  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = a + 1; b < nv; ++b)
      push(from_coords(
          [&](const std::vector<int>& c) { return c[a] + c[b]; }));
  push(from_coords([&](const std::vector<int>& c) {
    int s = 0;
    for (int v : c) s += v;
    return s;
  }));

  // Masks: full dependence first, then proper subsets by size.
  std::vector<std::vector<std::size_t>> masks;
  masks.emplace_back();
  for (std::size_t a = 0; a < nv; ++a) masks.back().push_back(a);
  for (std::size_t size = nv - 1; size >= 1; --size) {
    for (std::uint32_t bits = 0; bits < (1u << nv); ++bits) {
      if (static_cast<std::size_t>(std::popcount(bits)) != size) continue;
      std::vector<std::size_t> m;
      for (std::size_t a = 0; a < nv; ++a)
        if (bits & (1u << a)) m.push_back(a);
      masks.push_back(std::move(m));
    }
    if (size == 1) break;
  }

  Rng rng(derive_seed(seed, 0x4d415053ULL));  // "MAPS"
  std::size_t attempts = 0;
  while (pool.maps.size() < kBudget && attempts < 16 * kBudget) {
    for (const auto& mask : masks) {
      if (pool.maps.size() >= kBudget) break;
      ++attempts;
      std::size_t sub_cells = 1;
      for (std::size_t a : mask) sub_cells *= static_cast<std::size_t>(sim_dims[a]);
      std::vector<std::uint8_t> g(sub_cells);
      for (auto& v : g) v = static_cast<std::uint8_t>(rng.index(cx));
      push(from_coords([&](const std::vector<int>& c) {
        std::size_t idx = 0;
        for (std::size_t a : mask)
          idx = idx * static_cast<std::size_t>(sim_dims[a]) +
                static_cast<std::size_t>(c[a]);
        return static_cast<int>(g[idx]);
      }));
    }
  }
  return pool;
}

struct RunOutcome {
  double value = -1.0;
  RatePoint point;
  std::vector<double> q;
  std::size_t map_index = 0;
  bool done = false;
};

// Projected-gradient ascent with central finite differences and
// backtracking step control.
RunOutcome run_ascent(Evaluator& ev, const std::vector<std::uint8_t>& map,
                      std::size_t map_index, std::vector<double> start,
                      const std::array<double, 3>& w,
                      const OptimizerConfig& cfg) {
  const std::size_t n = start.size();
  std::vector<double> grad(n), cand(n), sorted(n);
  double step = cfg.step_init;

  auto [f, point] = ev.value(start, map, w);
  int stall = 0;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const double h = cfg.fd_step;
    for (std::size_t i = 0; i < n; ++i) {
      const double saved = start[i];
      start[i] = saved + h;
      const double fp = ev.value(start, map, w).first;
      start[i] = saved - h;
      const double fm = ev.value(start, map, w).first;
      start[i] = saved;
      grad[i] = (fp - fm) / (2.0 * h);
    }

    bool improved = false;
    double gained = 0.0;
    while (step >= 1e-9) {
      for (std::size_t i = 0; i < n; ++i) cand[i] = start[i] + step * grad[i];
      project_simplex(cand, sorted);
      const auto [fc, pc] = ev.value(cand, map, w);
      if (fc > f + 1e-12) {
        gained = fc - f;
        start = cand;
        f = fc;
        point = pc;
        step = std::min(step * 1.6, 4.0);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    if (gained < cfg.tol) {
      if (++stall >= 4) break;
    } else {
      stall = 0;
    }
  }

  RunOutcome out;
  out.value = f;
  out.point = point;
  out.q = std::move(start);
  out.map_index = map_index;
  out.done = true;
  return out;
}

JointPmf joint_from_run(const AuxSpec& spec, const Channel& ch,
                        const std::vector<double>& q,
                        const std::vector<std::uint8_t>& map,
                        const std::vector<std::string>& sim_names,
                        const std::vector<int>& sim_dims) {
  std::vector<VarLabel> vars;
  for (std::size_t i = 0; i < sim_names.size(); ++i)
    vars.push_back({sim_names[i], sim_dims[i]});

  // Clamp and renormalize exactly as the evaluator does.
  std::vector<double> mass(q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    mass[i] = q[i] > 0.0 ? q[i] : 0.0;
    sum += mass[i];
  }
  for (auto& m : mass) m /= sum;

  if (!spec.x_deterministic) {
    return JointPmf(std::move(vars), std::move(mass));
  }
  const int cx = ch.x_card();
  vars.push_back({"X", cx});
  std::vector<double> joint(mass.size() * static_cast<std::size_t>(cx), 0.0);
  for (std::size_t c = 0; c < mass.size(); ++c)
    joint[c * static_cast<std::size_t>(cx) + map[c]] = mass[c];
  return JointPmf(std::move(vars), std::move(joint));
}

Polytope3 polytope_for(BoundKind kind, const JointPmf& with_channel) {
  switch (kind) {
    case BoundKind::nj: return nj_polytope(with_channel);
    case BoundKind::bound2: return bound2_polytope(with_channel);
    case BoundKind::uvw: return uvw_polytope(with_channel);
    case BoundKind::uv: return uv_polytope(with_channel);
  }
  throw std::logic_error("polytope_for: bad kind");
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::nj: return "nj";
    case BoundKind::bound2: return "bound2";
    case BoundKind::uvw: return "uvw";
    case BoundKind::uv: return "uv";
  }
  return "?";
}

BoundKind bound_kind_from_string(const std::string& name) {
  if (name == "nj") return BoundKind::nj;
  if (name == "bound2") return BoundKind::bound2;
  if (name == "uvw") return BoundKind::uvw;
  if (name == "uv") return BoundKind::uv;
  throw std::invalid_argument("unknown bound kind '" + name +
                              "' (expected nj|bound2|uvw|uv)");
}

AuxSpec AuxSpec::defaults(BoundKind kind, const Channel& ch) {
  AuxSpec spec;
  spec.kind = kind;
  const int cx = ch.x_card();
  switch (kind) {
    case BoundKind::uvw:
    case BoundKind::bound2:
      spec.cards = {{"U", cx + 1}, {"V", cx + 1}, {"W", cx + 5}};
      break;
    case BoundKind::uv:
      spec.cards = {{"U", cx + 1}, {"V", cx + 1}};
      break;
    case BoundKind::nj:
      spec.cards = {{"U", cx + 1}, {"V", cx + 1}, {"T", cx + 1},
                    {"W1", 2},     {"W2", 2}};
      break;
  }
  return spec;
}

const std::vector<std::string>& AuxSpec::aux_names() const {
  static const std::vector<std::string> nj{"U", "V", "T", "W1", "W2"};
  static const std::vector<std::string> w_family{"U", "V", "W"};
  static const std::vector<std::string> uv{"U", "V"};
  switch (kind) {
    case BoundKind::nj: return nj;
    case BoundKind::bound2:
    case BoundKind::uvw: return w_family;
    case BoundKind::uv: return uv;
  }
  throw std::logic_error("AuxSpec: bad kind");
}

int AuxSpec::card_of(const std::string& name) const {
  const auto it = cards.find(name);
  if (it == cards.end())
    throw std::invalid_argument("AuxSpec: no cardinality for '" + name + "'");
  return it->second;
}

void AuxSpec::validate(const Channel& ch) const {
  (void)ch;
  for (const auto& name : aux_names()) {
    if (card_of(name) < 1)
      throw std::invalid_argument("AuxSpec: cardinality of '" + name +
                                  "' must be >= 1");
  }
}

void OptimizerConfig::validate() const {
  if (restarts < 1 || max_iters < 1)
    throw std::invalid_argument("OptimizerConfig: counts must be positive");
  if (step_init <= 0.0 || fd_step <= 0.0)
    throw std::invalid_argument("OptimizerConfig: steps must be positive");
  if (tol < 1e-8)
    throw std::invalid_argument("OptimizerConfig: tol must be >= 1e-8");
}

std::string pmf_digest(const JointPmf& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : p.mass()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

SupportRecord maximize_support(const Channel& ch, const AuxSpec& spec,
                               const std::array<double, 3>& w,
                               const OptimizerConfig& cfg) {
  spec.validate(ch);
  cfg.validate();
  if (w[0] < 0.0 || w[1] < 0.0 || w[2] < 0.0 ||
      (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0))
    throw std::invalid_argument(
        "maximize_support: weights must be nonnegative and not all zero");

  Evaluator ev0(ch, spec);
  const MapPool pool = build_map_pool(ev0.sim_dims(), ch.x_card(),
                                      !spec.x_deterministic, cfg.seed);
  const std::size_t n = ev0.n_cells();

  int n_threads = cfg.threads > 0
                      ? cfg.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, cfg.restarts));
  auto parallel_for = [&](std::size_t count, auto&& body) {
    if (n_threads == 1 || count < 2) {
      for (std::size_t i = 0; i < count; ++i) body(ev0, i);
      return;
    }
    std::vector<std::thread> workers;
    const int nt = std::min<int>(n_threads, static_cast<int>(count));
    workers.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
      workers.emplace_back([&, t] {
        Evaluator ev(ch, spec);
        for (std::size_t i = static_cast<std::size_t>(t); i < count;
             i += static_cast<std::size_t>(nt))
          body(ev, i);
      });
    }
    for (auto& th : workers) th.join();
  };

  // Screening tier 1: every map on shared probe points. Beyond uniform
  // and random interior points, slab probes pin one auxiliary to a single
  // symbol; encoder maps that ignore an auxiliary score honestly there
  // instead of being washed out by an irrelevant coordinate.
  std::vector<std::vector<double>> probes;
  probes.push_back(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  {
    Rng rng(derive_seed(cfg.seed, 0x50524f42ULL));  // "PROB"
    for (int i = 0; i < 11; ++i) probes.push_back(rng.simplex_point(n));
  }
  {
    const auto& dims = ev0.sim_dims();
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t d = dims.size(); d-- > 1;)
      strides[d - 1] = strides[d] * static_cast<std::size_t>(dims[d]);
    for (std::size_t d = 0; d < dims.size(); ++d) {
      if (dims[d] < 2) continue;
      for (int s = 0; s < std::min(dims[d], 3); ++s) {
        std::vector<double> slab(n, 0.0);
        double total = 0.0;
        for (std::size_t cell = 0; cell < n; ++cell) {
          if (static_cast<int>((cell / strides[d]) %
                               static_cast<std::size_t>(dims[d])) == s) {
            slab[cell] = 1.0;
            total += 1.0;
          }
        }
        for (auto& v : slab) v /= total;
        probes.push_back(std::move(slab));
      }
    }
  }
  struct Scored {
    std::size_t pool_index = 0;
    double score = -1.0;
    std::size_t best_probe = 0;
    std::vector<double> warm_start;  // sprint endpoint, when sprinted
  };
  std::vector<Scored> ranked(pool.maps.size());
  parallel_for(pool.maps.size(), [&](Evaluator& ev, std::size_t m) {
    ranked[m].pool_index = m;
    for (std::size_t pb = 0; pb < probes.size(); ++pb) {
      const double v = ev.value(probes[pb], pool.maps[m], w).first;
      if (v > ranked[m].score) {
        ranked[m].score = v;
        ranked[m].best_probe = pb;
      }
    }
  });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Scored& a, const Scored& b) {
                     return a.score > b.score;
                   });

  // Screening tier 2: short-ascent sprints re-rank the leading maps. Probe
  // values barely separate maps whose optima need a structured pmf, so a
  // few gradient steps decide which maps deserve full restarts. The pool
  // size adapts to the simplex dimension to keep the cost flat; it does
  // not depend on the restart budget, which keeps restart schedules
  // prefix-stable.
  constexpr int kSprintIters = 18;
  // Evaluation budget for the sprint tier, shrunk for large simplices
  // where each evaluation is proportionally dearer.
  const double sprint_budget = std::clamp(
      2.0e8 / static_cast<double>(std::max<std::size_t>(n, 1)), 4.0e5,
      1.6e6);
  const std::size_t sprint_pool = std::min<std::size_t>(
      ranked.size(),
      std::max<std::size_t>(
          64, static_cast<std::size_t>(
                  sprint_budget / (kSprintIters * 2.0 *
                                   static_cast<double>(std::max<std::size_t>(
                                       n, 1))))));
  {
    OptimizerConfig sprint_cfg = cfg;
    sprint_cfg.max_iters = kSprintIters;
    parallel_for(sprint_pool, [&](Evaluator& ev, std::size_t i) {
      Scored& s = ranked[i];
      RunOutcome out =
          run_ascent(ev, pool.maps[s.pool_index], s.pool_index,
                     probes[s.best_probe], w, sprint_cfg);
      s.score = out.value;
      s.warm_start = std::move(out.q);
    });
    std::stable_sort(ranked.begin(), ranked.begin() + sprint_pool,
                     [](const Scored& a, const Scored& b) {
                       return a.score > b.score;
                     });
  }

  const int restarts = cfg.restarts;
  const std::size_t m_maps = std::min<std::size_t>(
      pool.maps.size(),
      std::max<std::size_t>(1, (static_cast<std::size_t>(restarts) + 1) / 2));

  // Each restart r refines map ranked[r % m_maps], giving the leaders both
  // a warm ascent and randomized revisits. The first visit starts from the
  // sprint endpoint (or best probe); later visits alternate dense and
  // sparse seeded points keyed by (pool index, visit) so that restart
  // schedules are prefixes of longer ones.
  std::vector<RunOutcome> results(static_cast<std::size_t>(restarts));
  parallel_for(static_cast<std::size_t>(restarts),
               [&](Evaluator& ev, std::size_t r) {
    const Scored& pick = ranked[r % m_maps];
    const std::size_t visit = r / m_maps;
    std::vector<double> start;
    if (visit == 0) {
      start = pick.warm_start.empty() ? probes[pick.best_probe]
                                      : pick.warm_start;
    } else {
      Rng rng(derive_seed(cfg.seed, 0x53545254ULL + pick.pool_index * 8192 +
                                        visit));  // "STRT"
      if (visit % 2 == 1 && n >= 8) {
        // Sparse start: a Dirichlet point on a small random support.
        start.assign(n, 0.0);
        const std::size_t support = std::max<std::size_t>(2, n / 8);
        double total = 0.0;
        for (std::size_t s = 0; s < support; ++s) {
          const double mass = rng.exponential();
          start[rng.index(n)] += mass;
          total += mass;
        }
        for (auto& v : start) v /= total;
      } else {
        start = rng.simplex_point(n);
      }
    }
    results[r] = run_ascent(ev, pool.maps[pick.pool_index], pick.pool_index,
                            std::move(start), w, cfg);
  });

  // Deterministic merge: best value wins; exact value ties fall back to
  // the lexicographically smallest joint distribution, then the smallest
  // restart index.
  int best_run = 0;
  for (int r = 1; r < restarts; ++r) {
    const RunOutcome& a = results[static_cast<std::size_t>(r)];
    const RunOutcome& b = results[static_cast<std::size_t>(best_run)];
    if (a.value > b.value) {
      best_run = r;
    } else if (a.value == b.value) {
      const JointPmf ja = joint_from_run(spec, ch, a.q,
                                         pool.maps[a.map_index],
                                         ev0.sim_names(), ev0.sim_dims());
      const JointPmf jb = joint_from_run(spec, ch, b.q,
                                         pool.maps[b.map_index],
                                         ev0.sim_names(), ev0.sim_dims());
      if (std::lexicographical_compare(ja.mass().begin(), ja.mass().end(),
                                       jb.mass().begin(), jb.mass().end()))
        best_run = r;
    }
  }

  const RunOutcome& best = results[static_cast<std::size_t>(best_run)];
  JointPmf joint = joint_from_run(spec, ch, best.q, pool.maps[best.map_index],
                                  ev0.sim_names(), ev0.sim_dims());
  const JointPmf with_channel = attach_channel(joint, ch);
  const Polytope3 poly = polytope_for(spec.kind, with_channel);
  const auto [value, point] = support_value(poly, w);
  if (std::abs(value - best.value) > 1e-6)
    throw std::logic_error(
        "maximize_support: evaluator disagrees with polytope support ("
        + std::to_string(value) + " vs " + std::to_string(best.value) + ")");

  const std::string digest = pmf_digest(joint);
  return SupportRecord{w, value, point, std::move(joint), digest,
                       best_run + 1};
}

RegionEstimate trace_region(const Channel& ch, const AuxSpec& spec,
                            const std::vector<std::array<double, 3>>& weights,
                            const OptimizerConfig& cfg) {
  if (weights.empty())
    throw std::invalid_argument("trace_region: weight list is empty");
  std::vector<std::array<double, 3>> sorted = weights;
  std::sort(sorted.begin(), sorted.end());
  RegionEstimate est;
  for (const auto& w : sorted)
    est.records.push_back(maximize_support(ch, spec, w, cfg));
  return est;
}

SaturationTable cardinality_saturation(
    const Channel& ch, const AuxSpec& base,
    const std::vector<AuxSpec>& enlarged,
    const std::vector<std::array<double, 3>>& weights,
    const OptimizerConfig& cfg, double tol_sat) {
  for (const auto& spec : enlarged) {
    if (spec.kind != base.kind)
      throw std::invalid_argument(
          "cardinality_saturation: enlarged spec has a different bound kind");
    for (const auto& name : base.aux_names()) {
      if (spec.card_of(name) < base.card_of(name))
        throw std::invalid_argument(
            "cardinality_saturation: enlarged spec does not dominate base "
            "cardinality of '" + name + "'");
    }
  }
  SaturationTable table;
  table.tol_sat = tol_sat;
  for (const auto& w : weights) {
    SaturationRow row;
    row.weight = w;
    row.base_value = maximize_support(ch, base, w, cfg).value;
    row.max_gap = -kInf;
    for (const auto& spec : enlarged) {
      const double v = maximize_support(ch, spec, w, cfg).value;
      row.enlarged_values.push_back(v);
      row.max_gap = std::max(row.max_gap, v - row.base_value);
    }
    row.pass = row.max_gap <= tol_sat;
    table.pass = table.pass && row.pass;
    table.rows.push_back(std::move(row));
  }
  return table;
}

CompareTable compare_bounds(const Channel& ch, const AuxSpec& spec_a,
                            const AuxSpec& spec_b,
                            const std::vector<std::array<double, 3>>& weights,
                            const OptimizerConfig& cfg) {
  CompareTable table;
  for (const auto& w : weights) {
    CompareRow row;
    row.weight = w;
    row.value_a = maximize_support(ch, spec_a, w, cfg).value;
    row.value_b = maximize_support(ch, spec_b, w, cfg).value;
    row.diff = row.value_a - row.value_b;
    table.max_abs_diff = std::max(table.max_abs_diff, std::abs(row.diff));
    table.rows.push_back(row);
  }
  return table;
}

std::vector<std::array<double, 3>> default_weight_fan() {
  std::vector<std::array<double, 3>> fan{
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
      {1, 1, 0}, {1, 0, 1}, {0, 1, 1},
      {1, 1, 1},
      {2, 1, 0}, {2, 0, 1}, {1, 2, 0}, {1, 0, 2}, {0, 2, 1}, {0, 1, 2},
  };
  for (auto& w : fan) {
    const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    for (auto& v : w) v /= norm;
  }
  return fan;
}

std::vector<std::array<double, 3>> private_weight_fan() {
  std::vector<std::array<double, 3>> fan;
  constexpr int kSteps = 8;
  for (int k = 0; k <= kSteps; ++k) {
    if (k == 0) {
      fan.push_back({0.0, 1.0, 0.0});
    } else if (k == kSteps) {
      fan.push_back({0.0, 0.0, 1.0});
    } else {
      const double t = 3.14159265358979323846 * k / (2.0 * kSteps);
      fan.push_back({0.0, std::cos(t), std::sin(t)});
    }
  }
  return fan;
}

}  // namespace bcb
