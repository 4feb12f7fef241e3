#include "bcb/regions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcb {

namespace {

using Vec3 = std::array<double, 3>;

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) -
         a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

bool lex_less(const RatePoint& a, const RatePoint& b) {
  if (a.r0 != b.r0) return a.r0 < b.r0;
  if (a.r1 != b.r1) return a.r1 < b.r1;
  return a.r2 < b.r2;
}

}  // namespace

std::map<Vec3, std::vector<double>> Polytope3::rows_by_pattern() const {
  std::map<Vec3, std::vector<double>> out;
  for (const auto& row : rows_) out[row.coeffs].push_back(row.rhs);
  for (auto& [pattern, rhs] : out) std::sort(rhs.begin(), rhs.end());
  return out;
}

Polytope3 Polytope3::without_tags(const std::vector<std::string>& tags) const {
  for (const auto& t : tags) {
    if (std::none_of(rows_.begin(), rows_.end(),
                     [&](const PolyRow& r) { return r.tag == t; }))
      throw std::invalid_argument("Polytope3: unknown row tag '" + t + "'");
  }
  std::vector<PolyRow> kept;
  for (const auto& row : rows_) {
    if (std::find(tags.begin(), tags.end(), row.tag) == tags.end())
      kept.push_back(row);
  }
  return Polytope3(std::move(kept));
}

std::vector<RatePoint> vertices(const Polytope3& p) {
  const auto& rows = p.rows();

  // Boundedness: with nonnegative coefficients and r >= 0, the polytope is
  // bounded iff every coordinate appears with a positive coefficient in
  // some row.
  for (int d = 0; d < 3; ++d) {
    bool capped = false;
    for (const auto& row : rows) {
      for (int k = 0; k < 3; ++k) {
        if (row.coeffs[k] < 0.0)
          throw std::invalid_argument(
              "vertices: negative row coefficients are not supported");
      }
      if (row.coeffs[d] > 0.0) capped = true;
    }
    if (!capped)
      throw std::domain_error("vertices: polytope unbounded in direction R" +
                              std::to_string(d));
  }

  // Plane list: rows as (a, rhs), then the three coordinate planes.
  std::vector<std::pair<Vec3, double>> planes;
  planes.reserve(rows.size() + 3);
  for (const auto& row : rows) planes.emplace_back(row.coeffs, row.rhs);
  planes.push_back({{1.0, 0.0, 0.0}, 0.0});
  planes.push_back({{0.0, 1.0, 0.0}, 0.0});
  planes.push_back({{0.0, 0.0, 1.0}, 0.0});

  auto feasible = [&](const RatePoint& r) {
    if (r.r0 < -kFeasSlack || r.r1 < -kFeasSlack || r.r2 < -kFeasSlack)
      return false;
    for (const auto& row : rows) {
      if (row.coeffs[0] * r.r0 + row.coeffs[1] * r.r1 + row.coeffs[2] * r.r2 >
          row.rhs + kFeasSlack)
        return false;
    }
    return true;
  };

  std::vector<RatePoint> out;
  const std::size_t n = planes.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3& a = planes[i].first;
        const Vec3& b = planes[j].first;
        const Vec3& c = planes[k].first;
        const double d = det3(a, b, c);
        if (std::abs(d) < 1e-9) continue;
        const Vec3 rhs{planes[i].second, planes[j].second, planes[k].second};
        // Cramer's rule.
        const double r0 = det3(rhs, {a[1], b[1], c[1]}, {a[2], b[2], c[2]});
        const double r1 = det3({a[0], b[0], c[0]}, rhs, {a[2], b[2], c[2]});
        const double r2 = det3({a[0], b[0], c[0]}, {a[1], b[1], c[1]}, rhs);
        RatePoint v{r0 / d, r1 / d, r2 / d};
        if (!feasible(v)) continue;
        v.r0 = std::max(v.r0, 0.0);
        v.r1 = std::max(v.r1, 0.0);
        v.r2 = std::max(v.r2, 0.0);
        bool dup = false;
        for (const auto& u : out) {
          const double dx = u.r0 - v.r0, dy = u.r1 - v.r1, dz = u.r2 - v.r2;
          if (dx * dx + dy * dy + dz * dz <= kVertexDedup * kVertexDedup) {
            dup = true;
            break;
          }
        }
        if (!dup) out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

std::pair<double, RatePoint> support_value(const Polytope3& p, const Vec3& w) {
  if (w[0] < 0.0 || w[1] < 0.0 || w[2] < 0.0)
    throw std::invalid_argument("support_value: weights must be nonnegative");
  if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0)
    throw std::invalid_argument("support_value: weight vector must be nonzero");

  const std::vector<RatePoint> verts = vertices(p);
  double best = -1.0;
  RatePoint arg{};
  for (const auto& v : verts) {
    const double val = v.dot(w);
    if (val > best + 1e-12) {
      best = val;
      arg = v;
    } else if (val > best - 1e-12 && lex_less(v, arg)) {
      arg = v;
    }
  }
  return {best, arg};
}

ContainsReport contains(const Polytope3& outer, const Polytope3& inner) {
  ContainsReport report;
  report.worst_violation = -1e300;
  for (const auto& v : vertices(inner)) {
    for (const auto& row : outer.rows()) {
      const double lhs =
          row.coeffs[0] * v.r0 + row.coeffs[1] * v.r1 + row.coeffs[2] * v.r2;
      const double violation = lhs - row.rhs;
      if (violation > report.worst_violation) {
        report.worst_violation = violation;
        report.vertex = v;
        report.row_tag = row.tag;
      }
    }
  }
  report.ok = report.worst_violation <= kContainSlack;
  return report;
}

bool redundancy_check(const Polytope3& p, const std::vector<std::string>& tags) {
  const std::vector<RatePoint> full = vertices(p);
  const std::vector<RatePoint> reduced = vertices(p.without_tags(tags));
  auto matches = [](const std::vector<RatePoint>& a,
                    const std::vector<RatePoint>& b) {
    for (const auto& v : a) {
      bool found = false;
      for (const auto& u : b) {
        const double dx = u.r0 - v.r0, dy = u.r1 - v.r1, dz = u.r2 - v.r2;
        if (dx * dx + dy * dy + dz * dz <= kVertexDedup * kVertexDedup) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  return matches(full, reduced) && matches(reduced, full);
}

Polytope3 slice_r0_zero(const Polytope3& p) {
  Polytope3 out;
  out.add_row({{1.0, 0.0, 0.0}, 0.0, "R0 <= 0"});
  for (const auto& row : p.rows()) {
    if (row.coeffs[1] == 0.0 && row.coeffs[2] == 0.0) continue;
    PolyRow sliced = row;
    sliced.coeffs[0] = 0.0;
    sliced.tag += " [r0=0]";
    out.add_row(std::move(sliced));
  }
  return out;
}

// --- Bound builders -------------------------------------------------------

namespace {

using S = std::vector<std::string>;

void require_vars(const JointPmf& p, const S& names, const char* builder) {
  for (const auto& n : names) {
    if (!p.has_var(n))
      throw std::invalid_argument(std::string(builder) +
                                  ": missing variable '" + n + "'");
  }
}

constexpr Vec3 kR0{1.0, 0.0, 0.0};
constexpr Vec3 kR1{0.0, 1.0, 0.0};
constexpr Vec3 kR2{0.0, 0.0, 1.0};
constexpr Vec3 kR01{1.0, 1.0, 0.0};
constexpr Vec3 kR02{1.0, 0.0, 1.0};
constexpr Vec3 kR12{0.0, 1.0, 1.0};
constexpr Vec3 kR012{1.0, 1.0, 1.0};

}  // namespace

Polytope3 nj_polytope(const JointPmf& p) {
  require_vars(p, {"U", "V", "T", "W1", "W2", "X", "Y", "Z"}, "nj_polytope");
  auto I = [&](const S& a, const S& b, const S& c = {}) {
    return cond_mutual_info(p, a, b, c);
  };

  const double i_t_y_w1 = I({"T"}, {"Y"}, {"W1"});
  const double i_t_z_w2 = I({"T"}, {"Z"}, {"W2"});
  const double i_u_y_w1 = I({"U"}, {"Y"}, {"W1"});
  const double i_v_z_w2 = I({"V"}, {"Z"}, {"W2"});
  const double i_tu_y_w1 = I({"T", "U"}, {"Y"}, {"W1"});
  const double i_tv_z_w2 = I({"T", "V"}, {"Z"}, {"W2"});
  const double i_u_y_tw = I({"U"}, {"Y"}, {"T", "W1", "W2"});
  const double i_v_z_tw = I({"V"}, {"Z"}, {"T", "W1", "W2"});
  const double i_tw1_z_w2 = I({"T", "W1"}, {"Z"}, {"W2"});
  const double i_tw2_y_w1 = I({"T", "W2"}, {"Y"}, {"W1"});
  const double i_u_y_tvw = I({"U"}, {"Y"}, {"T", "V", "W1", "W2"});
  const double i_v_z_tuw = I({"V"}, {"Z"}, {"T", "U", "W1", "W2"});
  const double i_tvw1_z_w2 = I({"T", "V", "W1"}, {"Z"}, {"W2"});
  const double i_tuw2_y_w1 = I({"T", "U", "W2"}, {"Y"}, {"W1"});

  Polytope3 out;
  out.add_row({kR0, i_t_y_w1, "R0 <= I(T;Y|W1)"});
  out.add_row({kR0, i_t_z_w2, "R0 <= I(T;Z|W2)"});
  out.add_row({kR1, i_u_y_w1, "R1 <= I(U;Y|W1)"});
  out.add_row({kR2, i_v_z_w2, "R2 <= I(V;Z|W2)"});
  out.add_row({kR01, i_tu_y_w1, "R0+R1 <= I(T,U;Y|W1)"});
  out.add_row({kR01, i_u_y_tw + i_tw1_z_w2,
               "R0+R1 <= I(U;Y|T,W1,W2)+I(T,W1;Z|W2)"});
  out.add_row({kR02, i_tv_z_w2, "R0+R2 <= I(T,V;Z|W2)"});
  out.add_row({kR02, i_v_z_tw + i_tw2_y_w1,
               "R0+R2 <= I(V;Z|T,W1,W2)+I(T,W2;Y|W1)"});
  out.add_row({kR012, i_u_y_tvw + i_tvw1_z_w2,
               "R0+R1+R2 <= I(U;Y|T,V,W1,W2)+I(T,V,W1;Z|W2)"});
  out.add_row({kR012, i_v_z_tuw + i_tuw2_y_w1,
               "R0+R1+R2 <= I(V;Z|T,U,W1,W2)+I(T,U,W2;Y|W1)"});
  out.add_row({kR012, i_u_y_tvw + i_tw2_y_w1 + i_v_z_tw,
               "R0+R1+R2 <= I(U;Y|T,V,W1,W2)+I(T,W2;Y|W1)+I(V;Z|T,W1,W2)"});
  out.add_row({kR012, i_v_z_tuw + i_tw1_z_w2 + i_u_y_tw,
               "R0+R1+R2 <= I(V;Z|T,U,W1,W2)+I(T,W1;Z|W2)+I(U;Y|T,W1,W2)"});
  return out;
}

namespace {

// Shared shape of Bound 2 and the UVW bound: they differ only in the
// private terms of the two sum-rate inequalities.
Polytope3 w_family_polytope(const JointPmf& p, double sum_y_term,
                            double sum_z_term, const std::string& sum_y_name,
                            const std::string& sum_z_name) {
  auto I = [&](const S& a, const S& b, const S& c = {}) {
    return cond_mutual_info(p, a, b, c);
  };
  const double i_w_y = I({"W"}, {"Y"});
  const double i_w_z = I({"W"}, {"Z"});
  const double i_u_y_w = I({"U"}, {"Y"}, {"W"});
  const double i_v_z_w = I({"V"}, {"Z"}, {"W"});

  Polytope3 out;
  out.add_row({kR0, i_w_y, "R0 <= I(W;Y)"});
  out.add_row({kR0, i_w_z, "R0 <= I(W;Z)"});
  out.add_row({kR01, i_u_y_w + i_w_y, "R0+R1 <= I(U;Y|W)+I(W;Y)"});
  out.add_row({kR01, i_u_y_w + i_w_z, "R0+R1 <= I(U;Y|W)+I(W;Z)"});
  out.add_row({kR02, i_v_z_w + i_w_y, "R0+R2 <= I(V;Z|W)+I(W;Y)"});
  out.add_row({kR02, i_v_z_w + i_w_z, "R0+R2 <= I(V;Z|W)+I(W;Z)"});
  out.add_row({kR012, sum_y_term + i_v_z_w + i_w_y,
               "R0+R1+R2 <= " + sum_y_name + "+I(V;Z|W)+I(W;Y)"});
  out.add_row({kR012, sum_y_term + i_v_z_w + i_w_z,
               "R0+R1+R2 <= " + sum_y_name + "+I(V;Z|W)+I(W;Z)"});
  out.add_row({kR012, i_u_y_w + sum_z_term + i_w_y,
               "R0+R1+R2 <= I(U;Y|W)+" + sum_z_name + "+I(W;Y)"});
  out.add_row({kR012, i_u_y_w + sum_z_term + i_w_z,
               "R0+R1+R2 <= I(U;Y|W)+" + sum_z_name + "+I(W;Z)"});
  return out;
}

}  // namespace

Polytope3 bound2_polytope(const JointPmf& p) {
  require_vars(p, {"U", "V", "W", "X", "Y", "Z"}, "bound2_polytope");
  auto I = [&](const S& a, const S& b, const S& c) {
    return cond_mutual_info(p, a, b, c);
  };
  const double sum_y = I({"U"}, {"Y"}, {"V", "W"});
  const double sum_z = I({"V"}, {"Z"}, {"U", "W"});
  return w_family_polytope(p, sum_y, sum_z, "I(U;Y|V,W)", "I(V;Z|U,W)");
}

Polytope3 uvw_polytope(const JointPmf& p) {
  require_vars(p, {"U", "V", "W", "X", "Y", "Z"}, "uvw_polytope");
  auto I = [&](const S& a, const S& b, const S& c) {
    return cond_mutual_info(p, a, b, c);
  };
  const double sum_y = I({"X"}, {"Y"}, {"V", "W"});
  const double sum_z = I({"X"}, {"Z"}, {"U", "W"});
  return w_family_polytope(p, sum_y, sum_z, "I(X;Y|V,W)", "I(X;Z|U,W)");
}

Polytope3 uv_polytope(const JointPmf& p) {
  require_vars(p, {"U", "V", "X", "Y", "Z"}, "uv_polytope");
  auto I = [&](const S& a, const S& b, const S& c = {}) {
    return cond_mutual_info(p, a, b, c);
  };
  const double i_u_y = I({"U"}, {"Y"});
  const double i_v_z = I({"V"}, {"Z"});
  const double i_x_y_v = I({"X"}, {"Y"}, {"V"});
  const double i_x_z_u = I({"X"}, {"Z"}, {"U"});

  Polytope3 out;
  out.add_row({kR0, 0.0, "R0 <= 0"});
  out.add_row({kR1, i_u_y, "R1 <= I(U;Y)"});
  out.add_row({kR2, i_v_z, "R2 <= I(V;Z)"});
  out.add_row({kR12, i_x_y_v + i_v_z, "R1+R2 <= I(X;Y|V)+I(V;Z)"});
  out.add_row({kR12, i_u_y + i_x_z_u, "R1+R2 <= I(U;Y)+I(X;Z|U)"});
  return out;
}

}  // namespace bcb
