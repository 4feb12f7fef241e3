#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "bcb/channel.hpp"
#include "bcb/probkit.hpp"
#include "bcb/regions.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bcb;
using bcb::testing::grid_support_oracle;
using bcb::testing::oracle_cmi;

namespace {

JointPmf nj_fixture(std::uint64_t seed) {
  return attach_channel(testing::random_joint(testing::binary_nj_vars(), seed),
                        make_bsc_bc(0.1, 0.2));
}

JointPmf w_fixture(std::uint64_t seed) {
  return attach_channel(testing::random_joint(testing::binary_w_vars(), seed),
                        make_bsc_bc(0.1, 0.2));
}

bool has_vertex(const std::vector<RatePoint>& verts, double r0, double r1,
                double r2) {
  for (const auto& v : verts) {
    if (std::abs(v.r0 - r0) + std::abs(v.r1 - r1) + std::abs(v.r2 - r2) <=
        3e-8)
      return true;
  }
  return false;
}

}  // namespace

TEST_CASE("nj_polytope: constant auxiliaries zero the R0 rows") {
  // All five auxiliaries constant, X uniform binary.
  std::vector<VarLabel> vars{{"U", 1}, {"V", 1}, {"T", 1},
                             {"W1", 1}, {"W2", 1}, {"X", 2}};
  const JointPmf p =
      attach_channel(JointPmf(vars, {0.5, 0.5}), make_bsc_bc(0.1, 0.2));
  const Polytope3 poly = nj_polytope(p);
  REQUIRE(poly.rows().size() == 12);
  for (const auto& row : poly.rows()) {
    if (row.coeffs == std::array<double, 3>{1.0, 0.0, 0.0})
      CHECK(row.rhs <= 1e-12);
  }
}

TEST_CASE("nj_polytope: copy channel with U=V=T=X uniform gives 1-bit R0") {
  // u = v = t = x, uniform; W1, W2 constant.
  std::vector<VarLabel> vars{{"U", 2}, {"V", 2}, {"T", 2},
                             {"W1", 1}, {"W2", 1}, {"X", 2}};
  std::vector<double> mass(16, 0.0);
  // layout: U,V,T,W1,W2,X with W's singleton
  mass[0] = 0.5;   // (0,0,0,0,0,0)
  mass[15] = 0.5;  // (1,1,1,0,0,1)
  const JointPmf p = attach_channel(JointPmf(vars, mass), make_bsc_bc(0, 0));
  const Polytope3 poly = nj_polytope(p);
  CHECK(poly.rows()[0].rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(poly.rows()[1].rhs == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nj_polytope: rhs values match the summation oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const JointPmf p = nj_fixture(11000 + seed);
    const Polytope3 poly = nj_polytope(p);
    const auto& r = poly.rows();
    auto I = [&](std::vector<std::string> a, std::vector<std::string> b,
                 std::vector<std::string> c = {}) {
      const double v = oracle_cmi(p, a, b, c);
      return v < 0.0 ? 0.0 : v;
    };
    CHECK(r[0].rhs == doctest::Approx(I({"T"}, {"Y"}, {"W1"})).epsilon(1e-9));
    CHECK(r[1].rhs == doctest::Approx(I({"T"}, {"Z"}, {"W2"})).epsilon(1e-9));
    CHECK(r[2].rhs == doctest::Approx(I({"U"}, {"Y"}, {"W1"})).epsilon(1e-9));
    CHECK(r[3].rhs == doctest::Approx(I({"V"}, {"Z"}, {"W2"})).epsilon(1e-9));
    CHECK(r[4].rhs ==
          doctest::Approx(I({"T", "U"}, {"Y"}, {"W1"})).epsilon(1e-9));
    CHECK(r[5].rhs == doctest::Approx(I({"U"}, {"Y"}, {"T", "W1", "W2"}) +
                                      I({"T", "W1"}, {"Z"}, {"W2"}))
                          .epsilon(1e-9));
    CHECK(r[6].rhs ==
          doctest::Approx(I({"T", "V"}, {"Z"}, {"W2"})).epsilon(1e-9));
    CHECK(r[7].rhs == doctest::Approx(I({"V"}, {"Z"}, {"T", "W1", "W2"}) +
                                      I({"T", "W2"}, {"Y"}, {"W1"}))
                          .epsilon(1e-9));
    CHECK(r[8].rhs ==
          doctest::Approx(I({"U"}, {"Y"}, {"T", "V", "W1", "W2"}) +
                          I({"T", "V", "W1"}, {"Z"}, {"W2"}))
              .epsilon(1e-9));
    CHECK(r[9].rhs ==
          doctest::Approx(I({"V"}, {"Z"}, {"T", "U", "W1", "W2"}) +
                          I({"T", "U", "W2"}, {"Y"}, {"W1"}))
              .epsilon(1e-9));
    CHECK(r[10].rhs ==
          doctest::Approx(I({"U"}, {"Y"}, {"T", "V", "W1", "W2"}) +
                          I({"T", "W2"}, {"Y"}, {"W1"}) +
                          I({"V"}, {"Z"}, {"T", "W1", "W2"}))
              .epsilon(1e-9));
    CHECK(r[11].rhs ==
          doctest::Approx(I({"V"}, {"Z"}, {"T", "U", "W1", "W2"}) +
                          I({"T", "W1"}, {"Z"}, {"W2"}) +
                          I({"U"}, {"Y"}, {"T", "W1", "W2"}))
              .epsilon(1e-9));
  }
}

TEST_CASE("bound2_polytope: examples and oracle match") {
  // W constant: R0 rows have rhs 0.
  {
    std::vector<VarLabel> vars{{"U", 2}, {"V", 2}, {"W", 1}, {"X", 2}};
    const JointPmf p = attach_channel(
        testing::random_joint(vars, 42), make_bsc_bc(0.1, 0.2));
    const Polytope3 poly = bound2_polytope(p);
    CHECK(poly.rows()[0].rhs <= 1e-12);
    CHECK(poly.rows()[1].rhs <= 1e-12);
  }
  // U = X uniform, V, W constant, copy channel: R0+R1 rhs = H(X) = 1.
  {
    std::vector<VarLabel> vars{{"U", 2}, {"V", 1}, {"W", 1}, {"X", 2}};
    std::vector<double> mass{0.5, 0.0, 0.0, 0.5};
    const JointPmf p =
        attach_channel(JointPmf(vars, mass), make_bsc_bc(0, 0));
    const Polytope3 poly = bound2_polytope(p);
    CHECK(poly.rows()[2].rhs == doctest::Approx(1.0).epsilon(1e-12));
  }
  // random: all ten rows against the oracle
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const JointPmf p = w_fixture(12000 + seed);
    const Polytope3 poly = bound2_polytope(p);
    auto I = [&](std::vector<std::string> a, std::vector<std::string> b,
                 std::vector<std::string> c = {}) {
      const double v = oracle_cmi(p, a, b, c);
      return v < 0.0 ? 0.0 : v;
    };
    const double iwy = I({"W"}, {"Y"});
    const double iwz = I({"W"}, {"Z"});
    const double iuyw = I({"U"}, {"Y"}, {"W"});
    const double ivzw = I({"V"}, {"Z"}, {"W"});
    const double suy = I({"U"}, {"Y"}, {"V", "W"});
    const double svz = I({"V"}, {"Z"}, {"U", "W"});
    const std::vector<double> expect{
        iwy, iwz, iuyw + iwy, iuyw + iwz, ivzw + iwy, ivzw + iwz,
        suy + ivzw + iwy, suy + ivzw + iwz, iuyw + svz + iwy,
        iuyw + svz + iwz};
    REQUIRE(poly.rows().size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
      CHECK(poly.rows()[i].rhs == doctest::Approx(expect[i]).epsilon(1e-9));
  }
}

TEST_CASE("uvw_polytope: collapses to bound2 under deterministic X") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const JointPmf p = attach_channel(
        testing::random_deterministic_x(
            {{"U", 2}, {"V", 2}, {"W", 3}}, 2, 13000 + seed),
        make_bsc_bc(0.1, 0.2));
    const Polytope3 a = uvw_polytope(p);
    const Polytope3 b = bound2_polytope(p);
    REQUIRE(a.rows().size() == b.rows().size());
    for (std::size_t i = 0; i < a.rows().size(); ++i) {
      CHECK(a.rows()[i].coeffs == b.rows()[i].coeffs);
      CHECK(std::abs(a.rows()[i].rhs - b.rows()[i].rhs) <= 1e-9);
    }
  }
}

TEST_CASE("uvw_polytope: dominates bound2 sum-rate rows for stochastic X") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const JointPmf p = w_fixture(14000 + seed);
    const Polytope3 a = uvw_polytope(p);
    const Polytope3 b = bound2_polytope(p);
    for (std::size_t i = 6; i < 10; ++i)
      CHECK(a.rows()[i].rhs >= b.rows()[i].rhs - 1e-9);
  }
}

TEST_CASE("uvw_polytope: W constant, U = X, V constant") {
  std::vector<VarLabel> vars{{"U", 2}, {"V", 1}, {"W", 1}, {"X", 2}};
  std::vector<double> mass{0.5, 0.0, 0.0, 0.5};
  const JointPmf p =
      attach_channel(JointPmf(vars, mass), make_bsc_bc(0.1, 0.2));
  const Polytope3 poly = uvw_polytope(p);
  // sum-rate row: I(X;Y|V,W) + I(V;Z|W) + I(W;Y) = I(X;Y)
  const double ixy = cond_mutual_info(p, {"X"}, {"Y"});
  CHECK(poly.rows()[6].rhs == doctest::Approx(ixy).epsilon(1e-9));
}

TEST_CASE("uv_polytope: examples and oracle") {
  {
    std::vector<VarLabel> vars{{"U", 1}, {"V", 1}, {"X", 2}};
    const JointPmf p = attach_channel(testing::random_joint(vars, 5),
                                      make_bsc_bc(0.1, 0.2));
    const Polytope3 poly = uv_polytope(p);
    for (const auto& row : poly.rows())
      if (row.coeffs[1] + row.coeffs[2] == 1.0) CHECK(row.rhs <= 1e-12);
  }
  {
    std::vector<VarLabel> vars{{"U", 2}, {"V", 1}, {"X", 2}};
    std::vector<double> mass{0.5, 0.0, 0.0, 0.5};
    const JointPmf p =
        attach_channel(JointPmf(vars, mass), make_bsc_bc(0, 0));
    const Polytope3 poly = uv_polytope(p);
    CHECK(poly.rows()[1].rhs == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const JointPmf p = attach_channel(
        testing::random_joint({{"U", 2}, {"V", 3}, {"X", 2}}, 15000 + seed),
        make_bsc_bc(0.1, 0.2));
    const Polytope3 poly = uv_polytope(p);
    auto I = [&](std::vector<std::string> a, std::vector<std::string> b,
                 std::vector<std::string> c = {}) {
      const double v = oracle_cmi(p, a, b, c);
      return v < 0.0 ? 0.0 : v;
    };
    CHECK(poly.rows()[1].rhs ==
          doctest::Approx(I({"U"}, {"Y"})).epsilon(1e-9));
    CHECK(poly.rows()[2].rhs ==
          doctest::Approx(I({"V"}, {"Z"})).epsilon(1e-9));
    CHECK(poly.rows()[3].rhs ==
          doctest::Approx(I({"X"}, {"Y"}, {"V"}) + I({"V"}, {"Z"}))
              .epsilon(1e-9));
    CHECK(poly.rows()[4].rhs ==
          doctest::Approx(I({"U"}, {"Y"}) + I({"X"}, {"Z"}, {"U"}))
              .epsilon(1e-9));
  }
}

TEST_CASE("vertices: hand-enumerated cross-polytope corner") {
  Polytope3 p;
  p.add_row({{1, 0, 0}, 1.0, "R0 <= 1"});
  p.add_row({{1, 1, 0}, 1.0, "R0+R1 <= 1"});
  p.add_row({{1, 0, 1}, 1.0, "R0+R2 <= 1"});
  const auto verts = vertices(p);
  CHECK(verts.size() == 5);
  CHECK(has_vertex(verts, 0, 0, 0));
  CHECK(has_vertex(verts, 1, 0, 0));
  CHECK(has_vertex(verts, 0, 1, 0));
  CHECK(has_vertex(verts, 0, 0, 1));
  CHECK(has_vertex(verts, 0, 1, 1));
}

TEST_CASE("vertices: zero polytope and unboundedness") {
  Polytope3 zero;
  zero.add_row({{1, 1, 1}, 0.0, "sum <= 0"});
  const auto verts = vertices(zero);
  REQUIRE(verts.size() == 1);
  CHECK(has_vertex(verts, 0, 0, 0));

  Polytope3 unbounded;
  unbounded.add_row({{1, 0, 0}, 1.0, "R0 <= 1"});
  CHECK_THROWS_AS((void)vertices(unbounded), std::domain_error);
}

TEST_CASE("vertices: random bound2 polytopes are consistent") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Polytope3 poly = bound2_polytope(w_fixture(16000 + seed));
    const auto verts = vertices(poly);
    REQUIRE(!verts.empty());
    for (const auto& v : verts) {
      CHECK(v.r0 >= -1e-9);
      CHECK(v.r1 >= -1e-9);
      CHECK(v.r2 >= -1e-9);
      for (const auto& row : poly.rows()) {
        CHECK(row.coeffs[0] * v.r0 + row.coeffs[1] * v.r1 +
                  row.coeffs[2] * v.r2 <=
              row.rhs + 1e-8);
      }
    }
    // every row is tight at some vertex or redundant
    for (const auto& row : poly.rows()) {
      bool tight = false;
      for (const auto& v : verts) {
        const double lhs = row.coeffs[0] * v.r0 + row.coeffs[1] * v.r1 +
                           row.coeffs[2] * v.r2;
        if (std::abs(lhs - row.rhs) <= 1e-7) {
          tight = true;
          break;
        }
      }
      if (!tight) CHECK(redundancy_check(poly, {row.tag}));
    }
  }
}

TEST_CASE("support_value: examples") {
  Polytope3 p;
  p.add_row({{1, 0, 0}, 1.0, "R0 <= 1"});
  p.add_row({{1, 1, 0}, 1.0, "R0+R1 <= 1"});
  p.add_row({{1, 0, 1}, 1.0, "R0+R2 <= 1"});
  const auto [val, arg] = support_value(p, {1, 0, 0});
  CHECK(val == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(arg.r0 == doctest::Approx(1.0).epsilon(1e-9));

  Polytope3 zero;
  zero.add_row({{1, 1, 1}, 0.0, "sum <= 0"});
  const auto [zval, zarg] = support_value(zero, {0.3, 0.3, 0.4});
  CHECK(zval == 0.0);
  CHECK(zarg.r0 == 0.0);

  CHECK_THROWS_AS((void)support_value(p, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS((void)support_value(p, {-1, 0, 1}), std::invalid_argument);
}

TEST_CASE("support_value: grid oracle agreement on random polytopes") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Polytope3 poly = (seed % 2 == 0)
                               ? bound2_polytope(w_fixture(17000 + seed))
                               : nj_polytope(nj_fixture(17100 + seed));
    Rng rng(600 + seed);
    const std::array<double, 3> w{rng.uniform(), rng.uniform(),
                                  rng.uniform()};
    if (w[0] + w[1] + w[2] == 0.0) continue;
    const auto [val, arg] = support_value(poly, w);
    CHECK(val == doctest::Approx(grid_support_oracle(poly, w)).epsilon(1e-6));
  }
}

TEST_CASE("support_value: monotone under added rows") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Polytope3 poly = bound2_polytope(w_fixture(18000 + seed));
    Rng rng(700 + seed);
    const std::array<double, 3> w{rng.uniform(), rng.uniform(),
                                  1.0 + rng.uniform()};
    const double before = support_value(poly, w).first;
    poly.add_row({{1, 1, 1}, 0.8 * before, "extra"});
    const double after = support_value(poly, w).first;
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("contains: reflexivity and constructed violation") {
  const Polytope3 poly = bound2_polytope(w_fixture(19000));
  const ContainsReport self = contains(poly, poly);
  CHECK(self.ok);
  CHECK(self.worst_violation <= 1e-12);

  // Box inner with one rhs raised 0.1 beyond the outer box.
  auto box = [](double c0, double c1, double c2) {
    Polytope3 p;
    p.add_row({{1, 0, 0}, c0, "R0 cap"});
    p.add_row({{0, 1, 0}, c1, "R1 cap"});
    p.add_row({{0, 0, 1}, c2, "R2 cap"});
    return p;
  };
  const Polytope3 outer = box(0.5, 0.5, 0.5);
  const Polytope3 raised = box(0.6, 0.5, 0.5);
  const ContainsReport rep = contains(outer, raised);
  CHECK_FALSE(rep.ok);
  CHECK(rep.worst_violation == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(rep.row_tag == "R0 cap");
}

TEST_CASE("contains: both directions imply equal vertex sets") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Polytope3 a = bound2_polytope(w_fixture(20000 + seed));
    const Polytope3 b = uvw_polytope(w_fixture(20000 + seed));
    if (contains(a, b).ok && contains(b, a).ok) {
      const auto va = vertices(a);
      const auto vb = vertices(b);
      CHECK(va.size() == vb.size());
      for (const auto& v : va) CHECK(has_vertex(vb, v.r0, v.r1, v.r2));
    }
  }
}

TEST_CASE("redundancy_check: nonnegativity makes single-rate rows redundant") {
  Polytope3 p;
  p.add_row({{0, 1, 0}, 0.7, "R1 <= c"});
  p.add_row({{1, 1, 0}, 0.7, "R0+R1 <= c"});
  p.add_row({{1, 0, 0}, 0.4, "R0 <= a"});
  p.add_row({{0, 0, 1}, 0.5, "R2 <= b"});
  CHECK(redundancy_check(p, {"R1 <= c"}));

  Polytope3 q;
  q.add_row({{0, 1, 0}, 0.3, "R1 <= tight"});
  q.add_row({{1, 1, 0}, 0.7, "R0+R1 <= c"});
  q.add_row({{1, 0, 0}, 0.4, "R0 <= a"});
  q.add_row({{0, 0, 1}, 0.5, "R2 <= b"});
  CHECK_FALSE(redundancy_check(q, {"R1 <= tight"}));

  Polytope3 dup;
  dup.add_row({{1, 1, 1}, 1.0, "sum A"});
  dup.add_row({{1, 1, 1}, 1.0, "sum B"});
  CHECK(redundancy_check(dup, {"sum B"}));
  CHECK_THROWS_AS((void)redundancy_check(dup, {"no such tag"}),
                  std::invalid_argument);
}

TEST_CASE("slice_r0_zero: pins R0 and keeps rate rows") {
  const Polytope3 poly = uvw_polytope(w_fixture(21000));
  const Polytope3 slice = slice_r0_zero(poly);
  for (const auto& v : vertices(slice)) CHECK(std::abs(v.r0) <= 1e-9);
  // support in a w0=0 direction is unchanged by slicing
  const std::array<double, 3> w{0.0, 0.7, 0.3};
  CHECK(support_value(poly, w).first ==
        doctest::Approx(support_value(slice, w).first).epsilon(1e-9));
}
