#include <doctest.h>

#include <array>
#include <cmath>

#include "bcb/channel.hpp"
#include "bcb/optimizer.hpp"
#include "fixtures.hpp"

using namespace bcb;

namespace {

OptimizerConfig quick_cfg(int restarts = 6) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.max_iters = 80;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("maximize_support: copy channel reaches 1 bit on every axis") {
  const Channel ch = make_bsc_bc(0.0, 0.0);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uvw, ch);
  const OptimizerConfig cfg = quick_cfg();
  for (const std::array<double, 3> w :
       {std::array<double, 3>{1, 0, 0}, std::array<double, 3>{0, 1, 0},
        std::array<double, 3>{0, 0, 1}}) {
    const SupportRecord rec = maximize_support(ch, spec, w, cfg);
    CHECK(rec.value == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("maximize_support: BSC point-to-point capacity on the R1 axis") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uv, ch);
  const SupportRecord rec =
      maximize_support(ch, spec, {0, 1, 0}, quick_cfg(8));
  CHECK(rec.value == doctest::Approx(0.53100440641071878).epsilon(2e-3));
}

TEST_CASE("maximize_support: degenerate |X| = 1 channel gives zero") {
  const Channel ch(1, 1, 1, {1.0});
  AuxSpec spec;
  spec.kind = BoundKind::uv;
  spec.cards = {{"U", 1}, {"V", 1}};
  const SupportRecord rec =
      maximize_support(ch, spec, {0, 1, 1}, quick_cfg(2));
  CHECK(rec.value == 0.0);
}

TEST_CASE("maximize_support: record is internally consistent") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uvw, ch);
  const std::array<double, 3> w{0.2, 0.5, 0.3};
  const SupportRecord rec = maximize_support(ch, spec, w, quick_cfg(4));
  CHECK(rec.value >= 0.0);
  CHECK(rec.restarts_to_best >= 1);
  CHECK(rec.digest.size() == 16);
  // the reported value equals the support of the reported distribution
  const Polytope3 poly = uvw_polytope(attach_channel(rec.argmax_joint, ch));
  CHECK(support_value(poly, w).first ==
        doctest::Approx(rec.value).epsilon(1e-9));
}

TEST_CASE("maximize_support: determinism and restart monotonicity") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uv, ch);
  const std::array<double, 3> w{0, 0.6, 0.8};

  const SupportRecord a = maximize_support(ch, spec, w, quick_cfg(4));
  const SupportRecord b = maximize_support(ch, spec, w, quick_cfg(4));
  CHECK(a.value == b.value);
  CHECK(a.digest == b.digest);
  CHECK(a.restarts_to_best == b.restarts_to_best);

  const SupportRecord more = maximize_support(ch, spec, w, quick_cfg(8));
  CHECK(more.value >= a.value - 1e-12);

  // thread count must not affect the outcome
  OptimizerConfig serial = quick_cfg(4);
  serial.threads = 1;
  const SupportRecord c = maximize_support(ch, spec, w, serial);
  CHECK(c.value == a.value);
  CHECK(c.digest == a.digest);
}

TEST_CASE("maximize_support: stochastic-X relaxation flag") {
  const Channel ch = make_bsc_bc(0.0, 0.0);
  AuxSpec spec = AuxSpec::defaults(BoundKind::uvw, ch);
  spec.x_deterministic = false;
  const SupportRecord rec =
      maximize_support(ch, spec, {1, 0, 0}, quick_cfg(4));
  CHECK(rec.value == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("maximize_support: argument validation") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uv, ch);
  CHECK_THROWS_AS(
      (void)maximize_support(ch, spec, {0, 0, 0}, quick_cfg()),
      std::invalid_argument);
  AuxSpec bad = spec;
  bad.cards["U"] = 0;
  CHECK_THROWS_AS(
      (void)maximize_support(ch, bad, {0, 1, 0}, quick_cfg()),
      std::invalid_argument);
  OptimizerConfig cfg = quick_cfg();
  cfg.tol = 1e-12;
  CHECK_THROWS_AS((void)maximize_support(ch, spec, {0, 1, 0}, cfg),
                  std::invalid_argument);
}

TEST_CASE("trace_region: singleton equals maximize_support; sorted records") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uv, ch);
  const OptimizerConfig cfg = quick_cfg(3);

  const std::array<double, 3> w{0, 1, 0};
  const RegionEstimate single = trace_region(ch, spec, {w}, cfg);
  REQUIRE(single.records.size() == 1);
  CHECK(single.records[0].value ==
        maximize_support(ch, spec, w, cfg).value);

  const RegionEstimate est = trace_region(
      ch, spec, {{0, 1, 0}, {0, 0, 1}, {0, 0.5, 0.5}}, cfg);
  REQUIRE(est.records.size() == 3);
  for (std::size_t i = 1; i < est.records.size(); ++i)
    CHECK(est.records[i - 1].weight < est.records[i].weight);
  for (const auto& rec : est.records) CHECK(rec.value >= 0.0);
}

TEST_CASE("compare_bounds: identical specs give exactly zero gaps") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uv, ch);
  const CompareTable table = compare_bounds(
      ch, spec, spec, {{0, 1, 0}, {0, 0.5, 0.5}}, quick_cfg(3));
  for (const auto& row : table.rows) CHECK(row.diff == 0.0);
  CHECK(table.max_abs_diff == 0.0);
}

TEST_CASE("cardinality_saturation: enlarged == base gives zero gaps") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec spec = AuxSpec::defaults(BoundKind::uv, ch);
  const SaturationTable table = cardinality_saturation(
      ch, spec, {spec}, {{0, 1, 0}, {0, 0, 1}}, quick_cfg(3));
  CHECK(table.pass);
  for (const auto& row : table.rows) {
    CHECK(row.max_gap == 0.0);
    CHECK(row.pass);
  }
}

TEST_CASE("cardinality_saturation: rejects non-dominating enlargements") {
  const Channel ch = make_bsc_bc(0.1, 0.2);
  const AuxSpec base = AuxSpec::defaults(BoundKind::uvw, ch);
  AuxSpec smaller = base;
  smaller.cards["W"] = 1;
  CHECK_THROWS_AS((void)cardinality_saturation(ch, base, {smaller},
                                               {{1, 0, 0}}, quick_cfg(2)),
                  std::invalid_argument);
}

TEST_CASE("weight fans have the documented shapes") {
  const auto fan = default_weight_fan();
  REQUIRE(fan.size() == 13);
  for (const auto& w : fan) {
    const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto fan0 = private_weight_fan();
  REQUIRE(fan0.size() == 9);
  for (const auto& w : fan0) CHECK(w[0] == 0.0);
  CHECK(fan0.front()[1] == 1.0);
  CHECK(fan0.back()[2] == 1.0);
}

TEST_CASE("AuxSpec defaults follow the cardinality caps") {
  const Channel bsc = make_bsc_bc(0.1, 0.2);
  const AuxSpec uvw = AuxSpec::defaults(BoundKind::uvw, bsc);
  CHECK(uvw.card_of("W") == 7);
  CHECK(uvw.card_of("U") == 3);
  CHECK(uvw.card_of("V") == 3);
  const Channel bw = make_blackwell();
  const AuxSpec uv = AuxSpec::defaults(BoundKind::uv, bw);
  CHECK(uv.card_of("U") == 4);
  CHECK(uv.card_of("V") == 4);
  const AuxSpec nj = AuxSpec::defaults(BoundKind::nj, bsc);
  CHECK(nj.card_of("T") == 3);
  CHECK(nj.card_of("W1") == 2);
}

TEST_CASE("bound kind names round-trip") {
  for (const auto kind : {BoundKind::nj, BoundKind::bound2, BoundKind::uvw,
                          BoundKind::uv})
    CHECK(bound_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS((void)bound_kind_from_string("marton"),
                  std::invalid_argument);
}
