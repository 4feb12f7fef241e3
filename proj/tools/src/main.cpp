// bcb: outer-bound rate regions for two-receiver broadcast channels.
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "bcb/version.hpp"
#include "commands.hpp"

namespace {

void add_optimizer_flags(CLI::App* cmd, bcbtool::OptimizerOptions* opt) {
  cmd->add_option("--restarts", opt->restarts, "ascent restarts per weight")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", opt->max_iters, "ascent iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt->seed, "optimizer seed");
  cmd->add_option("--threads", opt->threads,
                  "worker threads (0 = hardware); results are "
                  "thread-count independent");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"outer-bound rate regions for 2-receiver broadcast channels"};
  app.set_version_flag("--version", bcb::kVersion);
  app.require_subcommand(1);

  bcbtool::ComputeRegionOptions region;
  auto* cr = app.add_subcommand(
      "compute-region", "trace a bound's boundary over weight directions");
  cr->add_option("--channel", region.channel,
                 "builtin (copy | blackwell | bsc-bc:p1,p2) or file path");
  cr->add_option("--bound", region.bound, "nj | bound2 | uvw | uv");
  cr->add_option("--weights", region.weights,
                 "weight triples w0,w1,w2 (repeat or separate with ';'); "
                 "default is the 13-direction fan");
  cr->add_option("--cards", region.cards,
                 "auxiliary cardinalities, e.g. W=7,U=3,V=3");
  cr->add_flag("--x-stochastic", region.x_stochastic,
               "relax the deterministic-encoder restriction");
  cr->add_option("--out", region.out, "output path prefix");
  add_optimizer_flags(cr, &region.opt);

  bcbtool::VerifySymmetrizationOptions verify;
  auto* vs = app.add_subcommand(
      "verify-symmetrization",
      "machine-check the star construction, its preserved mutual "
      "informations, and the substitution embeddings");
  vs->add_option("--channel", verify.channel, "channel spec");
  vs->add_option("--fixtures", verify.fixtures, "random sources to test")
      ->check(CLI::PositiveNumber);
  vs->add_option("--cards", verify.cards,
                 "source cardinalities, e.g. U=2,V=2,T=3,W1=2,W2=2");
  vs->add_flag("--corrupt", verify.corrupt,
               "negative control: corrupt the construction and expect "
               "failure (exit 3)");
  vs->add_option("--seed", verify.seed, "fixture seed");
  vs->add_option("--out", verify.out, "output path prefix");

  bcbtool::CompareBoundsOptions compare;
  auto* cb = app.add_subcommand("compare-bounds",
                                "twin-optimize two bounds and report gaps");
  cb->add_option("bound_a", compare.bound_a, "first bound kind")->required();
  cb->add_option("bound_b", compare.bound_b, "second bound kind")->required();
  cb->add_option("--channel", compare.channel, "channel spec");
  cb->add_option("--weights", compare.weights, "weight triples");
  cb->add_option("--cards", compare.cards_a,
                 "cardinality overrides for the first bound");
  cb->add_option("--cards-b", compare.cards_b,
                 "cardinality overrides for the second bound");
  int r0_value = -1;
  cb->add_option("--r0", r0_value,
                 "set to 0 to compare private-message slices over the "
                 "9-direction fan")
      ->check(CLI::Range(0, 0));
  cb->add_flag("--informative", compare.informative,
               "report gaps without pass/fail (automatic when both kinds "
               "are equal)");
  cb->add_option("--tol", compare.tol, "pass threshold in bits");
  cb->add_option("--out", compare.out, "output path prefix");
  add_optimizer_flags(cb, &compare.opt);

  bcbtool::SaturationOptions saturation;
  auto* st = app.add_subcommand(
      "saturation",
      "check that enlarging auxiliary cardinalities does not grow the "
      "region");
  st->add_option("--channel", saturation.channel, "channel spec");
  st->add_option("--bound", saturation.bound, "bound kind");
  st->add_option("--weights", saturation.weights, "weight triples");
  st->add_option("--cards", saturation.base_cards,
                 "base cardinalities (default: the bound's caps)");
  st->add_option("--enlarged-cards", saturation.enlarged_cards,
                 "enlarged cardinalities (default: base + 2 each)");
  st->add_flag("--informative", saturation.informative,
               "report gaps without pass/fail");
  st->add_option("--tol", saturation.tol, "pass threshold in bits");
  st->add_option("--out", saturation.out, "output path prefix");
  add_optimizer_flags(st, &saturation.opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? bcbtool::kExitOk : bcbtool::kExitUsage;
  }
  compare.r0_zero = (r0_value == 0);

  try {
    if (cr->parsed()) return bcbtool::run_compute_region(region);
    if (vs->parsed()) return bcbtool::run_verify_symmetrization(verify);
    if (cb->parsed()) return bcbtool::run_compare_bounds(compare);
    if (st->parsed()) return bcbtool::run_saturation(saturation);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bcbtool::kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bcbtool::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return bcbtool::kExitInternal;
  }
  return bcbtool::kExitInternal;
}
