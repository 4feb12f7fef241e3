#ifndef BCB_TOOLS_COMMANDS_HPP
#define BCB_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bcbtool {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerifyFail = 3;

struct OptimizerOptions {
  int restarts = 40;
  int max_iters = 150;
  double step_init = 0.1;
  double fd_step = 1e-5;
  double opt_tol = 1e-8;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct ComputeRegionOptions {
  std::string channel = "copy";
  std::string bound = "uvw";
  std::vector<std::string> weights;  // "w0,w1,w2" items; empty = 13-fan
  std::string cards;                 // "W=7,U=3"
  bool x_stochastic = false;
  OptimizerOptions opt;
  std::string out = "region";
};

struct VerifySymmetrizationOptions {
  std::string channel = "bsc-bc:0.1,0.2";
  int fixtures = 100;
  std::string cards;  // "U=2,V=2,T=2,W1=2,W2=2"
  bool corrupt = false;
  std::uint64_t seed = 1;
  std::string out = "verify";
};

struct CompareBoundsOptions {
  std::string bound_a = "uvw";
  std::string bound_b = "uv";
  std::string channel = "bsc-bc:0.1,0.2";
  std::vector<std::string> weights;  // empty = fan (9-dir if r0_zero)
  std::string cards_a;
  std::string cards_b;
  bool r0_zero = false;
  bool informative = false;
  double tol = 5e-3;
  OptimizerOptions opt;
  std::string out = "compare";
};

struct SaturationOptions {
  std::string channel = "blackwell";
  std::string bound = "uvw";
  std::vector<std::string> weights;  // empty = 13-fan
  std::string base_cards;            // empty = spec defaults
  std::string enlarged_cards;        // empty = defaults grown by +2
  bool informative = false;
  double tol = 5e-3;
  OptimizerOptions opt;
  std::string out = "saturation";
};

int run_compute_region(const ComputeRegionOptions& opts);
int run_verify_symmetrization(const VerifySymmetrizationOptions& opts);
int run_compare_bounds(const CompareBoundsOptions& opts);
int run_saturation(const SaturationOptions& opts);

}  // namespace bcbtool

#endif  // BCB_TOOLS_COMMANDS_HPP
