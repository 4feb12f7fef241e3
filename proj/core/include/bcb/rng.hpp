#ifndef BCB_RNG_HPP
#define BCB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bcb {

// Deterministic RNG wrapper. std::mt19937_64 is fully specified by the
// standard; the double mappings below avoid std::*_distribution, whose
// output is implementation-defined. Identical seeds give identical
// streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). Modulo bias is irrelevant at these sizes.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(eng_() % static_cast<std::uint64_t>(n));
  }

  // Exponential(1) draw; building block for Dirichlet(1) points.
  double exponential() { return -std::log(uniform_pos()); }

  // Flat Dirichlet(1,...,1) sample of length n: a uniform point on the
  // probability simplex.
  std::vector<double> simplex_point(std::size_t n) {
    std::vector<double> out(n);
    double total = 0.0;
    for (auto& v : out) {
      v = exponential();
      total += v;
    }
    for (auto& v : out) v /= total;
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

// Stable stream splitting: derive an independent child seed from a base
// seed and an index (SplitMix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bcb

#endif  // BCB_RNG_HPP
