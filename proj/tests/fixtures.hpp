// Seeded random fixtures shared by the unit and acceptance suites.
#ifndef BCB_TESTS_FIXTURES_HPP
#define BCB_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "bcb/channel.hpp"
#include "bcb/probkit.hpp"
#include "bcb/rng.hpp"

namespace bcb::testing {

inline JointPmf random_joint(const std::vector<VarLabel>& vars,
                             std::uint64_t seed) {
  Rng rng(seed);
  return JointPmf::random(vars, rng);
}

// Random joint over aux variables with X a deterministic function of them:
// a Dirichlet point on the aux cells pushed onto a random map.
inline JointPmf random_deterministic_x(const std::vector<VarLabel>& aux,
                                       int x_card, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t cells = 1;
  for (const auto& v : aux) cells *= static_cast<std::size_t>(v.card);
  const std::vector<double> p = rng.simplex_point(cells);

  std::vector<VarLabel> vars = aux;
  vars.push_back({"X", x_card});
  std::vector<double> mass(cells * static_cast<std::size_t>(x_card), 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t x = rng.index(static_cast<std::size_t>(x_card));
    mass[c * static_cast<std::size_t>(x_card) + x] = p[c];
  }
  return JointPmf(std::move(vars), std::move(mass));
}

inline Channel random_channel(int x_card, int y_card, int z_card,
                              std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t row_len = static_cast<std::size_t>(y_card) * z_card;
  std::vector<double> kernel(static_cast<std::size_t>(x_card) * row_len);
  for (int x = 0; x < x_card; ++x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row_len; ++i) {
      const double v = rng.exponential();
      kernel[static_cast<std::size_t>(x) * row_len + i] = v;
      sum += v;
    }
    for (std::size_t i = 0; i < row_len; ++i)
      kernel[static_cast<std::size_t>(x) * row_len + i] /= sum;
  }
  return Channel(x_card, y_card, z_card, std::move(kernel));
}

inline std::vector<VarLabel> binary_nj_vars() {
  return {{"U", 2}, {"V", 2}, {"T", 2}, {"W1", 2}, {"W2", 2}, {"X", 2}};
}

inline std::vector<VarLabel> binary_w_vars() {
  return {{"U", 2}, {"V", 2}, {"W", 2}, {"X", 2}};
}

}  // namespace bcb::testing

#endif  // BCB_TESTS_FIXTURES_HPP
