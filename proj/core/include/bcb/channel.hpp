#ifndef BCB_CHANNEL_HPP
#define BCB_CHANNEL_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace bcb {

// Two-receiver discrete memoryless broadcast channel p(y,z|x). The kernel
// is stored row-major: row x holds y_card*z_card probabilities in
// (y-major, z-minor) order. Rows must be nonnegative and sum to one
// within kRowTol.
class Channel {
 public:
  static constexpr double kRowTol = 1e-12;

  Channel(int x_card, int y_card, int z_card, std::vector<double> kernel);

  int x_card() const { return x_card_; }
  int y_card() const { return y_card_; }
  int z_card() const { return z_card_; }

  double prob(int x, int y, int z) const {
    return kernel_[static_cast<std::size_t>(x) * row_len_ +
                   static_cast<std::size_t>(y) * z_card_ + z];
  }
  const double* row(int x) const {
    return kernel_.data() + static_cast<std::size_t>(x) * row_len_;
  }
  const std::vector<double>& kernel() const { return kernel_; }

 private:
  int x_card_, y_card_, z_card_;
  std::size_t row_len_;
  std::vector<double> kernel_;
};

// Report-style validation; `ok` is false on the first offending row.
struct ChannelValidation {
  bool ok = true;
  int row = -1;
  double deviation = 0.0;  // |row sum - 1|, or magnitude of a negative entry
  std::string detail;
};

ChannelValidation validate(int x_card, int y_card, int z_card,
                           const std::vector<double>& kernel,
                           double tol = Channel::kRowTol);
ChannelValidation validate(const Channel& ch, double tol = Channel::kRowTol);

// Binary-input broadcast channel with independent bit flips:
// Y = X ^ N1, Z = X ^ N2, N1 ~ Bern(p1), N2 ~ Bern(p2). Requires
// 0 <= p1, p2 <= 1/2.
Channel make_bsc_bc(double p1, double p2);

// Deterministic channel with |X| = 3 and binary outputs:
// x=0 -> (0,0), x=1 -> (0,1), x=2 -> (1,1).
Channel make_blackwell();

// File format: a JSON object with keys exactly "x_card", "y_card",
// "z_card" and "kernel" (list of x_card rows, each a list of
// y_card*z_card probabilities in (y-major, z-minor) order).
//
// On load, row sums within 1e-12 are taken verbatim; sums off by more
// than 1e-12 but within kLoadRowTol are renormalized; anything worse is
// rejected. save followed by load reproduces the kernel bit-exactly.
inline constexpr double kLoadRowTol = 1e-9;

Channel load_channel(const std::filesystem::path& path);
void save_channel(const Channel& ch, const std::filesystem::path& path);

// Builtin shorthand: "copy", "blackwell", or "bsc-bc:p1,p2". Anything
// else is treated as a file path.
Channel channel_from_spec(const std::string& spec);

}  // namespace bcb

#endif  // BCB_CHANNEL_HPP
