#include "bcb/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bcb {

Channel::Channel(int x_card, int y_card, int z_card,
                 std::vector<double> kernel)
    : x_card_(x_card),
      y_card_(y_card),
      z_card_(z_card),
      row_len_(static_cast<std::size_t>(y_card) * z_card),
      kernel_(std::move(kernel)) {
  if (x_card < 1 || y_card < 1 || z_card < 1)
    throw std::invalid_argument("Channel: cardinalities must be >= 1");
  if (kernel_.size() != static_cast<std::size_t>(x_card) * row_len_)
    throw std::invalid_argument("Channel: kernel size mismatch");
  const ChannelValidation v = validate(x_card_, y_card_, z_card_, kernel_);
  if (!v.ok) throw std::invalid_argument("Channel: " + v.detail);
}

ChannelValidation validate(int x_card, int y_card, int z_card,
                           const std::vector<double>& kernel, double tol) {
  ChannelValidation out;
  const std::size_t row_len = static_cast<std::size_t>(y_card) * z_card;
  if (kernel.size() != static_cast<std::size_t>(x_card) * row_len) {
    out.ok = false;
    out.detail = "kernel size does not match cardinalities";
    return out;
  }
  for (int x = 0; x < x_card; ++x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row_len; ++i) {
      const double v = kernel[static_cast<std::size_t>(x) * row_len + i];
      if (v < 0.0) {
        out.ok = false;
        out.row = x;
        out.deviation = -v;
        std::ostringstream msg;
        msg << "negative entry " << v << " in row x=" << x;
        out.detail = msg.str();
        return out;
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      out.ok = false;
      out.row = x;
      out.deviation = std::abs(sum - 1.0);
      std::ostringstream msg;
      msg << "row x=" << x << " sums to " << sum << " (off by "
          << out.deviation << ")";
      out.detail = msg.str();
      return out;
    }
  }
  return out;
}

ChannelValidation validate(const Channel& ch, double tol) {
  return validate(ch.x_card(), ch.y_card(), ch.z_card(), ch.kernel(), tol);
}

Channel make_bsc_bc(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 0.5) || !(p2 >= 0.0 && p2 <= 0.5))
    throw std::invalid_argument(
        "make_bsc_bc: flip probabilities must lie in [0, 1/2]");
  std::vector<double> kernel(8, 0.0);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) {
        const double py = (y == x) ? 1.0 - p1 : p1;
        const double pz = (z == x) ? 1.0 - p2 : p2;
        kernel[static_cast<std::size_t>(x) * 4 + y * 2 + z] = py * pz;
      }
    }
  }
  return Channel(2, 2, 2, std::move(kernel));
}

Channel make_blackwell() {
  std::vector<double> kernel(12, 0.0);
  auto set = [&](int x, int y, int z) {
    kernel[static_cast<std::size_t>(x) * 4 + y * 2 + z] = 1.0;
  };
  set(0, 0, 0);
  set(1, 0, 1);
  set(2, 1, 1);
  return Channel(3, 2, 2, std::move(kernel));
}

namespace {

int require_card(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    throw std::runtime_error(std::string("channel file: missing field '") +
                             key + "'");
  if (!j[key].is_number_integer() || j[key].get<long long>() < 1)
    throw std::runtime_error(std::string("channel file: field '") + key +
                             "' must be a positive integer");
  return j[key].get<int>();
}

}  // namespace

Channel load_channel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("channel file: cannot open '" + path.string() +
                             "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("channel file '" + path.string() +
                             "': " + e.what());
  }

  const int x_card = require_card(j, "x_card");
  const int y_card = require_card(j, "y_card");
  const int z_card = require_card(j, "z_card");
  if (!j.contains("kernel") || !j["kernel"].is_array())
    throw std::runtime_error("channel file: field 'kernel' must be a list");
  const auto& rows = j["kernel"];
  if (static_cast<int>(rows.size()) != x_card)
    throw std::runtime_error("channel file: kernel has " +
                             std::to_string(rows.size()) + " rows, expected " +
                             std::to_string(x_card));

  const std::size_t row_len = static_cast<std::size_t>(y_card) * z_card;
  std::vector<double> kernel;
  kernel.reserve(static_cast<std::size_t>(x_card) * row_len);
  for (int x = 0; x < x_card; ++x) {
    const auto& row = rows[x];
    if (!row.is_array() || row.size() != row_len)
      throw std::runtime_error("channel file: kernel row " +
                               std::to_string(x) + " must hold " +
                               std::to_string(row_len) + " probabilities");
    for (const auto& v : row) {
      if (!v.is_number())
        throw std::runtime_error("channel file: kernel row " +
                                 std::to_string(x) +
                                 " contains a non-numeric entry");
      kernel.push_back(v.get<double>());
    }
  }

  // Accept hand-written decimals up to kLoadRowTol, renormalizing; keep
  // rows already within the internal tolerance verbatim so that
  // load(save(ch)) is bit-exact.
  const ChannelValidation strict =
      validate(x_card, y_card, z_card, kernel, Channel::kRowTol);
  if (!strict.ok) {
    const ChannelValidation loose =
        validate(x_card, y_card, z_card, kernel, kLoadRowTol);
    if (!loose.ok)
      throw std::runtime_error("channel file: " + loose.detail);
    for (int x = 0; x < x_card; ++x) {
      double sum = 0.0;
      for (std::size_t i = 0; i < row_len; ++i)
        sum += kernel[static_cast<std::size_t>(x) * row_len + i];
      for (std::size_t i = 0; i < row_len; ++i)
        kernel[static_cast<std::size_t>(x) * row_len + i] /= sum;
    }
  }
  return Channel(x_card, y_card, z_card, std::move(kernel));
}

void save_channel(const Channel& ch, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["x_card"] = ch.x_card();
  j["y_card"] = ch.y_card();
  j["z_card"] = ch.z_card();
  const std::size_t row_len =
      static_cast<std::size_t>(ch.y_card()) * ch.z_card();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int x = 0; x < ch.x_card(); ++x) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < row_len; ++i) row.push_back(ch.row(x)[i]);
    rows.push_back(std::move(row));
  }
  j["kernel"] = std::move(rows);
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("channel file: cannot write '" + path.string() +
                             "'");
  out << j.dump(2) << '\n';
}

Channel channel_from_spec(const std::string& spec) {
  if (spec == "copy") return make_bsc_bc(0.0, 0.0);
  if (spec == "blackwell") return make_blackwell();
  if (spec.rfind("bsc-bc:", 0) == 0) {
    const std::string args = spec.substr(7);
    const std::size_t comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument(
          "channel spec: expected bsc-bc:p1,p2, got '" + spec + "'");
    try {
      const double p1 = std::stod(args.substr(0, comma));
      const double p2 = std::stod(args.substr(comma + 1));
      return make_bsc_bc(p1, p2);
    } catch (const std::logic_error&) {
      throw std::invalid_argument(
          "channel spec: cannot parse flip probabilities in '" + spec + "'");
    }
  }
  return load_channel(spec);
}

}  // namespace bcb
