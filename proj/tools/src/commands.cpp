#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bcb/channel.hpp"
#include "bcb/optimizer.hpp"
#include "bcb/symmetrize.hpp"
#include "bcb/version.hpp"

namespace bcbtool {

namespace {

using bcb::AuxSpec;
using bcb::BoundKind;
using bcb::Channel;
using bcb::OptimizerConfig;
using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::map<std::string, int> parse_cards(const std::string& text) {
  std::map<std::string, int> cards;
  if (text.empty()) return cards;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("cards: expected NAME=COUNT, got '" + item +
                                  "'");
    const std::string name = item.substr(0, eq);
    const int card = std::stoi(item.substr(eq + 1));
    if (name.empty() || card < 1)
      throw std::invalid_argument("cards: bad entry '" + item + "'");
    cards[name] = card;
  }
  return cards;
}

std::vector<std::array<double, 3>> parse_weights(
    const std::vector<std::string>& items) {
  std::vector<std::array<double, 3>> out;
  for (const auto& raw : items) {
    std::stringstream ss(raw);
    std::string triple;
    while (std::getline(ss, triple, ';')) {
      std::array<double, 3> w{};
      if (std::sscanf(triple.c_str(), "%lf,%lf,%lf", &w[0], &w[1], &w[2]) != 3)
        throw std::invalid_argument("weights: expected w0,w1,w2, got '" +
                                    triple + "'");
      out.push_back(w);
    }
  }
  return out;
}

AuxSpec make_spec(BoundKind kind, const Channel& ch,
                  const std::string& cards_text, bool x_stochastic = false) {
  AuxSpec spec = AuxSpec::defaults(kind, ch);
  for (const auto& [name, card] : parse_cards(cards_text)) {
    if (spec.cards.find(name) == spec.cards.end())
      throw std::invalid_argument("cards: '" + name +
                                  "' is not an auxiliary of bound " +
                                  bcb::to_string(kind));
    spec.cards[name] = card;
  }
  spec.x_deterministic = !x_stochastic;
  return spec;
}

OptimizerConfig make_config(const OptimizerOptions& o) {
  OptimizerConfig cfg;
  cfg.restarts = o.restarts;
  cfg.max_iters = o.max_iters;
  cfg.step_init = o.step_init;
  cfg.fd_step = o.fd_step;
  cfg.tol = o.opt_tol;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  return cfg;
}

json config_json(const OptimizerOptions& o) {
  json j;
  j["restarts"] = o.restarts;
  j["max_iters"] = o.max_iters;
  j["step_init"] = o.step_init;
  j["fd_step"] = o.fd_step;
  j["opt_tol"] = o.opt_tol;
  j["seed"] = o.seed;
  return j;
}

json cards_json(const AuxSpec& spec) {
  json j;
  for (const auto& name : spec.aux_names()) j[name] = spec.card_of(name);
  return j;
}

json weights_json(const std::vector<std::array<double, 3>>& weights) {
  json j = json::array();
  for (const auto& w : weights) j.push_back({w[0], w[1], w[2]});
  return j;
}

json pmf_json(const bcb::JointPmf& p) {
  json vars = json::array();
  for (const auto& v : p.vars())
    vars.push_back({{"name", v.name}, {"card", v.card}});
  json mass = json::array();
  for (double m : p.mass()) mass.push_back(m);
  return json{{"vars", std::move(vars)}, {"mass", std::move(mass)}};
}

// The manifest serialized into every output. Everything in it is an input
// or a constant, so re-running the recorded command reproduces the tables
// byte for byte; wall-clock time is reported separately.
json make_manifest(const std::string& command, const json& details) {
  json j;
  j["command"] = command;
  j["version"] = bcb::kVersion;
  j.update(details);
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write output file '" + path + "'");
  out << text;
}

std::string manifest_comment(const json& manifest) {
  return "# manifest " + manifest.dump() + "\n";
}

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

}  // namespace

int run_compute_region(const ComputeRegionOptions& opts) {
  WallClock clock;
  const Channel ch = bcb::channel_from_spec(opts.channel);
  const BoundKind kind = bcb::bound_kind_from_string(opts.bound);
  const AuxSpec spec = make_spec(kind, ch, opts.cards, opts.x_stochastic);
  const std::vector<std::array<double, 3>> weights =
      opts.weights.empty() ? bcb::default_weight_fan()
                           : parse_weights(opts.weights);

  const bcb::RegionEstimate est =
      bcb::trace_region(ch, spec, weights, make_config(opts.opt));

  json details;
  details["channel"] = opts.channel;
  details["bound"] = opts.bound;
  details["cards"] = cards_json(spec);
  details["x_deterministic"] = spec.x_deterministic;
  details["weights"] = weights_json(weights);
  details["config"] = config_json(opts.opt);
  const json manifest = make_manifest("compute-region", details);

  std::string csv = "# bcb compute-region\n" + manifest_comment(manifest);
  csv += "w0,w1,w2,value,r0,r1,r2\n";
  for (const auto& rec : est.records) {
    csv += fmt(rec.weight[0]) + "," + fmt(rec.weight[1]) + "," +
           fmt(rec.weight[2]) + "," + fmt(rec.value) + "," +
           fmt(rec.argmax.r0) + "," + fmt(rec.argmax.r1) + "," +
           fmt(rec.argmax.r2) + "\n";
  }
  write_text(opts.out + ".csv", csv);

  json records = json::array();
  for (const auto& rec : est.records) {
    json r;
    r["weight"] = {rec.weight[0], rec.weight[1], rec.weight[2]};
    r["value"] = rec.value;
    r["rate_point"] = {rec.argmax.r0, rec.argmax.r1, rec.argmax.r2};
    r["digest"] = rec.digest;
    r["restarts_to_best"] = rec.restarts_to_best;
    r["argmax_distribution"] = pmf_json(rec.argmax_joint);
    records.push_back(std::move(r));
  }
  json doc;
  doc["manifest"] = manifest;
  doc["records"] = std::move(records);
  doc["wall_clock_s"] = clock.seconds();
  write_text(opts.out + ".json", doc.dump(2) + "\n");

  std::cout << "wrote " << opts.out << ".csv and " << opts.out << ".json ("
            << est.records.size() << " directions)\n";
  return kExitOk;
}

int run_verify_symmetrization(const VerifySymmetrizationOptions& opts) {
  WallClock clock;
  const Channel ch = bcb::channel_from_spec(opts.channel);
  std::array<int, 5> aux{2, 2, 2, 2, 2};
  {
    const auto cards = parse_cards(opts.cards);
    const std::array<const char*, 5> names{"U", "V", "T", "W1", "W2"};
    for (const auto& [name, card] : cards) {
      bool known = false;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (name == names[i]) {
          aux[i] = card;
          known = true;
        }
      }
      if (!known)
        throw std::invalid_argument("cards: '" + name +
                                    "' is not one of U,V,T,W1,W2");
    }
  }

  const bcb::SymmetrizationReport rep = bcb::verify_symmetrization(
      ch, opts.fixtures, opts.seed, aux, opts.corrupt);

  json details;
  details["channel"] = opts.channel;
  details["fixtures"] = opts.fixtures;
  details["cards"] = {{"U", aux[0]}, {"V", aux[1]}, {"T", aux[2]},
                      {"W1", aux[3]}, {"W2", aux[4]}};
  details["corrupt"] = opts.corrupt;
  details["seed"] = opts.seed;
  const json manifest = make_manifest("verify-symmetrization", details);

  json identities;
  for (std::size_t i = 0; i < rep.identity_worst.size(); ++i)
    identities["eq" + std::to_string(i + 1)] = rep.identity_worst[i];
  json mi;
  for (const auto& [name, dev] : rep.mi_worst) mi[name] = dev;

  json doc;
  doc["manifest"] = manifest;
  doc["identity_worst_dev"] = identities;
  doc["mi_equality_worst_dev"] = mi;
  doc["embeddings"] = {
      {"nj_in_bound2_violation", rep.nj_in_bound2_violation},
      {"redundancy_ok", rep.redundancy_ok},
      {"bound2_in_nj_row_gap", rep.bound2_in_nj_row_gap},
      {"uv_in_uvw_violation", rep.uv_in_uvw_violation},
      {"uvw_in_uv_violation", rep.uvw_in_uv_violation},
  };
  doc["pass"] = rep.pass();
  doc["wall_clock_s"] = clock.seconds();
  write_text(opts.out + ".json", doc.dump(2) + "\n");

  std::cout << "fixtures: " << rep.fixtures << "\n"
            << "identity worst dev:     " << fmt(rep.identity_max()) << "\n"
            << "mi equality worst dev:  " << fmt(rep.mi_max()) << "\n"
            << "nj-in-bound2 violation: " << fmt(rep.nj_in_bound2_violation)
            << "\n"
            << "bound2-in-nj row gap:   " << fmt(rep.bound2_in_nj_row_gap)
            << " (redundancy " << (rep.redundancy_ok ? "ok" : "BROKEN")
            << ")\n"
            << "uv/uvw slice violations: " << fmt(rep.uv_in_uvw_violation)
            << " / " << fmt(rep.uvw_in_uv_violation) << "\n"
            << (rep.pass() ? "PASS" : "FAIL") << "\n";
  return rep.pass() ? kExitOk : kExitVerifyFail;
}

int run_compare_bounds(const CompareBoundsOptions& opts) {
  WallClock clock;
  const Channel ch = bcb::channel_from_spec(opts.channel);
  const BoundKind kind_a = bcb::bound_kind_from_string(opts.bound_a);
  const BoundKind kind_b = bcb::bound_kind_from_string(opts.bound_b);
  const AuxSpec spec_a = make_spec(kind_a, ch, opts.cards_a);
  const AuxSpec spec_b = make_spec(kind_b, ch, opts.cards_b);

  std::vector<std::array<double, 3>> weights =
      opts.weights.empty()
          ? (opts.r0_zero ? bcb::private_weight_fan()
                          : bcb::default_weight_fan())
          : parse_weights(opts.weights);
  if (opts.r0_zero) {
    for (const auto& w : weights) {
      if (w[0] != 0.0)
        throw std::invalid_argument(
            "compare-bounds: --r0 0 requires weights with zero R0 component");
    }
  }

  const bcb::CompareTable table =
      bcb::compare_bounds(ch, spec_a, spec_b, weights, make_config(opts.opt));
  const bool informative = opts.informative || kind_a == kind_b;
  const bool pass = table.max_abs_diff <= opts.tol;

  json details;
  details["channel"] = opts.channel;
  details["bound_a"] = opts.bound_a;
  details["bound_b"] = opts.bound_b;
  details["cards_a"] = cards_json(spec_a);
  details["cards_b"] = cards_json(spec_b);
  details["weights"] = weights_json(weights);
  details["r0_zero"] = opts.r0_zero;
  details["tol"] = opts.tol;
  details["informative"] = informative;
  details["config"] = config_json(opts.opt);
  const json manifest = make_manifest("compare-bounds", details);

  std::string csv = "# bcb compare-bounds\n" + manifest_comment(manifest);
  csv += "w0,w1,w2,value_a,value_b,diff\n";
  for (const auto& row : table.rows) {
    csv += fmt(row.weight[0]) + "," + fmt(row.weight[1]) + "," +
           fmt(row.weight[2]) + "," + fmt(row.value_a) + "," +
           fmt(row.value_b) + "," + fmt(row.diff) + "\n";
  }
  write_text(opts.out + ".csv", csv);

  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"weight", {row.weight[0], row.weight[1], row.weight[2]}},
                    {"value_a", row.value_a},
                    {"value_b", row.value_b},
                    {"diff", row.diff}});
  }
  json doc;
  doc["manifest"] = manifest;
  doc["rows"] = std::move(rows);
  doc["max_abs_diff"] = table.max_abs_diff;
  doc["pass"] = pass;
  doc["wall_clock_s"] = clock.seconds();
  write_text(opts.out + ".json", doc.dump(2) + "\n");

  std::cout << "max |" << opts.bound_a << " - " << opts.bound_b
            << "| = " << fmt(table.max_abs_diff) << " bits over "
            << table.rows.size() << " directions";
  if (informative) {
    std::cout << " (informative)\n";
    return kExitOk;
  }
  std::cout << (pass ? " PASS" : " FAIL") << " (tol " << fmt(opts.tol)
            << ")\n";
  return pass ? kExitOk : kExitVerifyFail;
}

int run_saturation(const SaturationOptions& opts) {
  WallClock clock;
  const Channel ch = bcb::channel_from_spec(opts.channel);
  const BoundKind kind = bcb::bound_kind_from_string(opts.bound);
  const AuxSpec base = make_spec(kind, ch, opts.base_cards);
  AuxSpec enlarged = make_spec(kind, ch, opts.enlarged_cards);
  if (opts.enlarged_cards.empty()) {
    for (auto& [name, card] : enlarged.cards) card = base.card_of(name) + 2;
  }

  const std::vector<std::array<double, 3>> weights =
      opts.weights.empty() ? bcb::default_weight_fan()
                           : parse_weights(opts.weights);

  const bcb::SaturationTable table = bcb::cardinality_saturation(
      ch, base, {enlarged}, weights, make_config(opts.opt), opts.tol);

  json details;
  details["channel"] = opts.channel;
  details["bound"] = opts.bound;
  details["base_cards"] = cards_json(base);
  details["enlarged_cards"] = cards_json(enlarged);
  details["weights"] = weights_json(weights);
  details["tol_sat"] = opts.tol;
  details["config"] = config_json(opts.opt);
  const json manifest = make_manifest("saturation", details);

  std::string csv = "# bcb saturation\n" + manifest_comment(manifest);
  csv += "w0,w1,w2,base,enlarged,gap,pass\n";
  for (const auto& row : table.rows) {
    csv += fmt(row.weight[0]) + "," + fmt(row.weight[1]) + "," +
           fmt(row.weight[2]) + "," + fmt(row.base_value) + "," +
           fmt(row.enlarged_values[0]) + "," + fmt(row.max_gap) + "," +
           (row.pass ? "1" : "0") + "\n";
  }
  write_text(opts.out + ".csv", csv);

  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"weight", {row.weight[0], row.weight[1], row.weight[2]}},
                    {"base", row.base_value},
                    {"enlarged", row.enlarged_values[0]},
                    {"gap", row.max_gap},
                    {"pass", row.pass}});
  }
  json doc;
  doc["manifest"] = manifest;
  doc["rows"] = std::move(rows);
  doc["pass"] = table.pass;
  doc["wall_clock_s"] = clock.seconds();
  write_text(opts.out + ".json", doc.dump(2) + "\n");

  double worst = 0.0;
  for (const auto& row : table.rows) worst = std::max(worst, row.max_gap);
  std::cout << "worst enlargement gain: " << fmt(worst) << " bits over "
            << table.rows.size() << " directions";
  if (opts.informative) {
    std::cout << " (informative)\n";
    return kExitOk;
  }
  std::cout << (table.pass ? " PASS" : " FAIL") << " (tol " << fmt(opts.tol)
            << ")\n";
  return table.pass ? kExitOk : kExitVerifyFail;
}

}  // namespace bcbtool
