#include "isrs_egn/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "isrs_egn/errors.hpp"
#include "isrs_egn/units.hpp"
#include "json.hpp"

namespace isrs_egn {

using nlohmann::json;

namespace {

struct UnitOption {
  std::string_view suffix;
  double factor;  // canonical = value * factor (unless the quantity has a custom converter)
};

// Reads keys out of one JSON object and remembers which ones were consumed,
// so leftovers can be reported as unknown keys or unknown unit suffixes.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) {
      throw ConfigError("schema violation: '" + path_ + "' must be an object");
    }
  }

  bool has(const std::string& key) const { return object_.contains(key); }

  const json* raw(const std::string& key) {
    known_bases_.insert(key);
    auto it = object_.find(key);
    if (it == object_.end()) return nullptr;
    consumed_.insert(key);
    return &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) throw ConfigError("schema violation: '" + where(key) + "' must be a number");
    return v->get<double>();
  }

  std::optional<long long> integer(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) {
      throw ConfigError("schema violation: '" + where(key) + "' must be an integer");
    }
    return v->get<long long>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) throw ConfigError("schema violation: '" + where(key) + "' must be a string");
    return v->get<std::string>();
  }

  /// Looks up `<base>_<suffix>` for each allowed suffix; at most one may be present.
  /// Returns {value converted to canonical units, matched key}.
  std::optional<std::pair<double, std::string>> quantity(const std::string& base,
                                                         std::initializer_list<UnitOption> options) {
    known_bases_.insert(base);
    std::optional<std::pair<double, std::string>> found;
    for (const auto& opt : options) {
      const std::string key = base + "_" + std::string(opt.suffix);
      auto v = number(key);
      if (!v) continue;
      if (found) {
        throw ConfigError("schema violation: '" + where(found->second) + "' and '" + where(key) +
                          "' are mutually exclusive");
      }
      found = std::make_pair(*v * opt.factor, key);
    }
    return found;
  }

  double required_quantity(const std::string& base, std::initializer_list<UnitOption> options) {
    auto q = quantity(base, options);
    if (!q) {
      check_suffixes();
      throw ConfigError("schema violation: missing '" + where(base + "_" + std::string(options.begin()->suffix)) +
                        "'");
    }
    return q->first;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  /// Rejects every key that was never consumed.
  void finish() {
    check_suffixes();
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!consumed_.contains(it.key())) {
        throw ConfigError("schema violation: unknown key '" + where(it.key()) + "'");
      }
    }
  }

 private:
  void check_suffixes() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (consumed_.contains(it.key())) continue;
      for (const auto& base : known_bases_) {
        if (it.key().size() > base.size() + 1 && it.key().starts_with(base + "_")) {
          throw ConfigError("unit suffix unknown: '" + where(it.key()) + "' (quantity '" + base + "')");
        }
      }
    }
  }

  const json& object_;
  std::string path_;
  std::set<std::string> consumed_;
  std::set<std::string> known_bases_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

FiberSpan parse_span(const json& node, const std::string& path, int& repeat) {
  ObjectReader r(node, path);
  FiberSpan span;
  span.length_km = r.required_quantity("length", {{"km", 1.0}, {"m", 1e-3}});

  auto alpha = r.quantity("alpha", {{"db_per_km", 1.0}, {"per_km", 1.0}});
  if (!alpha) throw ConfigError("schema violation: missing '" + r.where("alpha_db_per_km") + "'");
  span.alpha_per_km = alpha->second.ends_with("db_per_km") ? units::db_per_km_to_per_km(alpha->first)
                                                            : alpha->first;

  auto beta2 = r.quantity("beta2", {{"ps2_km", units::kPs2}, {"s2_km", 1.0}});
  auto beta3 = r.quantity("beta3", {{"ps3_km", units::kPs3}, {"s3_km", 1.0}});
  auto d = r.quantity("d", {{"ps_nm_km", 1.0}});
  auto s = r.quantity("s", {{"ps_nm2_km", 1.0}});
  auto lambda = r.quantity("lambda", {{"nm", 1e-9}, {"m", 1.0}});
  if (beta2 && d) {
    throw ConfigError("schema violation: '" + r.where("beta2_ps2_km") + "' and '" + r.where("d_ps_nm_km") +
                      "' are mutually exclusive");
  }
  if (beta2) {
    if (s || lambda) {
      throw ConfigError("schema violation: '" + r.where("s_ps_nm2_km") + "'/'" + r.where("lambda_nm") +
                        "' only apply with d_ps_nm_km");
    }
    span.beta2_s2_per_km = beta2->first;
    span.beta3_s3_per_km = beta3 ? beta3->first : 0.0;
  } else if (d) {
    if (beta3) {
      throw ConfigError("schema violation: '" + r.where(beta3->second) + "' cannot be combined with d_ps_nm_km");
    }
    const double lambda_m = lambda ? lambda->first : 1550e-9;
    if (!(lambda_m > 0.0)) throw ConfigError("invariant violation: " + r.where("lambda_nm") + " > 0");
    const Beta b = dispersion_to_beta(d->first, s ? s->first : 0.0, lambda_m);
    span.beta2_s2_per_km = b.beta2_s2_per_km;
    span.beta3_s3_per_km = b.beta3_s3_per_km;
  } else {
    r.finish();
    throw ConfigError("schema violation: missing '" + r.where("beta2_ps2_km") + "' or '" + r.where("d_ps_nm_km") +
                      "'");
  }

  span.gamma_per_w_km = r.required_quantity("gamma", {{"per_w_km", 1.0}});
  span.cr_per_w_km_hz = r.required_quantity("cr", {{"per_w_km_thz", 1e-12}, {"per_w_km_hz", 1.0}});

  if (const json* g = r.raw("gain_mode")) {
    if (g->is_string()) {
      if (g->get<std::string>() != "transparent") {
        throw ConfigError("schema violation: '" + r.where("gain_mode") + "' must be \"transparent\" or an object");
      }
      span.gain_mode = GainMode::transparent;
    } else {
      ObjectReader gr(*g, r.where("gain_mode"));
      auto gain = gr.quantity("gain", {{"db", 1.0}, {"linear", 1.0}});
      if (!gain) throw ConfigError("schema violation: missing '" + gr.where("gain_db") + "'");
      gr.finish();
      span.gain_mode = GainMode::explicit_gain;
      span.gain_linear = gain->second.ends_with("_db") ? units::db_to_linear(gain->first) : gain->first;
    }
  }

  repeat = 1;
  if (auto rep = r.integer("repeat")) {
    if (*rep < 1) throw ConfigError("invariant violation: " + r.where("repeat") + " >= 1");
    repeat = static_cast<int>(*rep);
  }
  r.finish();
  return span;
}

ChannelGrid parse_grid(const json& node) {
  ObjectReader r(node, "grid");
  ChannelGrid grid;
  auto n = r.integer("num_channels");
  if (!n) throw ConfigError("schema violation: missing 'grid.num_channels'");
  if (*n < 1 || *n % 2 == 0) throw ConfigError("invariant violation: grid.num_channels must be odd and >= 1");
  grid.m = static_cast<int>((*n - 1) / 2);
  grid.symbol_rate_hz = r.required_quantity("symbol_rate", {{"gbaud", 1e9}, {"hz", 1.0}, {"baud", 1.0}});
  grid.spacing_hz = r.required_quantity("spacing", {{"ghz", 1e9}, {"hz", 1.0}});

  const json* power = r.raw("power");
  if (power == nullptr) throw ConfigError("schema violation: missing 'grid.power'");
  ObjectReader pr(*power, "grid.power");
  const std::size_t count = static_cast<std::size_t>(*n);
  const json* per_dbm = pr.raw("per_channel_dbm");
  const json* per_w = pr.raw("per_channel_w");
  auto total = pr.quantity("total", {{"dbm", 1.0}, {"w", 1.0}});
  const int forms = (per_dbm != nullptr) + (per_w != nullptr) + (total.has_value() ? 1 : 0);
  if (forms != 1) {
    throw ConfigError("schema violation: 'grid.power' needs exactly one of total_dbm, total_w, per_channel_dbm, "
                      "per_channel_w");
  }
  if (total) {
    const double p_tot = total->second.ends_with("_dbm") ? units::dbm_to_w(total->first) : total->first;
    grid.powers_w.assign(count, p_tot / static_cast<double>(count));
  } else {
    const json& list = per_dbm != nullptr ? *per_dbm : *per_w;
    const std::string key = per_dbm != nullptr ? "grid.power.per_channel_dbm" : "grid.power.per_channel_w";
    if (!list.is_array()) throw ConfigError("schema violation: '" + key + "' must be an array");
    if (list.size() != count) {
      throw ConfigError("invariant violation: '" + key + "' must have num_channels entries");
    }
    for (const auto& v : list) {
      if (!v.is_number()) throw ConfigError("schema violation: '" + key + "' entries must be numbers");
      grid.powers_w.push_back(per_dbm != nullptr ? units::dbm_to_w(v.get<double>()) : v.get<double>());
    }
  }
  pr.finish();
  r.finish();
  return grid;
}

ModulationFormat parse_modulation(const json& node) {
  ObjectReader r(node, "modulation");
  auto name = r.string("name");
  auto phi = r.number("phi");
  auto psi = r.number("psi");
  r.finish();
  if (phi && psi) {
    ModulationFormat fmt{name.value_or("custom"), *phi, *psi};
    if (name) {
      const std::string n = lower(*name);
      if ((n == "gaussian" || n == "pm-2d-gaussian" || n == "2d-gaussian") && (*phi != 0.0 || *psi != 0.0)) {
        throw ConfigError("invariant violation: Gaussian modulation requires phi = 0 and psi = 0");
      }
    }
    return fmt;
  }
  if (phi && !psi) throw ConfigError("schema violation: 'modulation.phi' requires 'modulation.psi'");
  if (!name) throw ConfigError("schema violation: 'modulation' needs 'name' or both 'phi' and 'psi'");
  return make_modulation(*name, psi);
}

NumericsPolicy parse_numerics(const json& node) {
  ObjectReader r(node, "numerics");
  NumericsPolicy p;
  if (auto v = r.quantity("resolution", {{"ghz", 1e9}, {"hz", 1.0}})) p.resolution_hz = v->first;
  if (auto v = r.quantity("g_resolution", {{"ghz", 1e9}, {"hz", 1.0}})) p.g_resolution_hz = v->first;
  if (auto v = r.string("mu_method")) {
    try {
      p.mu_method = parse_mu_method(*v);
    } catch (const ConfigError&) {
      throw ConfigError("schema violation: 'numerics.mu_method' must be integral, maclaurin or segment");
    }
  }
  if (auto v = r.quantity("delta_z", {{"km", 1.0}, {"m", 1e-3}})) p.delta_z_km = v->first;
  if (auto v = r.integer("workers")) p.workers = static_cast<int>(*v);
  if (auto v = r.integer("chunk_size")) p.chunk_size = static_cast<int>(*v);
  if (auto v = r.number("samples_per_cycle")) p.samples_per_cycle = *v;
  if (auto v = r.quantity("max_step", {{"km", 1.0}})) p.max_step_km = v->first;
  if (auto v = r.string("center_shift")) {
    if (*v == "spacing") {
      p.center_shift = CenterShift::spacing;
    } else if (*v == "symbol_rate") {
      p.center_shift = CenterShift::symbol_rate;
    } else {
      throw ConfigError("schema violation: 'numerics.center_shift' must be spacing or symbol_rate");
    }
  }
  r.finish();
  return p;
}

}  // namespace

double ChannelGrid::p_tot_w() const { return std::accumulate(powers_w.begin(), powers_w.end(), 0.0); }

double SystemConfig::channel_center_hz(int kappa) const {
  const double shift = numerics.center_shift == CenterShift::spacing ? grid.spacing_hz : grid.symbol_rate_hz;
  return kappa * shift;
}

std::string_view to_string(MuMethod method) {
  switch (method) {
    case MuMethod::integral:
      return "integral";
    case MuMethod::maclaurin:
      return "maclaurin";
    case MuMethod::segment:
      return "segment";
  }
  return "?";
}

MuMethod parse_mu_method(std::string_view text) {
  if (text == "integral") return MuMethod::integral;
  if (text == "maclaurin") return MuMethod::maclaurin;
  if (text == "segment") return MuMethod::segment;
  throw ConfigError("unknown mu method '" + std::string(text) + "'");
}

Beta dispersion_to_beta(double d_ps_nm_km, double s_ps_nm2_km, double lambda_ref_m) {
  if (!(lambda_ref_m > 0.0)) throw ConfigError("invariant violation: lambda_ref > 0");
  const double d = d_ps_nm_km * 1e-3;  // ps/(nm km) -> s/(m km)
  const double s = s_ps_nm2_km * 1e6;  // ps/(nm^2 km) -> s/(m^2 km)
  const double k = lambda_ref_m * lambda_ref_m / (2.0 * units::kPi * units::kSpeedOfLight);
  return {-d * k, k * k * (s + 2.0 * d / lambda_ref_m)};
}

double modulation_phi(std::span<const std::complex<double>> constellation) {
  if (constellation.empty()) throw ConfigError("empty constellation");
  double m2 = 0.0;
  double m4 = 0.0;
  for (const auto& a : constellation) {
    const double p = std::norm(a);
    m2 += p;
    m4 += p * p;
  }
  const double n = static_cast<double>(constellation.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 2.0;
}

std::vector<std::complex<double>> qpsk_constellation() { return {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}; }

std::vector<std::complex<double>> qam16_constellation() {
  std::vector<std::complex<double>> points;
  for (int i : {-3, -1, 1, 3}) {
    for (int q : {-3, -1, 1, 3}) points.emplace_back(i, q);
  }
  return points;
}

ModulationFormat make_modulation(std::string_view name, std::optional<double> psi) {
  const std::string n = lower(name);
  if (n == "gaussian" || n == "pm-2d-gaussian" || n == "2d-gaussian") {
    if (psi && *psi != 0.0) throw ConfigError("invariant violation: Gaussian modulation requires psi = 0");
    return {std::string(name), 0.0, 0.0};
  }
  std::vector<std::complex<double>> points;
  if (n == "pm-qpsk" || n == "qpsk") {
    points = qpsk_constellation();
  } else if (n == "pm-16qam" || n == "16qam") {
    points = qam16_constellation();
  } else {
    throw ConfigError("schema violation: unknown modulation name '" + std::string(name) +
                      "' (give phi and psi explicitly)");
  }
  if (!psi) throw ConfigError("schema violation: 'modulation.psi' must be supplied for " + std::string(name));
  return {std::string(name), modulation_phi(points), *psi};
}

void validate(const SystemConfig& c) {
  if (c.spans.empty()) throw ConfigError("invariant violation: at least one span is required");
  for (std::size_t i = 0; i < c.spans.size(); ++i) {
    const auto& s = c.spans[i];
    const std::string at = "spans[" + std::to_string(i) + "]: ";
    if (!(s.length_km > 0.0)) throw ConfigError("invariant violation: " + at + "length > 0");
    if (!(s.alpha_per_km > 0.0)) throw ConfigError("invariant violation: " + at + "alpha > 0");
    if (!(s.gamma_per_w_km >= 0.0)) throw ConfigError("invariant violation: " + at + "gamma >= 0");
    if (!(s.cr_per_w_km_hz >= 0.0)) throw ConfigError("invariant violation: " + at + "cr >= 0");
    if (!std::isfinite(s.beta2_s2_per_km) || !std::isfinite(s.beta3_s3_per_km)) {
      throw ConfigError("invariant violation: " + at + "beta2/beta3 finite");
    }
    if (s.gain_mode == GainMode::explicit_gain && !(s.gain_linear > 0.0)) {
      throw ConfigError("invariant violation: " + at + "gain > 0");
    }
  }
  const auto& g = c.grid;
  if (g.m < 0) throw ConfigError("invariant violation: grid half-width M >= 0");
  if (!(g.symbol_rate_hz > 0.0)) throw ConfigError("invariant violation: symbol_rate > 0");
  if (!(g.spacing_hz >= g.symbol_rate_hz)) throw ConfigError("invariant violation: spacing >= symbol_rate");
  if (g.powers_w.size() != static_cast<std::size_t>(g.num_channels())) {
    throw ConfigError("invariant violation: one power per channel");
  }
  for (double p : g.powers_w) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("invariant violation: all channel powers > 0");
  }
  const auto& m = c.modulation;
  const std::string mn = lower(m.name);
  if ((mn == "gaussian" || mn == "pm-2d-gaussian" || mn == "2d-gaussian") && (m.phi != 0.0 || m.psi != 0.0)) {
    throw ConfigError("invariant violation: Gaussian modulation requires phi = 0 and psi = 0");
  }
  const auto& n = c.numerics;
  if (!(n.resolution_hz > 0.0)) throw ConfigError("invariant violation: resolution > 0");
  if (!(n.g_resolution_hz > 0.0)) throw ConfigError("invariant violation: g_resolution > 0");
  if (std::llround(g.symbol_rate_hz / n.resolution_hz) < 2 || std::llround(g.symbol_rate_hz / n.g_resolution_hz) < 2) {
    throw ConfigError("invariant violation: resolution gives fewer than 2 grid points per channel");
  }
  if (!(n.delta_z_km > 0.0)) throw ConfigError("invariant violation: delta_z > 0");
  if (n.workers < 1) throw ConfigError("invariant violation: workers >= 1");
  if (n.chunk_size < 0) throw ConfigError("invariant violation: chunk_size >= 1 (or 0 for the method default)");
  if (!(n.samples_per_cycle > 0.0)) throw ConfigError("invariant violation: samples_per_cycle > 0");
  if (!(n.max_step_km > 0.0)) throw ConfigError("invariant violation: max_step > 0");
}

SystemConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("schema violation: invalid JSON: ") + e.what());
  }
  ObjectReader root(doc, "");
  SystemConfig config;

  const json* spans = root.raw("spans");
  if (spans == nullptr) throw ConfigError("schema violation: missing 'spans'");
  if (!spans->is_array() || spans->empty()) throw ConfigError("schema violation: 'spans' must be a non-empty array");
  for (std::size_t i = 0; i < spans->size(); ++i) {
    int repeat = 1;
    const FiberSpan span = parse_span((*spans)[i], "spans[" + std::to_string(i) + "]", repeat);
    config.spans.insert(config.spans.end(), static_cast<std::size_t>(repeat), span);
  }

  const json* grid = root.raw("grid");
  if (grid == nullptr) throw ConfigError("schema violation: missing 'grid'");
  config.grid = parse_grid(*grid);

  if (const json* mod = root.raw("modulation")) config.modulation = parse_modulation(*mod);
  if (const json* num = root.raw("numerics")) config.numerics = parse_numerics(*num);
  root.finish();

  validate(config);
  return config;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string emit_config(const SystemConfig& c) {
  json doc;
  json spans = json::array();
  for (const auto& s : c.spans) {
    json js{{"length_km", s.length_km},
            {"alpha_per_km", s.alpha_per_km},
            {"beta2_s2_km", s.beta2_s2_per_km},
            {"beta3_s3_km", s.beta3_s3_per_km},
            {"gamma_per_w_km", s.gamma_per_w_km},
            {"cr_per_w_km_hz", s.cr_per_w_km_hz}};
    if (s.gain_mode == GainMode::transparent) {
      js["gain_mode"] = "transparent";
    } else {
      js["gain_mode"] = json{{"gain_linear", s.gain_linear}};
    }
    spans.push_back(std::move(js));
  }
  doc["spans"] = std::move(spans);
  doc["grid"] = json{{"num_channels", c.grid.num_channels()},
                     {"symbol_rate_hz", c.grid.symbol_rate_hz},
                     {"spacing_hz", c.grid.spacing_hz},
                     {"power", json{{"per_channel_w", c.grid.powers_w}}}};
  doc["modulation"] = json{{"name", c.modulation.name}, {"phi", c.modulation.phi}, {"psi", c.modulation.psi}};
  const auto& n = c.numerics;
  doc["numerics"] = json{{"resolution_hz", n.resolution_hz},
                         {"g_resolution_hz", n.g_resolution_hz},
                         {"mu_method", std::string(to_string(n.mu_method))},
                         {"delta_z_km", n.delta_z_km},
                         {"workers", n.workers},
                         {"chunk_size", n.chunk_size},
                         {"samples_per_cycle", n.samples_per_cycle},
                         {"max_step_km", n.max_step_km},
                         {"center_shift", n.center_shift == CenterShift::spacing ? "spacing" : "symbol_rate"}};
  return doc.dump(2);
}

}  // namespace isrs_egn
