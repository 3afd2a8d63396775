#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "isrs_egn/errors.hpp"
#include "isrs_egn/fwm.hpp"
#include "isrs_egn/islands.hpp"
#include "isrs_egn/link.hpp"
#include "isrs_egn/raman.hpp"
#include "isrs_egn/scheduler.hpp"
#include "isrs_egn/units.hpp"
#include "json.hpp"

namespace isrs_egn::cli {

using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool config_sets_workers(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return false;
  const auto it = doc.find("numerics");
  return it != doc.end() && it->is_object() && it->contains("workers");
}

int env_workers() {
  const char* v = std::getenv("ISRS_EGN_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw ConfigError(std::string("ISRS_EGN_WORKERS must be a positive integer, got '") + v + "'");
  }
  return static_cast<int>(n);
}

// Writes to --out atomically, or to the stream when no path is given.
void emit(const CommonOptions& common, std::ostream& out, const std::string& body) {
  if (common.out.empty()) {
    out << body;
  } else {
    write_file_atomic(common.out, body);
  }
}

std::filesystem::path sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  p.replace_extension(suffix);
  return p;
}

Manifest make_manifest(const std::string& command, const std::string& method, const SystemConfig& config) {
  return {command, method, emit_config(config), utc_timestamp()};
}

void check_format(const CommonOptions& common) {
  if (common.format != "csv" && common.format != "json") {
    throw ConfigError("unknown output format '" + common.format + "' (csv or json)");
  }
}

std::vector<NliReport> evaluate_all(const SystemConfig& config, const std::vector<int>& cois) {
  const LinkFunction link(SpanChain::from_config(config), config.numerics);
  const LinkFn y = [&link](double f1, double f2, double f) { return link(f1, f2, f); };
  std::vector<NliReport> reports;
  reports.reserve(cois.size());
  for (int k : cois) reports.push_back(nli_variance(k, config, y));
  return reports;
}

SystemConfig with_spans(const SystemConfig& base, int count) {
  SystemConfig c = base;
  c.spans.assign(static_cast<std::size_t>(count), base.spans.front());
  return c;
}

}  // namespace

SystemConfig resolve_config(const CommonOptions& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config is required");
  const std::string text = read_file(opts.config_path);
  SystemConfig c = parse_config(text);
  if (opts.method) c.numerics.mu_method = parse_mu_method(*opts.method);
  if (opts.delta_z_km) c.numerics.delta_z_km = *opts.delta_z_km;
  if (opts.resolution_ghz) c.numerics.resolution_hz = *opts.resolution_ghz * units::kGHz;
  if (opts.chunk_size) c.numerics.chunk_size = *opts.chunk_size;
  if (opts.workers) {
    c.numerics.workers = *opts.workers;
  } else if (!config_sets_workers(text)) {
    c.numerics.workers = env_workers();
  }
  validate(c);
  return c;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("not an integer: '" + item + "'");
    }
    if (pos != item.size()) throw ConfigError("not an integer: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
    if (pos != item.size()) throw ConfigError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<int> parse_coi_list(std::string_view text, int m) {
  std::vector<int> out;
  if (text == "all") {
    for (int k = -m; k <= m; ++k) out.push_back(k);
    return out;
  }
  out = parse_int_list(text);
  for (int k : out) {
    if (std::abs(k) > m) throw ConfigError("COI index " + std::to_string(k) + " outside the channel grid");
  }
  return out;
}

void cmd_evaluate(const CommonOptions& common, const EvaluateOptions& opts, std::ostream& out) {
  check_format(common);
  const SystemConfig config = resolve_config(common);
  const auto cois = parse_coi_list(opts.coi, config.grid.m);
  const auto reports = evaluate_all(config, cois);
  const Manifest manifest = make_manifest("evaluate", std::string(to_string(config.numerics.mu_method)), config);
  if (common.format == "json") {
    emit(common, out, evaluate_json(manifest, reports));
    return;
  }
  if (!common.out.empty()) write_file_atomic(sibling(common.out, ".json"), evaluate_json(manifest, reports));
  emit(common, out, evaluate_csv(manifest, reports));
}

void cmd_compare(const CommonOptions& common, const CompareOptions& opts, std::ostream& out) {
  check_format(common);
  const SystemConfig base = resolve_config(common);
  const MuMethod a = parse_mu_method(opts.method_a);
  const MuMethod b = parse_mu_method(opts.method_b);
  const auto dzs = parse_double_list(opts.delta_z);
  const auto spans =
      opts.spans.empty() ? std::vector<int>{static_cast<int>(base.spans.size())} : parse_int_list(opts.spans);
  for (int s : spans) {
    if (s < 1) throw ConfigError("span count must be >= 1");
  }
  const auto cois = parse_coi_list(opts.coi, base.grid.m);

  // Results of a method that ignores delta_z are shared across the sweep.
  std::map<std::tuple<MuMethod, int, double>, std::vector<NliReport>> memo;
  auto run = [&](MuMethod m, int s, double dz) -> const std::vector<NliReport>& {
    const double key_dz = m == MuMethod::segment ? dz : 0.0;
    const auto key = std::make_tuple(m, s, key_dz);
    auto it = memo.find(key);
    if (it == memo.end()) {
      SystemConfig c = with_spans(base, s);
      c.numerics.mu_method = m;
      c.numerics.delta_z_km = m == MuMethod::segment ? dz : base.numerics.delta_z_km;
      validate(c);
      it = memo.emplace(key, evaluate_all(c, cois)).first;
    }
    return it->second;
  };

  const std::string label = std::string(to_string(a)) + "-vs-" + std::string(to_string(b));
  const Manifest manifest = make_manifest("compare", label, base);
  std::ostringstream csv;
  csv << manifest.csv_header();
  csv << "# err_db = eta_db(" << to_string(b) << ") - eta_db(" << to_string(a) << ")\n";
  csv << "coi,delta_z_km,spans,err_db\n";
  json summary;
  summary["manifest_sha256"] = manifest.hash();
  summary["timestamp"] = manifest.timestamp;
  summary["method_a"] = to_string(a);
  summary["method_b"] = to_string(b);
  json rows = json::array();
  for (int s : spans) {
    for (double dz : dzs) {
      if (!(dz > 0.0)) throw ConfigError("delta_z must be > 0");
      const auto& ra = run(a, s, dz);
      const auto& rb = run(b, s, dz);
      double mae = 0.0;
      for (std::size_t i = 0; i < ra.size(); ++i) {
        const double err = rb[i].eta_db - ra[i].eta_db;
        mae += std::abs(err);
        csv << ra[i].coi << ',' << fmt(dz) << ',' << s << ',' << fmt(err) << '\n';
      }
      mae /= static_cast<double>(ra.size());
      json row;
      row["delta_z_km"] = dz;
      row["spans"] = s;
      row["mae_db"] = mae;
      rows.push_back(row);
    }
  }
  summary["mae"] = rows;
  const std::string summary_text = summary.dump(2) + "\n";
  if (common.format == "json") {
    emit(common, out, summary_text);
    return;
  }
  if (!common.out.empty()) write_file_atomic(sibling(common.out, ".summary.json"), summary_text);
  emit(common, out, csv.str());
}

void cmd_bench(const CommonOptions& common, const BenchOptions& opts, std::ostream& out) {
  check_format(common);
  const SystemConfig config = resolve_config(common);
  const auto workers = parse_int_list(opts.workers);
  for (int w : workers) {
    if (w < 1) throw ConfigError("worker counts must be >= 1");
  }
  const auto rows = benchmark(config, workers, opts.repeats);
  const Manifest manifest = make_manifest("bench", std::string(to_string(config.numerics.mu_method)), config);
  emit(common, out, manifest.csv_header() + bench_csv(rows));
}

void cmd_plotdata(const CommonOptions& common, const PlotOptions& opts, std::ostream& out) {
  check_format(common);
  const SystemConfig config = resolve_config(common);
  const SpanChain chain = SpanChain::from_config(config);
  const FiberSpan& span = chain.spans.front();
  const RamanContext& ctx = chain.contexts.front();
  std::ostringstream csv;
  const Manifest manifest =
      make_manifest("plotdata " + opts.figure, std::string(to_string(config.numerics.mu_method)), config);
  csv << manifest.csv_header();

  if (opts.figure == "islands") {
    if (std::abs(opts.coi) > config.grid.m) throw ConfigError("COI index outside the channel grid");
    csv << "kappa1,kappa2,l,kappa3,class\n";
    for (const Island& i : enumerate_islands(config.grid.m, opts.coi)) {
      csv << i.kappa1 << ',' << i.kappa2 << ',' << i.l << ',' << i.kappa3(opts.coi) << ',' << to_string(i.nli_class)
          << '\n';
    }
  } else if (opts.figure == "raman") {
    if (opts.points < 2) throw ConfigError("--points must be >= 2");
    csv << "z_km,coi_index,f_hz,rho,srs_gain_db,delta_rho_db\n";
    for (int p = 0; p < opts.points; ++p) {
      const double z = span.length_km * p / (opts.points - 1);
      for (int k = -config.grid.m; k <= config.grid.m; ++k) {
        const double f = config.channel_center_hz(k);
        csv << fmt(z) << ',' << k << ',' << fmt(f) << ',' << fmt(rho(ctx, z, f)) << ','
            << fmt(units::linear_to_db(srs_gain(ctx, z, f))) << ',' << fmt(delta_rho_db(ctx, z)) << '\n';
      }
    }
  } else if (opts.figure == "fwm-map") {
    if (opts.points < 2) throw ConfigError("--points must be >= 2");
    const double half = config.grid.b_tot_hz() / 2.0;
    const FwmKernel kernel(span, ctx, config.numerics);
    const double leff = effective_length(span.length_km, ctx.alpha_per_km);
    csv << "f1_hz,f2_hz,efficiency,wall_time_us\n";
    for (int i = 0; i < opts.points; ++i) {
      const double f1 = -half + 2.0 * half * i / (opts.points - 1);
      for (int j = 0; j < opts.points; ++j) {
        const double f2 = -half + 2.0 * half * j / (opts.points - 1);
        const auto start = std::chrono::steady_clock::now();
        const double eff = std::abs(kernel(f1, f2, opts.f_hz)) / leff;
        const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
        csv << fmt(f1) << ',' << fmt(f2) << ',' << fmt(eff) << ',' << fmt(us) << '\n';
      }
    }
  } else if (opts.figure == "trace") {
    if (opts.samples < 2) throw ConfigError("--samples must be >= 2");
    const MuQuery q{opts.f1_hz, opts.f2_hz, opts.f_hz, span, ctx};
    const IntegrandTrace t = integrand_trace(q, static_cast<std::size_t>(opts.samples));
    csv << "z_km,total_re,total_im,srs_gain,attenuation,pmf_re,pmf_im\n";
    for (std::size_t i = 0; i < t.z_km.size(); ++i) {
      csv << fmt(t.z_km[i]) << ',' << fmt(t.total[i].real()) << ',' << fmt(t.total[i].imag()) << ','
          << fmt(t.srs_gain_term[i]) << ',' << fmt(t.attenuation_term[i]) << ',' << fmt(t.pmf_term[i].real()) << ','
          << fmt(t.pmf_term[i].imag()) << '\n';
    }
  } else {
    throw ConfigError("unknown figure '" + opts.figure + "' (raman, fwm-map, trace, islands)");
  }
  emit(common, out, csv.str());
}

}  // namespace isrs_egn::cli
