#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "isrs_egn/errors.hpp"

namespace isrs_egn::cli {

namespace {

void add_common(CLI::App& app, CommonOptions& o) {
  app.add_option("--config", o.config_path, "JSON configuration file");
  app.add_option("--method", o.method, "FWM efficiency kernel: integral, maclaurin or segment");
  app.add_option("--delta-z", o.delta_z_km, "Segment length in km");
  app.add_option("--resolution", o.resolution_ghz, "Quadrature resolution in GHz");
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--chunk-size", o.chunk_size, "Islands per work batch")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output path (default: stdout)");
  app.add_option("--format", o.format, "Output format: csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_plot_options(CLI::App& sub, PlotOptions& p) {
  sub.add_option("--points", p.points, "Grid points per axis (raman, fwm-map)");
  sub.add_option("--samples", p.samples, "Samples along the span (trace)");
  sub.add_option("--coi", p.coi, "Channel of interest (islands)");
  sub.add_option("--f1-hz", p.f1_hz, "First pump frequency (trace)");
  sub.add_option("--f2-hz", p.f2_hz, "Second pump frequency (trace)");
  sub.add_option("--f-hz", p.f_hz, "Probe frequency (fwm-map, trace)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"ISRS-aware EGN nonlinear interference evaluator"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  add_common(app, common);

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Per-channel NLI variance and eta");
  evaluate->add_option("--coi", eval_opts.coi, "'all' or a comma list of channel indices");

  CompareOptions cmp_opts;
  auto* compare = app.add_subcommand("compare", "Per-channel eta error between two kernels");
  compare->add_option("--method-a", cmp_opts.method_a, "Reference kernel");
  compare->add_option("--method-b", cmp_opts.method_b, "Kernel under test");
  compare->add_option("--delta-z-list", cmp_opts.delta_z, "Comma list of segment lengths in km");
  compare->add_option("--spans", cmp_opts.spans, "Comma list of span counts (copies of the first span)");
  compare->add_option("--coi", cmp_opts.coi, "'all' or a comma list of channel indices");

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Centre-channel wall time and speedup per worker count");
  bench->add_option("--workers-list", bench_opts.workers, "Comma list of worker counts");
  bench->add_option("--repeats", bench_opts.repeats, "Repeats per worker count (at least 3)");

  PlotOptions plot_opts;
  auto* plot = app.add_subcommand("plotdata", "Plot-ready datasets");
  plot->add_option("--figure", plot_opts.figure, "raman, fwm-map, trace or islands")->required();
  add_plot_options(*plot, plot_opts);

  struct Alias {
    const char* name;
    const char* figure;
    const char* help;
  };
  const Alias aliases[] = {{"raman-profile", "raman", "Same as plotdata --figure raman"},
                           {"fwm-map", "fwm-map", "Same as plotdata --figure fwm-map"},
                           {"integrand-trace", "trace", "Same as plotdata --figure trace"},
                           {"islands", "islands", "Same as plotdata --figure islands"}};
  std::vector<std::pair<CLI::App*, std::string>> alias_cmds;
  for (const Alias& a : aliases) {
    auto* sub = app.add_subcommand(a.name, a.help);
    add_plot_options(*sub, plot_opts);
    alias_cmds.emplace_back(sub, a.figure);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*evaluate) {
      cmd_evaluate(common, eval_opts, std::cout);
    } else if (*compare) {
      cmd_compare(common, cmp_opts, std::cout);
    } else if (*bench) {
      cmd_bench(common, bench_opts, std::cout);
    } else if (*plot) {
      cmd_plotdata(common, plot_opts, std::cout);
    } else {
      for (auto& [sub, figure] : alias_cmds) {
        if (*sub) {
          plot_opts.figure = figure;
          cmd_plotdata(common, plot_opts, std::cout);
        }
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace isrs_egn::cli
