#pragma once

#include <iosfwd>
#include <string>

#include "isrs_egn/cli.hpp"

namespace isrs_egn::cli {

struct EvaluateOptions {
  std::string coi = "all";
};

struct CompareOptions {
  std::string method_a = "integral";
  std::string method_b = "segment";
  std::string delta_z = "1";
  std::string spans;  // empty keeps the configured chain
  std::string coi = "all";
};

struct BenchOptions {
  std::string workers = "1,2,4,8";
  int repeats = 3;
};

struct PlotOptions {
  std::string figure;
  int points = 41;
  int samples = 201;
  int coi = 0;
  double f1_hz = 0.0;
  double f2_hz = 0.0;
  double f_hz = 0.0;
};

void cmd_evaluate(const CommonOptions& common, const EvaluateOptions& opts, std::ostream& out);
void cmd_compare(const CommonOptions& common, const CompareOptions& opts, std::ostream& out);
void cmd_bench(const CommonOptions& common, const BenchOptions& opts, std::ostream& out);
void cmd_plotdata(const CommonOptions& common, const PlotOptions& opts, std::ostream& out);

}  // namespace isrs_egn::cli
