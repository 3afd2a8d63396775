#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isrs_egn/config.hpp"
#include "isrs_egn/engine.hpp"

namespace isrs_egn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the isrs-egn tool; returns the process exit code.
int run(int argc, char** argv);

/// Flags shared by every subcommand; unset values fall back to the config.
struct CommonOptions {
  std::string config_path;
  std::optional<std::string> method;
  std::optional<double> delta_z_km;
  std::optional<double> resolution_ghz;
  std::optional<int> workers;
  std::optional<int> chunk_size;
  std::string out;  // empty writes to stdout
  std::string format = "csv";
};

/// Loads the config and applies flag overrides. Workers resolve as
/// flag > config file > ISRS_EGN_WORKERS > 1.
SystemConfig resolve_config(const CommonOptions& opts);

/// Parses "all" or a comma list of channel indices.
std::vector<int> parse_coi_list(std::string_view text, int m);

std::vector<double> parse_double_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

// Output plumbing.
std::string sha256_hex(std::string_view data);
std::string utc_timestamp();
std::string fmt(double v);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Manifest identity: hash over tool version, command, method and the
/// canonical config, so identical inputs give identical hashes.
struct Manifest {
  std::string command;
  std::string method;
  std::string config_json;
  std::string timestamp;

  std::string hash() const;
  std::string csv_header() const;
};

std::string tool_version();

std::string evaluate_csv(const Manifest& manifest, const std::vector<NliReport>& reports);
std::string evaluate_json(const Manifest& manifest, const std::vector<NliReport>& reports);

}  // namespace isrs_egn::cli
