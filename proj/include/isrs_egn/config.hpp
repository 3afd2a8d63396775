#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isrs_egn {

enum class GainMode {
  transparent,  // amplifier restores the total launch power at each span input
  explicit_gain,
};

/// Per-span physical constants in canonical units.
struct FiberSpan {
  double length_km = 0.0;
  double alpha_per_km = 0.0;    // power attenuation, natural units
  double beta2_s2_per_km = 0.0;
  double beta3_s3_per_km = 0.0;
  double gamma_per_w_km = 0.0;
  double cr_per_w_km_hz = 0.0;  // Raman gain slope
  GainMode gain_mode = GainMode::transparent;
  double gain_linear = 1.0;     // used when gain_mode == explicit_gain

  bool operator==(const FiberSpan&) const = default;
};

/// 2M+1 rectangular channels centred on the band centre.
struct ChannelGrid {
  int m = 0;
  double symbol_rate_hz = 0.0;
  double spacing_hz = 0.0;
  std::vector<double> powers_w;  // indexed by kappa + m

  int num_channels() const { return 2 * m + 1; }
  double b_tot_hz() const { return num_channels() * symbol_rate_hz; }
  double p_tot_w() const;
  double power(int kappa) const { return powers_w.at(static_cast<std::size_t>(kappa + m)); }

  bool operator==(const ChannelGrid&) const = default;
};

struct ModulationFormat {
  std::string name = "gaussian";
  double phi = 0.0;
  double psi = 0.0;

  bool operator==(const ModulationFormat&) const = default;
};

enum class MuMethod { integral, maclaurin, segment };

std::string_view to_string(MuMethod method);
MuMethod parse_mu_method(std::string_view text);

/// Where channel centres sit: kappa * spacing (default) or kappa * symbol rate.
enum class CenterShift { spacing, symbol_rate };

struct NumericsPolicy {
  double resolution_hz = 1e9;
  double g_resolution_hz = 2e9;
  MuMethod mu_method = MuMethod::segment;
  double delta_z_km = 1.0;
  int workers = 1;
  int chunk_size = 0;  // 0 selects the method default
  double samples_per_cycle = 20.0;
  double max_step_km = 0.5;
  CenterShift center_shift = CenterShift::spacing;

  bool operator==(const NumericsPolicy&) const = default;
};

/// Validated, canonical input. Immutable once built by parse_config.
struct SystemConfig {
  std::vector<FiberSpan> spans;
  ChannelGrid grid;
  ModulationFormat modulation;
  NumericsPolicy numerics;

  bool operator==(const SystemConfig&) const = default;

  double channel_center_hz(int kappa) const;
};

/// Parses the JSON configuration document and converts to canonical units.
/// Throws ConfigError naming the offending key or invariant.
SystemConfig parse_config(std::string_view text);
SystemConfig load_config_file(const std::string& path);

/// Canonical JSON (canonical-unit keys, round-trip exact doubles).
std::string emit_config(const SystemConfig& config);

/// Runs every invariant check; throws ConfigError on the first violation.
void validate(const SystemConfig& config);

struct Beta {
  double beta2_s2_per_km;
  double beta3_s3_per_km;
};

/// D [ps/(nm km)], S [ps/(nm^2 km)], lambda [m] -> beta2, beta3.
Beta dispersion_to_beta(double d_ps_nm_km, double s_ps_nm2_km, double lambda_ref_m);

/// Fourth-moment excess factor E|a|^4 / (E|a|^2)^2 - 2 over equiprobable points.
double modulation_phi(std::span<const std::complex<double>> constellation);

std::vector<std::complex<double>> qpsk_constellation();
std::vector<std::complex<double>> qam16_constellation();

/// Builds a named format. Gaussian formats get phi = psi = 0; QPSK and 16QAM
/// get phi from their constellations and need psi from the caller.
ModulationFormat make_modulation(std::string_view name, std::optional<double> psi = std::nullopt);

}  // namespace isrs_egn
