#pragma once

// ISRS power evolution under the triangular (linear-slope) Raman gain model.
// Frequencies are offsets from the WDM band centre.

namespace isrs_egn {

struct RamanContext {
  double p_tot_w = 0.0;
  double cr_per_w_km_hz = 0.0;
  double b_tot_hz = 0.0;
  double alpha_per_km = 0.0;

  bool operator==(const RamanContext&) const = default;
};

/// Coefficient printed for the band-edge power-transfer rule of thumb; the
/// exact value 10*log10(e) = 4.343 is what rho() and srs_gain() imply.
inline constexpr double kDeltaRhoDbCoefficient = 4.3;

/// (1 - e^{-alpha z}) / alpha, with a series guard for alpha*z -> 0.
double effective_length(double z_km, double alpha_per_km);

/// zeta(z) = P_tot * C_r * L_eff(z), in 1/Hz.
double raman_zeta(const RamanContext& ctx, double z_km);

/// Normalised SRS gain for a given zeta: zeta*B e^{-zeta f} / (2 sinh(zeta*B/2)).
/// Throws NumericError when the result is not a finite positive number.
double srs_gain_from_zeta(double zeta_per_hz, double b_tot_hz, double f_hz);

double srs_gain(const RamanContext& ctx, double z_km, double f_hz);

/// Normalised power profile: srs_gain(z, f) * e^{-alpha z}.
double rho(const RamanContext& ctx, double z_km, double f_hz);

/// Band-edge power transfer in dB, 4.3 * P_tot * C_r * L_eff(z) * B_tot.
double delta_rho_db(const RamanContext& ctx, double z_km);

}  // namespace isrs_egn
