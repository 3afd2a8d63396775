#include "isrs_egn/raman.hpp"

#include <cmath>
#include <sstream>

#include "isrs_egn/errors.hpp"

namespace isrs_egn {

namespace {
constexpr double kSeriesThreshold = 1e-6;
}

double effective_length(double z_km, double alpha_per_km) {
  const double x = alpha_per_km * z_km;
  if (std::abs(x) < 1e-8) return z_km * (1.0 - x / 2.0 + x * x / 6.0);
  return -std::expm1(-x) / alpha_per_km;
}

double raman_zeta(const RamanContext& ctx, double z_km) {
  return ctx.p_tot_w * ctx.cr_per_w_km_hz * effective_length(z_km, ctx.alpha_per_km);
}

double srs_gain_from_zeta(double zeta, double b_tot, double f) {
  const double x = zeta * b_tot;
  if (x < kSeriesThreshold) {
    const double zf = zeta * f;
    return (1.0 - x * x / 24.0) * (1.0 - zf + zf * zf / 2.0);
  }
  // x / (2 sinh(x/2)) * e^{-zeta f}, arranged so no intermediate overflows.
  const double g = x * std::exp(-x / 2.0 - zeta * f) / -std::expm1(-x);
  if (!std::isfinite(g) || g <= 0.0) {
    std::ostringstream msg;
    msg << "SRS gain out of range for zeta*B_tot = " << x << ", f = " << f << " Hz";
    throw NumericError(msg.str());
  }
  return g;
}

double srs_gain(const RamanContext& ctx, double z_km, double f_hz) {
  return srs_gain_from_zeta(raman_zeta(ctx, z_km), ctx.b_tot_hz, f_hz);
}

double rho(const RamanContext& ctx, double z_km, double f_hz) {
  return srs_gain(ctx, z_km, f_hz) * std::exp(-ctx.alpha_per_km * z_km);
}

double delta_rho_db(const RamanContext& ctx, double z_km) {
  return kDeltaRhoDbCoefficient * raman_zeta(ctx, z_km) * ctx.b_tot_hz;
}

}  // namespace isrs_egn
