#pragma once

// Per-span FWM efficiency factor mu_s(f1, f2, f) = int_0^L rho(z, f1+f2-f) e^{i chi z} dz
// evaluated three ways. All frequencies are absolute offsets from the band
// centre; mu carries km units.

#include <complex>
#include <cstddef>
#include <vector>

#include "isrs_egn/config.hpp"
#include "isrs_egn/raman.hpp"

namespace isrs_egn {

using cplx = std::complex<double>;

struct MuQuery {
  double f1_hz = 0.0;
  double f2_hz = 0.0;
  double f_hz = 0.0;
  FiberSpan span;
  RamanContext ctx;
};

/// Step policy of the reference integrator: the panel width is
/// min(delta_z, max_step, 2*pi / (|chi| * samples_per_cycle)).
struct IntegralStepPolicy {
  double delta_z_km = 0.5;
  double samples_per_cycle = 20.0;
  double max_step_km = 0.5;

  static IntegralStepPolicy from(const NumericsPolicy& p) { return {p.delta_z_km, p.samples_per_cycle, p.max_step_km}; }
};

/// Smallest admissible reference-integrator step before the query is rejected.
inline constexpr double kMinIntegralStepKm = 1e-6;

/// Phase-mismatch rate in rad/km: 4 pi^2 (f1-f)(f2-f) [beta2 + pi beta3 (f1+f2)].
double chi(double f1_hz, double f2_hz, double f_hz, double beta2_s2_per_km, double beta3_s3_per_km);

/// Panel width the reference integrator uses for a given chi.
double integral_step_km(double chi_rad_per_km, const IntegralStepPolicy& policy);

/// (e^{c L} - 1) / c, accurate for small |c L|.
cplx exp_integral(cplx c, double length_km);

/// Reference: composite 3-point Gauss-Legendre over oscillation-resolving panels.
/// Throws NumericError when the step would fall below kMinIntegralStepKm.
cplx mu_integral(const MuQuery& q, const IntegralStepPolicy& policy = {});

/// Closed form from a first-order expansion of the SRS envelope.
cplx mu_maclaurin(const MuQuery& q);

/// Closed form with the SRS envelope frozen at each segment midpoint.
cplx mu_segment(const MuQuery& q, double delta_z_km);

/// K = ceil(L / delta_z).
int segment_count(double length_km, double delta_z_km);

/// Segment kernel with the per-segment SRS quantities precomputed for one span.
class SegmentKernel {
 public:
  SegmentKernel(const FiberSpan& span, const RamanContext& ctx, double delta_z_km);

  cplx operator()(double f1_hz, double f2_hz, double f_hz) const;

  int segments() const { return static_cast<int>(midpoints_km_.size()); }
  const std::vector<double>& midpoints_km() const { return midpoints_km_; }

 private:
  FiberSpan span_;
  RamanContext ctx_;
  double step_km_;
  std::vector<double> midpoints_km_;
  std::vector<double> zeta_;
  std::vector<double> scale_;  // zeta B / (2 sinh(zeta B / 2)) per segment
};

/// Method-dispatching kernel for one span; cheap to copy, immutable.
class FwmKernel {
 public:
  FwmKernel(const FiberSpan& span, const RamanContext& ctx, const NumericsPolicy& policy);

  cplx operator()(double f1_hz, double f2_hz, double f_hz) const;

  MuMethod method() const { return method_; }

 private:
  FiberSpan span_;
  RamanContext ctx_;
  MuMethod method_;
  IntegralStepPolicy step_;
  std::vector<SegmentKernel> segment_;  // empty unless method_ == segment
};

cplx mu(const MuQuery& q, const NumericsPolicy& policy);

/// |mu| / L_eff(L_s).
double fwm_efficiency(const MuQuery& q, const NumericsPolicy& policy);

/// Samples of the three factors of the mu integrand on [0, L_s].
struct IntegrandTrace {
  std::vector<double> z_km;
  std::vector<cplx> total;
  std::vector<double> srs_gain_term;
  std::vector<double> attenuation_term;
  std::vector<cplx> pmf_term;
};

IntegrandTrace integrand_trace(const MuQuery& q, std::size_t n_samples);

}  // namespace isrs_egn
