#include "isrs_egn/fwm.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "isrs_egn/errors.hpp"
#include "isrs_egn/units.hpp"

namespace isrs_egn {

namespace {

using units::kPi;

// e^w - 1 without cancellation for small |w|.
cplx expm1_complex(cplx w) {
  const double a = w.real();
  const double b = w.imag();
  const double s = std::sin(b / 2.0);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

// Gauss-Legendre 3-point nodes and weights on [0, 1].
constexpr std::array<double, 3> kGlNode{0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr std::array<double, 3> kGlWeight{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

constexpr int kReanchorEvery = 16;

}  // namespace

double chi(double f1, double f2, double f, double beta2, double beta3) {
  return 4.0 * kPi * kPi * (f1 - f) * (f2 - f) * (beta2 + kPi * beta3 * (f1 + f2));
}

double integral_step_km(double chi_rad_per_km, const IntegralStepPolicy& policy) {
  double h = std::min(policy.delta_z_km, policy.max_step_km);
  if (chi_rad_per_km != 0.0) {
    h = std::min(h, 2.0 * kPi / (std::abs(chi_rad_per_km) * policy.samples_per_cycle));
  }
  return h;
}

cplx exp_integral(cplx c, double length_km) {
  const cplx cl = c * length_km;
  if (std::abs(cl) < 1e-8) return length_km * (1.0 + cl / 2.0);
  return expm1_complex(cl) / c;
}

cplx mu_integral(const MuQuery& q, const IntegralStepPolicy& policy) {
  const FiberSpan& s = q.span;
  const double x = chi(q.f1_hz, q.f2_hz, q.f_hz, s.beta2_s2_per_km, s.beta3_s3_per_km);
  const double h0 = integral_step_km(x, policy);
  if (!(h0 >= kMinIntegralStepKm)) {
    std::ostringstream msg;
    msg << "integral step underflow (" << h0 << " km) at (f1, f2, f) = (" << q.f1_hz << ", " << q.f2_hz << ", "
        << q.f_hz << ") Hz";
    throw NumericError(msg.str());
  }
  const auto panels = static_cast<long long>(std::ceil(s.length_km / h0 * (1.0 - 1e-12)));
  const double h = s.length_km / static_cast<double>(panels);
  const double nu = q.f1_hz + q.f2_hz - q.f_hz;
  const double alpha = q.ctx.alpha_per_km;
  const double pc = q.ctx.p_tot_w * q.ctx.cr_per_w_km_hz;

  std::array<cplx, 3> node_phase{};
  for (int j = 0; j < 3; ++j) node_phase[j] = std::polar(1.0, x * kGlNode[j] * h);
  const cplx panel_step = std::polar(1.0, x * h);

  cplx sum = 0.0;
  cplx base = 1.0;
  for (long long p = 0; p < panels; ++p) {
    const double z0 = static_cast<double>(p) * h;
    if (p % kReanchorEvery == 0) base = std::polar(1.0, x * z0);
    cplx panel = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double z = z0 + kGlNode[j] * h;
      const double em = std::expm1(-alpha * z);
      const double leff = -em / alpha;
      const double envelope = srs_gain_from_zeta(pc * leff, q.ctx.b_tot_hz, nu) * (1.0 + em);
      panel += kGlWeight[j] * envelope * node_phase[j];
    }
    sum += base * panel;
    base *= panel_step;
  }
  return sum * h;
}

cplx mu_maclaurin(const MuQuery& q) {
  const FiberSpan& s = q.span;
  const double x = chi(q.f1_hz, q.f2_hz, q.f_hz, s.beta2_s2_per_km, s.beta3_s3_per_km);
  const double alpha = q.ctx.alpha_per_km;
  const cplx eta = exp_integral({-alpha, x}, s.length_km);
  const double nu = q.f1_hz + q.f2_hz - q.f_hz;
  const double slope = q.ctx.p_tot_w * q.ctx.cr_per_w_km_hz * nu / alpha;
  if (slope == 0.0) return eta;
  return eta - slope * (eta - exp_integral({-2.0 * alpha, x}, s.length_km));
}

int segment_count(double length_km, double delta_z_km) {
  if (!(delta_z_km > 0.0)) throw std::invalid_argument("segment step must be positive");
  return std::max(1, static_cast<int>(std::ceil(length_km / delta_z_km * (1.0 - 1e-12))));
}

SegmentKernel::SegmentKernel(const FiberSpan& span, const RamanContext& ctx, double delta_z_km)
    : span_(span), ctx_(ctx) {
  const int k_count = segment_count(span.length_km, delta_z_km);
  step_km_ = span.length_km / k_count;
  midpoints_km_.reserve(static_cast<std::size_t>(k_count));
  zeta_.reserve(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    const double zk = (k + 0.5) / k_count * span.length_km;
    midpoints_km_.push_back(zk);
    const double zeta = raman_zeta(ctx, zk);
    zeta_.push_back(zeta);
    scale_.push_back(srs_gain_from_zeta(zeta, ctx.b_tot_hz, 0.0));
  }
}

cplx SegmentKernel::operator()(double f1, double f2, double f) const {
  const double x = chi(f1, f2, f, span_.beta2_s2_per_km, span_.beta3_s3_per_km);
  const cplx c{-ctx_.alpha_per_km, x};
  const cplx first = exp_integral(c, step_km_);  // I_0
  const cplx step = std::exp(c * step_km_);
  const double nu = f1 + f2 - f;
  cplx sum = 0.0;
  cplx start = 1.0;  // e^{c k h}
  const int k_count = segments();
  for (int k = 0; k < k_count; ++k) {
    if (k % kReanchorEvery == 0) start = std::exp(c * (k * step_km_));
    const auto ku = static_cast<std::size_t>(k);
    sum += scale_[ku] * std::exp(-zeta_[ku] * nu) * start;
    start *= step;
  }
  return sum * first;
}

cplx mu_segment(const MuQuery& q, double delta_z_km) {
  return SegmentKernel(q.span, q.ctx, delta_z_km)(q.f1_hz, q.f2_hz, q.f_hz);
}

FwmKernel::FwmKernel(const FiberSpan& span, const RamanContext& ctx, const NumericsPolicy& policy)
    : span_(span), ctx_(ctx), method_(policy.mu_method), step_(IntegralStepPolicy::from(policy)) {
  if (method_ == MuMethod::segment) segment_.emplace_back(span, ctx, policy.delta_z_km);
}

cplx FwmKernel::operator()(double f1, double f2, double f) const {
  switch (method_) {
    case MuMethod::integral:
      return mu_integral({f1, f2, f, span_, ctx_}, step_);
    case MuMethod::maclaurin:
      return mu_maclaurin({f1, f2, f, span_, ctx_});
    case MuMethod::segment:
      return segment_.front()(f1, f2, f);
  }
  return {};
}

cplx mu(const MuQuery& q, const NumericsPolicy& policy) {
  return FwmKernel(q.span, q.ctx, policy)(q.f1_hz, q.f2_hz, q.f_hz);
}

double fwm_efficiency(const MuQuery& q, const NumericsPolicy& policy) {
  return std::abs(mu(q, policy)) / effective_length(q.span.length_km, q.ctx.alpha_per_km);
}

IntegrandTrace integrand_trace(const MuQuery& q, std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("integrand_trace needs at least 2 samples");
  const FiberSpan& s = q.span;
  const double x = chi(q.f1_hz, q.f2_hz, q.f_hz, s.beta2_s2_per_km, s.beta3_s3_per_km);
  const double nu = q.f1_hz + q.f2_hz - q.f_hz;
  IntegrandTrace t;
  t.z_km.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double z = s.length_km * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double gain = srs_gain(q.ctx, z, nu);
    const double att = std::exp(-q.ctx.alpha_per_km * z);
    const cplx pmf = std::polar(1.0, x * z);
    t.z_km.push_back(z);
    t.srs_gain_term.push_back(gain);
    t.attenuation_term.push_back(att);
    t.pmf_term.push_back(pmf);
    t.total.push_back(gain * att * pmf);
  }
  return t;
}

}  // namespace isrs_egn
