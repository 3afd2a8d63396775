#include "isrs_egn/link.hpp"

#include <cmath>

#include "isrs_egn/errors.hpp"

namespace isrs_egn {

SpanChain SpanChain::from_config(const SystemConfig& config) {
  if (config.spans.empty()) throw ConfigError("span chain is empty");
  SpanChain chain;
  double p_tot = config.grid.p_tot_w();
  for (const FiberSpan& s : config.spans) {
    chain.spans.push_back(s);
    chain.contexts.push_back({p_tot, s.cr_per_w_km_hz, config.grid.b_tot_hz(), s.alpha_per_km});
    const double g = s.gain_mode == GainMode::transparent ? std::exp(s.alpha_per_km * s.length_km) : s.gain_linear;
    chain.gains.push_back(g);
    p_tot *= g * std::exp(-s.alpha_per_km * s.length_km);
  }
  return chain;
}

LinkFunction::LinkFunction(SpanChain chain, const NumericsPolicy& policy) : chain_(std::move(chain)) {
  if (chain_.spans.empty()) throw ConfigError("span chain is empty");
  for (std::size_t s = 0; s < chain_.size(); ++s) {
    std::size_t found = kernels_.size();
    for (std::size_t p = 0; p < s; ++p) {
      if (chain_.spans[p] == chain_.spans[s] && chain_.contexts[p] == chain_.contexts[s]) {
        found = kernel_of_span_[p];
        break;
      }
    }
    if (found == kernels_.size()) kernels_.emplace_back(chain_.spans[s], chain_.contexts[s], policy);
    kernel_of_span_.push_back(found);
  }
}

cplx LinkFunction::operator()(double f1, double f2, double f) const {
  const std::size_t n = chain_.size();
  if (n == 1) return chain_.spans.front().gamma_per_w_km * kernels_.front()(f1, f2, f);
  const double nu = f1 + f2 - f;

  std::vector<cplx> mu_cache(kernels_.size());
  std::vector<bool> have(kernels_.size(), false);

  // suffix[s] = product over spans after s of sqrt(g rho(L, f)).
  std::vector<double> suffix(n, 1.0);
  for (std::size_t s = n - 1; s > 0; --s) {
    const FiberSpan& sp = chain_.spans[s];
    suffix[s - 1] = suffix[s] * std::sqrt(chain_.gains[s] * rho(chain_.contexts[s], sp.length_km, f));
  }

  cplx y = 0.0;
  double phase = 0.0;
  double prefix = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    const FiberSpan& sp = chain_.spans[s];
    const std::size_t k = kernel_of_span_[s];
    if (!have[k]) {
      mu_cache[k] = kernels_[k](f1, f2, f);
      have[k] = true;
    }
    y += sp.gamma_per_w_km * mu_cache[k] * std::polar(prefix * suffix[s], phase);

    const RamanContext& ctx = chain_.contexts[s];
    const double g = chain_.gains[s];
    prefix *= g * std::sqrt(g * rho(ctx, sp.length_km, f1) * rho(ctx, sp.length_km, f2) * rho(ctx, sp.length_km, nu));
    phase += chi(f1, f2, f, sp.beta2_s2_per_km, sp.beta3_s3_per_km) * sp.length_km;
  }
  return y;
}

cplx link_y(const SpanChain& chain, double f1, double f2, double f, const NumericsPolicy& policy) {
  return LinkFunction(chain, policy)(f1, f2, f);
}

}  // namespace isrs_egn
