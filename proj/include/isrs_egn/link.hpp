#pragma once

#include <vector>

#include "isrs_egn/config.hpp"
#include "isrs_egn/fwm.hpp"
#include "isrs_egn/raman.hpp"

namespace isrs_egn {

/// Ordered spans with their resolved Raman contexts and amplifier gains.
struct SpanChain {
  std::vector<FiberSpan> spans;
  std::vector<RamanContext> contexts;
  std::vector<double> gains;  // linear amplifier gain applied after each span

  /// Transparent spans get g = e^{alpha L}; the band-averaged SRS gain is
  /// unity, so that restores the launch total exactly.
  static SpanChain from_config(const SystemConfig& config);

  std::size_t size() const { return spans.size(); }
};

/// Multi-span link function Y(f1, f2, f) for one chain and mu method.
class LinkFunction {
 public:
  LinkFunction(SpanChain chain, const NumericsPolicy& policy);

  cplx operator()(double f1_hz, double f2_hz, double f_hz) const;

  const SpanChain& chain() const { return chain_; }

 private:
  SpanChain chain_;
  std::vector<FwmKernel> kernels_;
  std::vector<std::size_t> kernel_of_span_;  // identical spans share a kernel
};

cplx link_y(const SpanChain& chain, double f1_hz, double f2_hz, double f_hz, const NumericsPolicy& policy);

}  // namespace isrs_egn
