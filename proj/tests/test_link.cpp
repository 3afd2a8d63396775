#include <cmath>
#include <random>

#include "doctest.h"
#include "isrs_egn/link.hpp"
#include "oracles.hpp"

using namespace isrs_egn;

namespace {

SpanChain chain_of(int n, double cr_per_thz) {
  SpanChain c;
  for (int i = 0; i < n; ++i) {
    c.spans.push_back(oracle::ref_span(cr_per_thz));
    c.contexts.push_back(oracle::ref_ctx(cr_per_thz));
    c.gains.push_back(std::exp(c.spans.back().alpha_per_km * c.spans.back().length_km));
  }
  return c;
}

NumericsPolicy policy_for(MuMethod m) {
  NumericsPolicy p;
  p.mu_method = m;
  return p;
}

}  // namespace

TEST_CASE("single span is gamma mu") {
  const SpanChain c = chain_of(1, 1.12);
  for (MuMethod m : {MuMethod::integral, MuMethod::maclaurin, MuMethod::segment}) {
    const NumericsPolicy p = policy_for(m);
    const MuQuery q{0.2e12, -0.1e12, 0.0, c.spans[0], c.contexts[0]};
    CHECK(link_y(c, 0.2e12, -0.1e12, 0.0, p) == 1.2 * mu(q, p));
  }
}

TEST_CASE("chain from config") {
  SystemConfig cfg;
  cfg.grid.m = 5;
  cfg.grid.symbol_rate_hz = 10e9;
  cfg.grid.spacing_hz = 10.1e9;
  cfg.grid.powers_w.assign(11, 0.0794 / 11.0);
  FiberSpan s = oracle::ref_span(1.12);
  cfg.spans = {s, s};
  cfg.spans[1].gain_mode = GainMode::explicit_gain;
  cfg.spans[1].gain_linear = 50.0;
  const SpanChain c = SpanChain::from_config(cfg);
  REQUIRE(c.size() == 2);
  CHECK(c.gains[0] == doctest::Approx(std::exp(s.alpha_per_km * 100.0)).epsilon(1e-14));
  CHECK(c.gains[1] == 50.0);
  CHECK(c.contexts[0].p_tot_w == doctest::Approx(0.0794).epsilon(1e-14));
  CHECK(c.contexts[1].p_tot_w == doctest::Approx(0.0794).epsilon(1e-14));
  CHECK(c.contexts[0].b_tot_hz == doctest::Approx(11 * 10e9));
}

TEST_CASE("phased array without Raman") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.5e12, 0.5e12);
  const NumericsPolicy p = policy_for(MuMethod::segment);
  for (int n : {2, 3, 5}) {
    const SpanChain c = chain_of(n, 0.0);
    for (int i = 0; i < 100; ++i) {
      const double f1 = u(rng), f2 = u(rng), f = u(rng);
      const double x = oracle::phase_rate(f1, f2, f, c.spans[0].beta2_s2_per_km, 0.0);
      const double l = c.spans[0].length_km;
      const double single = std::norm(1.2 * oracle::analytic_eta(x, c.spans[0].alpha_per_km, l));
      const double s = std::sin(x * l / 2.0);
      if (std::abs(s) < 1e-3) continue;
      const double factor = std::pow(std::sin(n * x * l / 2.0) / s, 2.0);
      const double y2 = std::norm(link_y(c, f1, f2, f, p));
      CHECK(std::abs(y2 - single * factor) <= 1e-8 * single * n * n);
      CHECK(std::sqrt(y2) <= n * 1.2 * std::sqrt(single) * (1.0 + 1e-12));
      if (n == 2) {
        CHECK(oracle::rel_err(y2, single * std::norm(1.0 + std::polar(1.0, x * l))) < 1e-8);
      }
    }
  }
}

TEST_CASE("in-phase spans add coherently") {
  const NumericsPolicy p = policy_for(MuMethod::integral);
  for (int n : {1, 2, 4}) {
    const SpanChain c = chain_of(n, 0.0);
    // f1 = f gives chi = 0 for any f2.
    const cplx single = 1.2 * mu({0.1e12, -0.3e12, 0.1e12, c.spans[0], c.contexts[0]}, p);
    CHECK(oracle::rel_err(link_y(c, 0.1e12, -0.3e12, 0.1e12, p), static_cast<double>(n) * single) < 1e-12);
  }
}

TEST_CASE("two Raman spans against the definition") {
  const SpanChain c = chain_of(2, 1.12);
  const NumericsPolicy p = policy_for(MuMethod::integral);
  const FiberSpan& s = c.spans[0];
  const RamanContext& ctx = c.contexts[0];
  const double g = c.gains[0];
  const double l = s.length_km;
  for (auto [f1, f2, f] : {std::tuple{0.2e12, -0.1e12, 0.0}, std::tuple{-0.4e12, 0.1e12, 0.3e12},
                           std::tuple{0.05e12, 0.02e12, -0.01e12}}) {
    const cplx m = oracle::simpson_mu(f1, f2, f, s, ctx, 1e-3);
    const double x = oracle::phase_rate(f1, f2, f, s.beta2_s2_per_km, 0.0);
    const double nu = f1 + f2 - f;
    const double after = std::sqrt(g * oracle::envelope(ctx, l, f));
    const double before = std::pow(g, 1.5) * std::sqrt(oracle::envelope(ctx, l, f1) * oracle::envelope(ctx, l, f2) *
                                                       oracle::envelope(ctx, l, nu));
    const cplx first = 1.2 * m * after;
    const cplx second = 1.2 * m * before * std::polar(1.0, x * l);
    // Both terms carry the kernel's 1e-6 error; the sum may partly cancel.
    CHECK(std::abs(link_y(c, f1, f2, f, p) - (first + second)) < 1e-6 * (std::abs(first) + std::abs(second)));
  }
}

TEST_CASE("link invariants") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-0.5e12, 0.5e12);
  for (MuMethod m : {MuMethod::maclaurin, MuMethod::segment}) {
    const NumericsPolicy p = policy_for(m);
    const LinkFunction y(chain_of(3, 1.12), p);
    for (int i = 0; i < 100; ++i) {
      const double f1 = u(rng), f2 = u(rng), f = u(rng);
      CHECK(oracle::rel_err(y(f2, f1, f), y(f1, f2, f)) < 1e-9);
    }
  }
  const LinkFunction flat(chain_of(4, 0.0), policy_for(MuMethod::segment));
  for (int i = 0; i < 100; ++i) {
    const double f1 = u(rng), f2 = u(rng), f = u(rng);
    const double single = std::abs(1.2 * mu({f1, f2, f, flat.chain().spans[0], flat.chain().contexts[0]},
                                            policy_for(MuMethod::segment)));
    CHECK(std::abs(flat(f1, f2, f)) <= 4.0 * single * (1.0 + 1e-12));
  }
}
