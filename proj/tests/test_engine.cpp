#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "isrs_egn/config.hpp"
#include "isrs_egn/engine.hpp"
#include "isrs_egn/errors.hpp"
#include "isrs_egn/scheduler.hpp"
#include "oracles.hpp"

using namespace isrs_egn;

namespace {

struct DeskOptions {
  int channels = 11;
  double cr = 1.12;
  std::string modulation = R"({"name": "PM-QPSK", "psi": 4})";
  double resolution_ghz = 2.0;
  double g_resolution_ghz = 2.5;
  std::string dispersion = R"("d_ps_nm_km": 17, "s_ps_nm2_km": 0, "lambda_nm": 1550)";
  int repeat = 1;
};

SystemConfig desk(const DeskOptions& o = {}) {
  return parse_config(R"({"spans": [{"length_km": 100, "alpha_db_per_km": 0.2, )" + o.dispersion +
                      R"(, "gamma_per_w_km": 1.2, "cr_per_w_km_thz": )" + std::to_string(o.cr) +
                      R"(, "repeat": )" + std::to_string(o.repeat) + R"(}],
    "grid": {"num_channels": )" + std::to_string(o.channels) +
                      R"(, "symbol_rate_gbaud": 10, "spacing_ghz": 10.1, "power": {"total_dbm": 19}},
    "modulation": )" + o.modulation +
                      R"(, "numerics": {"resolution_ghz": )" + std::to_string(o.resolution_ghz) +
                      R"(, "g_resolution_ghz": )" + std::to_string(o.g_resolution_ghz) + "}}");
}

const LinkFn kUnitLink = [](double, double, double) { return cplx(1.0, 0.0); };

}  // namespace

TEST_CASE("island enumeration") {
  CHECK(enumerate_islands(0, 0) == std::vector<Island>{{0, 0, 0, NliClass::sci}});
  CHECK(enumerate_islands(1, 0).size() == 19);
  CHECK(enumerate_islands(1, 1).size() == 16);
  for (int m = 0; m <= 6; ++m) {
    for (int kappa = -m; kappa <= m; ++kappa) {
      const auto got = enumerate_islands(m, kappa);
      const auto want = oracle::brute_islands(m, kappa);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::tuple{got[i].kappa1, got[i].kappa2, got[i].l} == want[i]);
        const int k3 = got[i].kappa3(kappa);
        CHECK(-m <= k3);
        CHECK(k3 <= m);
      }
    }
  }
  CHECK_THROWS_AS(enumerate_islands(2, 3), std::invalid_argument);
}

TEST_CASE("island classes") {
  for (int k = -3; k <= 3; ++k) CHECK(classify_island({k, k, 0}, k) == NliClass::sci);
  CHECK(classify_island({5, 0, 0}, 0) == NliClass::xci);
  CHECK(classify_island({1, 2, 0}, 0) == NliClass::mci);
  CHECK(classify_island({0, 0, 1}, 0) == NliClass::xci);
  CHECK(classify_island({1, -1, 0}, 0) == NliClass::mci);
  CHECK(to_string(NliClass::mci) == "MCI");
}

TEST_CASE("spectral shape") {
  const double r = 10e9;
  CHECK(spectral_shape(0.0, r) == 1.0 / std::sqrt(r));
  CHECK(spectral_shape(0.6 * r, r) == 0.0);
  for (int n : {2, 7, 10, 64}) {
    const double h = r / n;
    double energy = 0.0;
    for (int i = 0; i < n; ++i) energy += std::pow(spectral_shape(-r / 2.0 + (i + 0.5) * h, r), 2) * h;
    CHECK(std::abs(energy - 1.0) < 1e-12);
  }
}

TEST_CASE("grid resolution") {
  CHECK(grid_points(10e9, 1e9) == 10);
  CHECK(grid_points(10e9, 5e9) == 2);
  CHECK(grid_points(10e9, 4e9) == 3);
  CHECK_THROWS_AS(grid_points(10e9, 7e9), ConfigError);
}

TEST_CASE("unit link D is the constraint volume") {
  const double r = 10e9;
  const ChannelGeometry g{r, r, 0.0};
  for (double res : {5e9, 10e9 / 3.0, 1e9}) {
    CHECK(IslandQuadrature({0, 0, 0}, 0, g, kUnitLink, res).d() ==
          doctest::Approx(32.0 / 81.0 * r * r).epsilon(1e-12));
    CHECK(IslandQuadrature({0, 0, 1}, 0, g, kUnitLink, res).d() ==
          doctest::Approx(8.0 / 81.0 * r * r).epsilon(1e-12));
    CHECK(IslandQuadrature({0, 0, -1}, 0, g, kUnitLink, res).d() ==
          doctest::Approx(8.0 / 81.0 * r * r).epsilon(1e-12));
  }
  // Monte-Carlo volume of the same regions; 4e6 samples give about 0.1% noise.
  const double v0 = oracle::mc_constraint_volume(r, 0.0, 4'000'000, 41);
  const double v1 = oracle::mc_constraint_volume(r, r, 4'000'000, 43);
  CHECK(16.0 / 27.0 * r * r * v0 / (r * r * r) == doctest::Approx(32.0 / 81.0 * r * r).epsilon(5e-3));
  CHECK(16.0 / 27.0 * r * r * v1 / (r * r * r) == doctest::Approx(8.0 / 81.0 * r * r).epsilon(1e-2));

  // Channel spacing wider than R: l = +-1 regions shrink accordingly.
  const ChannelGeometry wide{r, 1.01 * r, 0.0};
  const double vw = oracle::mc_constraint_volume(r, 1.01 * r, 4'000'000, 47);
  CHECK(IslandQuadrature({0, 0, 1}, 0, wide, kUnitLink, 1e9).d() ==
        doctest::Approx(16.0 / 27.0 * vw / r).epsilon(2e-2));
}

TEST_CASE("factorised terms equal direct sums") {
  const SystemConfig c = desk({.channels = 3, .resolution_ghz = 10.0 / 3.0});
  const LinkFunction link(SpanChain::from_config(c), c.numerics);
  const LinkFn y = [&link](double a, double b, double f) { return link(a, b, f); };
  const ChannelGeometry g = ChannelGeometry::from_config(c);
  for (int kappa = -1; kappa <= 1; ++kappa) {
    for (const Island& island : enumerate_islands(1, kappa)) {
      IslandQuadrature q(island, kappa, g, y, c.numerics.resolution_hz);
      REQUIRE(q.points() == 3);
      CHECK(oracle::rel_err(q.e(), q.e_direct()) < 1e-10);
      CHECK(oracle::rel_err(q.f(), q.f_direct()) < 1e-10);
      CHECK(oracle::rel_err(q.h(), q.h_direct()) < 1e-10);
      CHECK(q.d() >= 0.0);
      CHECK(q.e() >= 0.0);
      CHECK(q.f() >= 0.0);
      CHECK(q.h() >= 0.0);
      CHECK(q.y_evaluations() <= 27);
    }
  }
}

TEST_CASE("single channel") {
  const SystemConfig c = desk({.channels = 1, .modulation = R"({"name": "PM-2D-Gaussian"})"});
  const NliReport r = nli_variance(0, c);
  const LinkFunction link(SpanChain::from_config(c), c.numerics);
  const double d = d_term({0, 0, 0}, 0, c, [&link](double a, double b, double f) { return link(a, b, f); });
  const double p = c.grid.power(0);
  CHECK(r.islands == 1);
  CHECK(r.sigma2_nli == doctest::Approx(p * p * p * d).epsilon(1e-15));
  CHECK(r.eta == doctest::Approx(d).epsilon(1e-14));
  CHECK(r.class_db(NliClass::sci).has_value());
  CHECK_FALSE(r.class_db(NliClass::xci).has_value());
  CHECK_FALSE(r.class_db(NliClass::mci).has_value());
  CHECK_THROWS_AS(nli_variance(1, c), ConfigError);
}

TEST_CASE("Gaussian variance is the D sum") {
  const SystemConfig c = desk({.channels = 5, .modulation = R"({"name": "PM-2D-Gaussian"})"});
  const LinkFunction link(SpanChain::from_config(c), c.numerics);
  const LinkFn y = [&link](double a, double b, double f) { return link(a, b, f); };
  for (int kappa : {0, 2}) {
    double sum = 0.0;
    for (const Island& i : enumerate_islands(c.grid.m, kappa)) {
      const double p = c.grid.power(i.kappa1) * c.grid.power(i.kappa2) * c.grid.power(i.kappa3(kappa));
      sum += p * d_term(i, kappa, c, y);
    }
    const NliReport r = nli_variance(kappa, c, y);
    CHECK(r.sigma2_nli == sum);
    CHECK(r.imag_residue == 0.0);
    for (const auto& t : r.by_class) {
      CHECK(t.e == 0.0);
      CHECK(t.f == 0.0);
      CHECK(t.g == cplx(0.0, 0.0));
      CHECK(t.h == 0.0);
    }
  }
}

TEST_CASE("Kronecker gating") {
  const SystemConfig qpsk = desk({.channels = 5});
  const SystemConfig gauss = desk({.channels = 5, .modulation = R"({"name": "PM-2D-Gaussian"})"});
  const LinkFunction link(SpanChain::from_config(qpsk), qpsk.numerics);
  const LinkFn y = [&link](double a, double b, double f) { return link(a, b, f); };
  const ChannelGeometry g = ChannelGeometry::from_config(qpsk);
  int ungated = 0;
  for (int kappa : {-2, 0, 1}) {
    for (const Island& i : enumerate_islands(2, kappa)) {
      const bool e = i.kappa2 - kappa + i.l == 0;
      const bool f = i.kappa1 - kappa + i.l == 0;
      const bool gg = i.kappa1 == i.kappa2;
      const TermContribution a = island_contribution(i, kappa, qpsk, g, y);
      const TermContribution b = island_contribution(i, kappa, gauss, g, y);
      CHECK(a.d == b.d);
      CHECK((a.e != 0.0) == e);
      CHECK((a.f != 0.0) == f);
      CHECK((a.g != cplx(0.0, 0.0)) == gg);
      CHECK((a.h != 0.0) == (gg && f));
      if (!e && !f && !gg) {
        ++ungated;
        CHECK(a.total() == b.total());
      }
    }
  }
  CHECK(ungated > 0);
}

TEST_CASE("QPSK interference is below Gaussian") {
  const NliReport q = nli_variance(0, desk());
  const NliReport g = nli_variance(0, desk({.modulation = R"({"name": "PM-2D-Gaussian"})"}));
  CHECK(q.eta_db < g.eta_db);
  CHECK(q.imag_residue / q.sigma2_nli < kMaxImagResidue);
  CHECK(q.islands == enumerate_islands(5, 0).size());
  CHECK(q.islands_by_class[0] + q.islands_by_class[1] + q.islands_by_class[2] == q.islands);
  for (const auto& t : q.by_class) {
    CHECK(t.d >= 0.0);
    CHECK(t.h >= 0.0);
  }
}

TEST_CASE("mirror symmetry without Raman and beta3") {
  const SystemConfig c = desk({.channels = 5, .cr = 0.0, .dispersion = R"("beta2_ps2_km": -21.7)"});
  for (int kappa : {1, 2}) {
    const NliReport a = nli_variance(kappa, c);
    const NliReport b = nli_variance(-kappa, c);
    CHECK(oracle::rel_err(a.eta, b.eta) < 1e-9);
  }
}

TEST_CASE("frequency origin shift") {
  const SystemConfig c = desk({.channels = 3, .cr = 0.0, .dispersion = R"("beta2_ps2_km": -21.7)"});
  const LinkFunction link(SpanChain::from_config(c), c.numerics);
  const LinkFn y = [&link](double a, double b, double f) { return link(a, b, f); };
  const ChannelGeometry base = ChannelGeometry::from_config(c);
  ChannelGeometry moved = base;
  moved.origin_hz = 0.37e12;
  for (const Island& i : enumerate_islands(1, 0)) {
    const TermContribution a = island_contribution(i, 0, c, base, y);
    const TermContribution b = island_contribution(i, 0, c, moved, y);
    CHECK(oracle::rel_err(b.total(), a.total()) < 1e-9);
  }
}

TEST_CASE("grid refinement converges") {
  DeskOptions o{.channels = 3};
  double prev_eta = 0.0;
  double prev_change = 0.0;
  int level = 0;
  for (double res : {2.5, 1.25, 0.625}) {
    o.resolution_ghz = res;
    o.g_resolution_ghz = 2.5;
    const double eta = nli_variance(0, desk(o)).eta;
    if (level >= 1) {
      const double change = std::abs(eta - prev_eta);
      if (level >= 2) CHECK(change < prev_change);
      prev_change = change;
    }
    prev_eta = eta;
    ++level;
  }
}

TEST_CASE("island failures carry the island") {
  const SystemConfig c = desk({.channels = 3});
  const LinkFn bad = [](double f1, double, double) -> cplx {
    if (f1 > 5e9) throw NumericError("bad sample");
    return {1.0, 0.0};
  };
  try {
    nli_variance(0, c, bad);
    FAIL("expected an island error");
  } catch (const IslandError& e) {
    CHECK(e.island().kappa1 == 1);
    CHECK(std::string(e.what()).find("bad sample") != std::string::npos);
    CHECK(std::string(e.what()).find("(1, -1, -1)") != std::string::npos);
  }
}
