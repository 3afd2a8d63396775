#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "doctest.h"
#include "isrs_egn/config.hpp"
#include "isrs_egn/engine.hpp"
#include "isrs_egn/scheduler.hpp"

using namespace isrs_egn;

namespace {

SystemConfig small_system(int channels) {
  return parse_config(R"({"spans": [{"length_km": 100, "alpha_db_per_km": 0.2, "beta2_ps2_km": -21.68,
      "gamma_per_w_km": 1.2, "cr_per_w_km_thz": 1.12}],
    "grid": {"num_channels": )" + std::to_string(channels) +
                      R"(, "symbol_rate_gbaud": 10, "spacing_ghz": 10.1, "power": {"total_dbm": 19}},
    "modulation": {"name": "PM-QPSK", "psi": 4},
    "numerics": {"resolution_ghz": 2.5, "g_resolution_ghz": 2.5}})");
}

}  // namespace

TEST_CASE("chunk policy") {
  CHECK(default_chunk_size(MuMethod::integral) == 1);
  CHECK(default_chunk_size(MuMethod::maclaurin) == 32);
  CHECK(default_chunk_size(MuMethod::segment) == 32);
  CHECK(resolve_chunk_size(0, MuMethod::integral) == 1);
  CHECK(resolve_chunk_size(7, MuMethod::integral) == 7);
  CHECK(resolve_chunk_size(0, MuMethod::segment) == 32);
}

TEST_CASE("parallel map fills every slot once") {
  for (int workers : {1, 2, 3, 8}) {
    for (int chunk : {1, 4, 32, 1000}) {
      std::vector<std::atomic<int>> calls(257);
      const auto out = parallel_map<std::size_t>(257, workers, chunk, [&](std::size_t i) {
        calls[i].fetch_add(1);
        return i * i;
      });
      REQUIRE(out.size() == 257);
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] == i * i);
        CHECK(calls[i].load() == 1);
      }
    }
  }
  CHECK(parallel_map<int>(0, 4, 1, [](std::size_t) { return 1; }).empty());
  CHECK_THROWS_AS(parallel_map<int>(3, 0, 1, [](std::size_t) { return 1; }), std::invalid_argument);
  CHECK_THROWS_AS(parallel_map<int>(3, 1, 0, [](std::size_t) { return 1; }), std::invalid_argument);
}

TEST_CASE("island totals are independent of scheduling") {
  const auto islands = enumerate_islands(5, 0);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> values;
  for (std::size_t i = 0; i < islands.size(); ++i) values.emplace_back(u(rng) * 1e-3, u(rng) * 1e5);
  auto eval = [&](const Island& island) {
    const auto it = std::find(islands.begin(), islands.end(), island);
    return values[static_cast<std::size_t>(it - islands.begin())];
  };
  const IslandRun serial = run_islands(islands, 1, 1, eval);
  REQUIRE(serial.per_island.size() == islands.size());
  cplx expected = 0.0;
  for (const cplx& v : values) expected += v;
  CHECK(serial.total == expected);
  for (int workers : {2, 4, 8}) {
    for (int chunk : {1, 3, 32}) {
      const IslandRun r = run_islands(islands, workers, chunk, eval);
      CHECK(r.total == serial.total);
      CHECK(r.per_island == serial.per_island);
    }
  }
}

TEST_CASE("variance is bit-identical across workers and chunks") {
  SystemConfig c = small_system(7);
  const NliReport ref = nli_variance(2, c);
  for (int workers : {2, 3, 8}) {
    for (int chunk : {1, 5, 32}) {
      c.numerics.workers = workers;
      c.numerics.chunk_size = chunk;
      const NliReport r = nli_variance(2, c);
      CHECK(r.sigma2_nli == ref.sigma2_nli);
      CHECK(r.imag_residue == ref.imag_residue);
      CHECK(r.eta_db == ref.eta_db);
    }
  }
}

TEST_CASE("lowest failing island is reported") {
  const auto islands = enumerate_islands(3, 0);
  for (int workers : {1, 4}) {
    try {
      run_islands(islands, workers, 2, [](const Island& i) -> cplx {
        if (i.kappa1 >= 1 && i.kappa2 == 0) throw std::runtime_error("boom");
        return {1.0, 0.0};
      });
      FAIL("expected an island error");
    } catch (const IslandError& e) {
      CHECK(e.island() == Island{1, 0, -1, NliClass::xci});
      CHECK(std::string(e.what()) == "island (1, 0, -1): boom");
    }
  }
}

TEST_CASE("every worker claims batches") {
  const std::size_t count = 64;
  std::mutex m;
  std::set<std::thread::id> seen;
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  parallel_map<int>(count, 4, 2, [&](std::size_t) {
    const int now = in_flight.fetch_add(1) + 1;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    {
      std::lock_guard<std::mutex> lock(m);
      seen.insert(std::this_thread::get_id());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    in_flight.fetch_sub(1);
    return 0;
  });
  CHECK(seen.size() == 4);
  CHECK(peak.load() <= 4);
  CHECK(peak.load() >= 2);
}

TEST_CASE("benchmark table") {
  const SystemConfig c = small_system(3);
  const auto one = benchmark(c, {1}, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].speedup == 1.0);
  CHECK(one[0].median_s > 0.0);

  const auto rows = benchmark(c, {2, 1}, 3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].speedup == 1.0);
  CHECK(rows[0].speedup == doctest::Approx(rows[1].median_s / rows[0].median_s));
  CHECK_THROWS(benchmark(c, {}, 3));

  const std::string csv = bench_csv(rows);
  CHECK(csv.rfind("method,workers,median_s,speedup\n", 0) == 0);
  CHECK(csv.find("segment,2,") != std::string::npos);
}
