#include "isrs_egn/scheduler.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "isrs_egn/engine.hpp"

namespace isrs_egn {

namespace {

std::string island_label(const Island& i) {
  std::ostringstream out;
  out << "island (" << i.kappa1 << ", " << i.kappa2 << ", " << i.l << ")";
  return out.str();
}

}  // namespace

IslandError::IslandError(const Island& island, const std::string& what)
    : NumericError(island_label(island) + ": " + what), island_(island) {}

int default_chunk_size(MuMethod method) { return method == MuMethod::integral ? 1 : 32; }

int resolve_chunk_size(int requested, MuMethod method) {
  return requested > 0 ? requested : default_chunk_size(method);
}

IslandRun run_islands(const std::vector<Island>& islands, int workers, int chunk_size,
                      const std::function<cplx(const Island&)>& eval) {
  IslandRun run;
  run.per_island = parallel_map<cplx>(islands.size(), workers, chunk_size, [&](std::size_t i) {
    try {
      return eval(islands[i]);
    } catch (const IslandError&) {
      throw;
    } catch (const std::exception& e) {
      throw IslandError(islands[i], e.what());
    }
  });
  run.total = 0.0;
  for (const cplx& v : run.per_island) run.total += v;
  return run;
}

std::vector<BenchRow> benchmark(const SystemConfig& config, const std::vector<int>& workers_list, int repeats) {
  if (workers_list.empty()) throw std::invalid_argument("benchmark needs at least one worker count");
  repeats = std::max(repeats, 3);
  std::vector<BenchRow> rows;
  double baseline = 0.0;
  for (int w : workers_list) {
    SystemConfig c = config;
    c.numerics.workers = w;
    std::vector<double> times;
    for (int r = 0; r < repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      nli_variance(0, c);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    const double median = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    rows.push_back({c.numerics.mu_method, w, median, 0.0});
  }
  for (const BenchRow& r : rows) {
    if (r.workers == 1) baseline = r.median_s;
  }
  if (baseline == 0.0) baseline = rows.front().median_s;
  for (BenchRow& r : rows) r.speedup = baseline / r.median_s;
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "method,workers,median_s,speedup\n";
  out << std::setprecision(17);
  for (const BenchRow& r : rows) {
    out << to_string(r.method) << ',' << r.workers << ',' << r.median_s << ',' << r.speedup << '\n';
  }
  return out.str();
}

}  // namespace isrs_egn
