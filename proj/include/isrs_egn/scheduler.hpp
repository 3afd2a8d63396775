#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "isrs_egn/config.hpp"
#include "isrs_egn/errors.hpp"
#include "isrs_egn/fwm.hpp"
#include "isrs_egn/islands.hpp"

namespace isrs_egn {

/// Failure inside one island task; carries the island identity.
class IslandError : public NumericError {
 public:
  IslandError(const Island& island, const std::string& what);
  const Island& island() const { return island_; }

 private:
  Island island_;
};

/// 1 island per batch for the reference integrator, 32 for the closed forms.
int default_chunk_size(MuMethod method);

/// requested > 0 wins; otherwise the method default.
int resolve_chunk_size(int requested, MuMethod method);

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads. Batches of
/// `chunk_size` consecutive indices are claimed from a shared counter and
/// results land in slot i, so the output never depends on scheduling. If any
/// call throws, the exception of the lowest failing index is rethrown and no
/// results are returned.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int workers, int chunk_size, Fn&& fn) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (chunk_size < 1) throw std::invalid_argument("chunk size must be >= 1");
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t chunk = static_cast<std::size_t>(chunk_size);
  const std::size_t batches = (count + chunk - 1) / chunk;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto drain = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= batches) return;
      const std::size_t end = std::min(count, (b + 1) * chunk);
      for (std::size_t i = b * chunk; i < end; ++i) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          break;
        }
      }
    }
  };

  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), batches);
  if (threads <= 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(drain);
    drain();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct IslandRun {
  std::vector<cplx> per_island;
  cplx total;
};

/// Evaluates every island and sums the results in list order.
IslandRun run_islands(const std::vector<Island>& islands, int workers, int chunk_size,
                      const std::function<cplx(const Island&)>& eval);

struct BenchRow {
  MuMethod method;
  int workers;
  double median_s;
  double speedup;
};

/// Median wall time of >= 3 repeated evaluations of the centre channel per
/// worker count; speedup is relative to workers=1, or to the first entry
/// when 1 is not listed.
std::vector<BenchRow> benchmark(const SystemConfig& config, const std::vector<int>& workers_list, int repeats = 3);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace isrs_egn
