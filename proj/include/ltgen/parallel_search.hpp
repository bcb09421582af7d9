#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "ltgen/sampler.hpp"

namespace ltgen {

struct ParallelConfig {
  SamplerConfig base;
  unsigned workers = 0;  // 0 = detected logical CPU count
};

struct ParallelResult {
  SampleResult result;
  unsigned winner = 0;
  double elapsed_ms = 0.0;
  // Sum of per-worker attempt counters at the time each worker stopped;
  // relaxed bookkeeping, diagnostic only.
  long long attempts_total = 0;
};

/// Seed for worker i, derived so distinct workers get pairwise distinct,
/// well-mixed streams and worker 0 never runs the raw base seed.
inline uint64_t derive_worker_seed(uint64_t base_seed, unsigned worker) {
  return splitmix64_mix(base_seed +
                        (static_cast<uint64_t>(worker) + 1) *
                            0x9E3779B97F4A7C15ULL);
}

/// Races independent samplers and returns the first success.
///
/// Each worker runs the full attempt loop on its own derived seed. The
/// first to succeed claims the single result slot and raises the
/// cancellation flag; the others observe it at their next attempt boundary
/// and stop. A worker that exhausts its own max_steps stops quietly without
/// cancelling the rest. nullopt only when every worker exhausted.
inline std::optional<ParallelResult> first_solution(
    const ParallelConfig& cfg) {
  unsigned workers = cfg.workers;
  if (workers == 0) {
    workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
  }
  std::atomic<bool> claimed{false};
  std::atomic<bool> cancel{false};
  std::atomic<long long> attempts_total{0};
  std::optional<SampleResult> slot;
  unsigned winner = 0;

  auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) {
    pool.emplace_back([&, i] {
      SamplerConfig wc = cfg.base;
      wc.seed = derive_worker_seed(cfg.base.seed, i);
      Sampler sampler(wc);
      long long attempts = 0;
      auto res = sampler.run(&cancel, &attempts);
      attempts_total.fetch_add(attempts, std::memory_order_relaxed);
      if (res && !claimed.exchange(true, std::memory_order_acq_rel)) {
        slot = std::move(res);
        winner = i;
        cancel.store(true, std::memory_order_release);
      }
    });
  }
  for (auto& t : pool) t.join();
  auto stop = std::chrono::steady_clock::now();

  if (!slot) return std::nullopt;
  ParallelResult out;
  out.result = std::move(*slot);
  out.winner = winner;
  out.elapsed_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  out.attempts_total = attempts_total.load(std::memory_order_relaxed);
  return out;
}

}  // namespace ltgen
