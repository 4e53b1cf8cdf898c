#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "brwsim/rng.hpp"

namespace brwsim {

/// Deterministic sharded execution.  Shard k owns RngStream(seed, k) and
/// processes samples/shards draws (+1 for the first samples % shards
/// shards).  Workers pull shard indices from a queue, so scheduling never
/// touches the streams; callers fold the per-shard results in index order
/// to keep reductions bit-stable.
template <class Acc, class Fn>
std::vector<Acc> run_sharded(std::int64_t samples, int shards, std::uint64_t seed, Fn&& fn) {
    if (shards < 1) throw std::invalid_argument("run_sharded: shards must be >= 1");
    if (samples < 0) throw std::invalid_argument("run_sharded: samples must be >= 0");

    const std::int64_t base = samples / shards;
    const std::int64_t rem = samples % shards;

    std::vector<Acc> results(static_cast<std::size_t>(shards));
    unsigned hw = std::thread::hardware_concurrency();
    const int workers = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(shards), hw ? hw : 1));

    std::atomic<int> next{0};
    auto drain = [&] {
        for (int k = next.fetch_add(1); k < shards; k = next.fetch_add(1)) {
            RngStream stream(seed, static_cast<std::uint64_t>(k));
            const std::int64_t count = base + (k < rem ? 1 : 0);
            results[static_cast<std::size_t>(k)] = fn(k, count, stream);
        }
    };

    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
    }
    return results;
}

}  // namespace brwsim
