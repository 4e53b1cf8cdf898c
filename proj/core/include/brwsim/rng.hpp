#pragma once

#include <cstdint>

#include "brwsim/normal.hpp"

namespace brwsim {

/// Counter-based random stream.  The k-th value is a pure function of
/// (master_seed, shard_index, k), so streams are value-like: cloneable,
/// skippable, and safe to hand to any worker.  Two workers must never share
/// one stream object; give each its own shard index instead.
///
/// Gaussian draws go through the inverse CDF, so every draw consumes exactly
/// one position regardless of the value produced.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t shard_index = 0)
        : seed_(master_seed), shard_(shard_index) {
        key_ = mix(mix(master_seed) ^ (shard_index + 0x9e3779b97f4a7c15ULL));
    }

    /// Uniform on the open interval (0,1), 53-bit resolution.
    double next_uniform() { return to_unit(value_at(pos_++)); }

    /// Standard normal variate; advances the position by one.
    double next_gaussian() { return inverse_normal_cdf(next_uniform()); }

    void skip(std::uint64_t count) { pos_ += count; }

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t shard_index() const { return shard_; }
    std::uint64_t position() const { return pos_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t value_at(std::uint64_t pos) const {
        return mix(key_ + pos * 0x9e3779b97f4a7c15ULL);
    }
    static double to_unit(std::uint64_t v) {
        return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::uint64_t shard_;
    std::uint64_t pos_ = 0;
    std::uint64_t key_;
};

}  // namespace brwsim
