#pragma once

#include <cstdint>
#include <vector>

namespace revoq {

/// Seeded, splittable PRNG (xoshiro256** core, splitmix64 seeding).
///
/// Every probabilistic operation in the library takes one of these by
/// reference. Children derived via split() depend only on the parent's seed
/// and the stream id, never on how many values the parent has drawn, so
/// trials keyed by split(trial_index) are reproducible and order independent.
class SplitRng {
public:
    explicit SplitRng(uint64_t seed);

    uint64_t seed() const { return seed_; }

    uint64_t next_u64();

    /// Uniform double in [0, 1).
    double next_double();

    /// Uniform integer in [0, bound). Rejection sampled, exact for any bound.
    uint64_t below(uint64_t bound);

    bool bernoulli(double p);

    /// Uniform w-bit string, w <= 64.
    uint64_t bits(int w);

    /// Child generator for an independent stream.
    SplitRng split(uint64_t stream) const;

    std::vector<uint8_t> bytes(size_t count);

    /// Sample `count` distinct values from [0, domain), sorted ascending.
    std::vector<uint64_t> distinct_sorted(uint64_t domain, uint64_t count);

private:
    uint64_t seed_;
    uint64_t state_[4];
};

}  // namespace revoq
