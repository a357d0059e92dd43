#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "revoq/perm.hpp"
#include "revoq/revenc.hpp"
#include "revoq/rng.hpp"
#include "revoq/stats.hpp"

namespace revoq {

/// Single-round sponge: hash = first r bits of phi(x || IV). Block layout:
/// index = (x << c) | IV, so the rate half occupies the high bits.
struct SpongeParams {
    int rate;      // r
    int capacity;  // c
    uint64_t table_size;
    PermBackend backend = PermBackend::kExplicit;

    SpongeParams(int rate, int capacity, uint64_t table_size,
                 PermBackend backend = PermBackend::kExplicit);

    int block_bits() const { return rate + capacity; }
};

uint64_t sponge_hash(const Permutation& perm, uint64_t iv, uint64_t x, const SpongeParams& p);

struct HashTable {
    uint64_t iv;
    std::vector<uint64_t> inputs;  // challenger-side, distinct
    std::vector<uint64_t> hashes;
};

HashTable build_table(const Permutation& perm, const SpongeParams& p, SplitRng& rng);

/// Exact image of the sponge over its whole r-bit domain, by enumeration.
std::vector<bool> sponge_range(const Permutation& perm, uint64_t iv, const SpongeParams& p);

/// Counted range-membership predicate. The explicit backend answers from the
/// precomputed image; the keyed backend enumerates the 2^c fiber through the
/// inverse permutation per query.
class ValidOracle {
public:
    ValidOracle(std::shared_ptr<const Permutation> perm, uint64_t iv, const SpongeParams& p);

    bool query(uint64_t h);

    uint64_t queries() const { return queries_; }
    void reset() { queries_ = 0; }

private:
    std::shared_ptr<const Permutation> perm_;
    uint64_t iv_;
    SpongeParams params_;
    std::vector<bool> range_;  // explicit backend only
    bool use_range_;
    uint64_t queries_ = 0;
};

enum class SpongeStrategy { kRandomGuess, kInverseProbe, kTableExtend };

SpongeStrategy sponge_strategy_from_string(const std::string& name);
std::string to_string(SpongeStrategy s);

struct AttackReport {
    SuccessEstimate estimate;
    double mean_inverse_queries = 0.0;
    double mean_valid_queries = 0.0;
    double bound = 0.0;  // bound_eval at the same (params, T)
    // E[|range \ table|] / 2^r over the sampled instances: the exact win rate
    // of the zero-query uniform guess, from the challenger's enumeration.
    double mean_fresh_fraction = 0.0;
};

/// One game per trial: sample permutation, salt, table; run the strategy with
/// at most `query_budget` counted oracle queries; win when the output
/// validates and differs from every table hash. Queries beyond the budget
/// throw BudgetExceeded and void the trial.
AttackReport run_attack(const SpongeParams& params, SpongeStrategy strategy,
                        uint64_t query_budget, uint64_t trials, SplitRng& rng,
                        bool allow_forward = false);

/// Four-term trade-off envelope with all O-constants set to `scale`:
/// scale * (T*sqrt((2^r-S)/2^{r+c}) + sqrt((2^r-S)/2^r)
///          + T^3/(2^{r+c}-2^r) + T^3/2^r).
double bound_eval(const SpongeParams& params, uint64_t queries, double scale = 1.0);

enum class ClassicalStrategy { kRandomGuess, kScan };

ClassicalStrategy classical_strategy_from_string(const std::string& name);

struct ClassicalUnforgeParams {
    int n;
    uint64_t s;  // |S|
    uint64_t k;  // given distinct elements

    ClassicalUnforgeParams(int n, uint64_t s, uint64_t k);
};

/// Classical k -> k+1 experiment: S random of size s, the adversary sees k
/// distinct elements of S plus a counted membership oracle, and must output a
/// fresh element of S.
SuccessEstimate run_classical_unforgeability(const ClassicalUnforgeParams& params,
                                             ClassicalStrategy strategy, uint64_t query_budget,
                                             uint64_t trials, SplitRng& rng);

}  // namespace revoq
