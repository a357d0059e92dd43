#include "revoq/sponge.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "revoq/errors.hpp"

namespace revoq {

SpongeParams::SpongeParams(int rate_in, int capacity_in, uint64_t table_size_in,
                           PermBackend backend_in)
    : rate(rate_in), capacity(capacity_in), table_size(table_size_in), backend(backend_in) {
    if (rate < 1 || capacity < 1) throw BadParameter("SpongeParams: rate and capacity must be >= 1");
    const int limit = backend == PermBackend::kExplicit ? 20 : 64;
    if (rate + capacity > limit) throw DimensionTooLarge("SpongeParams: block width exceeds backend limit");
    if (table_size > (uint64_t{1} << rate)) throw BadParameter("SpongeParams: table larger than domain");
}

uint64_t sponge_hash(const Permutation& perm, uint64_t iv, uint64_t x, const SpongeParams& p) {
    if (perm.width() != p.block_bits()) throw DimensionMismatch("sponge_hash: widths differ");
    return perm.forward((x << p.capacity) | iv) >> p.capacity;
}

HashTable build_table(const Permutation& perm, const SpongeParams& p, SplitRng& rng) {
    HashTable t;
    t.iv = rng.bits(p.capacity);
    t.inputs = rng.distinct_sorted(uint64_t{1} << p.rate, p.table_size);
    t.hashes.reserve(t.inputs.size());
    for (uint64_t x : t.inputs) t.hashes.push_back(sponge_hash(perm, t.iv, x, p));
    return t;
}

std::vector<bool> sponge_range(const Permutation& perm, uint64_t iv, const SpongeParams& p) {
    std::vector<bool> in_range(uint64_t{1} << p.rate, false);
    for (uint64_t x = 0; x < (uint64_t{1} << p.rate); ++x) {
        in_range[sponge_hash(perm, iv, x, p)] = true;
    }
    return in_range;
}

ValidOracle::ValidOracle(std::shared_ptr<const Permutation> perm, uint64_t iv,
                         const SpongeParams& p)
    : perm_(std::move(perm)), iv_(iv), params_(p) {
    use_range_ = p.backend == PermBackend::kExplicit;
    if (use_range_) range_ = sponge_range(*perm_, iv_, params_);
}

bool ValidOracle::query(uint64_t h) {
    ++queries_;
    if (h >= (uint64_t{1} << params_.rate)) throw BadParameter("ValidOracle: input out of range");
    if (use_range_) return range_[h];
    // Fiber walk through the inverse permutation: h is in the image iff some
    // suffix w has phi^{-1}(h || w) ending in the salt.
    for (uint64_t w = 0; w < (uint64_t{1} << params_.capacity); ++w) {
        const uint64_t pre = perm_->inverse((h << params_.capacity) | w);
        if ((pre & ((uint64_t{1} << params_.capacity) - 1)) == iv_) return true;
    }
    return false;
}

SpongeStrategy sponge_strategy_from_string(const std::string& name) {
    if (name == "random-guess") return SpongeStrategy::kRandomGuess;
    if (name == "inverse-probe") return SpongeStrategy::kInverseProbe;
    if (name == "table-extend") return SpongeStrategy::kTableExtend;
    throw BadParameter("sponge strategy: unknown '" + name + "'");
}

std::string to_string(SpongeStrategy s) {
    switch (s) {
        case SpongeStrategy::kRandomGuess: return "random-guess";
        case SpongeStrategy::kInverseProbe: return "inverse-probe";
        case SpongeStrategy::kTableExtend: return "table-extend";
    }
    return "?";
}

namespace {

struct QueryBudget {
    uint64_t limit;
    uint64_t used = 0;

    void spend() {
        if (used >= limit) throw BudgetExceeded("attack exceeded its query budget");
        ++used;
    }
};

}  // namespace

AttackReport run_attack(const SpongeParams& params, SpongeStrategy strategy,
                        uint64_t query_budget, uint64_t trials, SplitRng& rng,
                        bool allow_forward) {
    if (trials == 0) throw BadParameter("run_attack: trials must be positive");
    uint64_t wins = 0;
    uint64_t total_inverse = 0;
    uint64_t total_valid = 0;
    double fresh_sum = 0.0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        std::shared_ptr<const Permutation> perm;
        if (params.backend == PermBackend::kExplicit) {
            perm = std::make_shared<ExplicitPerm>(sample_random_perm(params.block_bits(), trng));
        } else {
            perm = std::make_shared<FeistelPerm>(PermKey::sample(params.block_bits(), trng));
        }
        const HashTable table = build_table(*perm, params, trng);
        std::unordered_set<uint64_t> known(table.hashes.begin(), table.hashes.end());

        CountedPerm inv_oracle(perm);
        ValidOracle valid(perm, table.iv, params);
        QueryBudget budget{query_budget};

        const uint64_t rate_dom = uint64_t{1} << params.rate;
        uint64_t guess = trng.bits(params.rate);

        switch (strategy) {
            case SpongeStrategy::kRandomGuess:
                break;  // zero queries, keep the uniform guess
            case SpongeStrategy::kInverseProbe: {
                // Probe phi^{-1} on random blocks; a preimage ending in the
                // salt certifies the rate half as a valid hash.
                while (budget.used < budget.limit) {
                    const uint64_t h = trng.bits(params.rate);
                    const uint64_t w = trng.bits(params.capacity);
                    budget.spend();
                    const uint64_t pre = inv_oracle.inverse((h << params.capacity) | w);
                    if ((pre & ((uint64_t{1} << params.capacity) - 1)) == table.iv &&
                        !known.contains(h)) {
                        guess = h;
                        break;
                    }
                }
                break;
            }
            case SpongeStrategy::kTableExtend: {
                // Test fresh candidates against the checking oracle until one
                // extends the table.
                uint64_t offset = trng.bits(params.rate);
                for (uint64_t step = 0; step < rate_dom && budget.used < budget.limit; ++step) {
                    const uint64_t h = (offset + step) & (rate_dom - 1);
                    if (known.contains(h)) continue;
                    budget.spend();
                    if (valid.query(h)) {
                        guess = h;
                        break;
                    }
                }
                break;
            }
        }
        if (allow_forward) {
            // Experimental mode outside the theorem: forward access grants a
            // win immediately by hashing a fresh input when one exists.
            for (uint64_t x = 0; x < rate_dom; ++x) {
                const uint64_t h = sponge_hash(*perm, table.iv, x, params);
                if (!known.contains(h)) {
                    guess = h;
                    break;
                }
            }
        }

        // Challenger-side win check, uncounted.
        const auto range = sponge_range(*perm, table.iv, params);
        if (range[guess] && !known.contains(guess)) ++wins;
        uint64_t fresh = 0;
        for (uint64_t h = 0; h < rate_dom; ++h) {
            if (range[h] && !known.contains(h)) ++fresh;
        }
        fresh_sum += static_cast<double>(fresh) / static_cast<double>(rate_dom);
        total_inverse += inv_oracle.queries();
        total_valid += valid.queries();
    }

    AttackReport report;
    report.estimate = wilson_estimate(wins, trials);
    report.mean_inverse_queries = static_cast<double>(total_inverse) / trials;
    report.mean_valid_queries = static_cast<double>(total_valid) / trials;
    report.bound = bound_eval(params, query_budget);
    report.mean_fresh_fraction = fresh_sum / static_cast<double>(trials);
    return report;
}

double bound_eval(const SpongeParams& params, uint64_t queries, double scale) {
    const double r_dom = std::pow(2.0, params.rate);
    const double block_dom = std::pow(2.0, params.block_bits());
    const double fresh = r_dom - static_cast<double>(params.table_size);
    const double t = static_cast<double>(queries);
    const double term1 = t * std::sqrt(fresh / block_dom);
    const double term2 = std::sqrt(fresh / r_dom);
    const double term3 = t * t * t / (block_dom - r_dom);
    const double term4 = t * t * t / r_dom;
    return scale * (term1 + term2 + term3 + term4);
}

ClassicalStrategy classical_strategy_from_string(const std::string& name) {
    if (name == "random-guess") return ClassicalStrategy::kRandomGuess;
    if (name == "scan") return ClassicalStrategy::kScan;
    throw BadParameter("classical strategy: unknown '" + name + "'");
}

ClassicalUnforgeParams::ClassicalUnforgeParams(int n_in, uint64_t s_in, uint64_t k_in)
    : n(n_in), s(s_in), k(k_in) {
    if (n < 1 || n > 30) throw BadParameter("ClassicalUnforgeParams: n outside [1, 30]");
    if (s < 1 || s > (uint64_t{1} << n)) throw BadParameter("ClassicalUnforgeParams: s out of range");
    if (k < 1 || k > s) throw BadParameter("ClassicalUnforgeParams: k outside [1, s]");
}

SuccessEstimate run_classical_unforgeability(const ClassicalUnforgeParams& params,
                                             ClassicalStrategy strategy, uint64_t query_budget,
                                             uint64_t trials, SplitRng& rng) {
    if (trials == 0) throw BadParameter("run_classical_unforgeability: trials must be positive");
    const uint64_t domain = uint64_t{1} << params.n;
    uint64_t wins = 0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        const std::vector<uint64_t> subset = trng.distinct_sorted(domain, params.s);
        std::unordered_set<uint64_t> member(subset.begin(), subset.end());

        // k distinct elements of S handed to the adversary.
        std::vector<uint64_t> given;
        {
            std::vector<uint64_t> idx = trng.distinct_sorted(params.s, params.k);
            given.reserve(params.k);
            for (uint64_t i : idx) given.push_back(subset[i]);
        }
        std::unordered_set<uint64_t> given_set(given.begin(), given.end());

        MembershipOracle oracle([&member](uint64_t x) { return member.contains(x); });
        uint64_t answer = 0;
        switch (strategy) {
            case ClassicalStrategy::kRandomGuess: {
                if (given_set.size() == domain) {
                    answer = given[0];  // nothing fresh exists, forced loss
                    break;
                }
                // Uniform over the domain minus the given elements.
                do {
                    answer = trng.bits(params.n);
                } while (given_set.contains(answer));
                break;
            }
            case ClassicalStrategy::kScan: {
                bool found = false;
                for (uint64_t x = 0; x < domain && oracle.queries() < query_budget; ++x) {
                    if (given_set.contains(x)) continue;
                    if (oracle(x)) {
                        answer = x;
                        found = true;
                        break;
                    }
                }
                if (!found) answer = trng.bits(params.n);
                break;
            }
        }
        if (member.contains(answer) && !given_set.contains(answer)) ++wins;
    }
    return wilson_estimate(wins, trials);
}

}  // namespace revoq
