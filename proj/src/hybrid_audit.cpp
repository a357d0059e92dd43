#include <algorithm>
#include <cmath>

#include "revoq/errors.hpp"
#include "revoq/harness.hpp"

namespace revoq {

HybridPair hybrid_pair_from_string(const std::string& name) {
    if (name == "lemma-subset-order") return HybridPair::kLemmaSubsetOrder;
    if (name == "lemma-flood-oracle") return HybridPair::kLemmaFloodOracle;
    if (name == "lemma-state-swap") return HybridPair::kLemmaStateSwap;
    if (name == "lemma-oracle-shrink") return HybridPair::kLemmaOracleShrink;
    if (name == "revenc-resample") return HybridPair::kRevEncResample;
    throw BadParameter("hybrid pair: unknown '" + name + "'");
}

std::string to_string(HybridPair p) {
    switch (p) {
        case HybridPair::kLemmaSubsetOrder: return "lemma-subset-order";
        case HybridPair::kLemmaFloodOracle: return "lemma-flood-oracle";
        case HybridPair::kLemmaStateSwap: return "lemma-state-swap";
        case HybridPair::kLemmaOracleShrink: return "lemma-oracle-shrink";
        case HybridPair::kRevEncResample: return "revenc-resample";
    }
    return "?";
}

HybridAuditParams::HybridAuditParams(int n_in, uint64_t s_in, uint64_t t_in, int k_in,
                                     uint64_t queries_in, int m_in)
    : n(n_in), s(s_in), t(t_in), k(k_in), queries(queries_in), m(m_in) {
    if (n < 1 || n > 24) throw BadParameter("HybridAuditParams: n outside [1, 24]");
    if (s < 1 || t < s || t > (uint64_t{1} << n)) throw BadParameter("HybridAuditParams: need 1 <= s <= t <= 2^n");
    if (k < 1) throw BadParameter("HybridAuditParams: k must be >= 1");
    if (static_cast<uint64_t>(k) > s) throw BadParameter("HybridAuditParams: k must be <= s");
}

namespace {

/// Fixed canonical distinguisher shared by every lemma hybrid: measure the
/// copies, probe q random points through the membership oracle, output 1 when
/// a probe hits or the measured values collide.
bool lemma_distinguisher(const std::vector<uint64_t>& measured, MembershipOracle& oracle,
                         int n, uint64_t probes, SplitRng& rng) {
    bool repeat = false;
    for (size_t i = 0; i < measured.size() && !repeat; ++i) {
        for (size_t j = i + 1; j < measured.size(); ++j) {
            repeat = repeat || measured[i] == measured[j];
        }
    }
    bool hit = false;
    for (uint64_t q = 0; q < probes; ++q) {
        const uint64_t x = rng.bits(n);
        const bool member = oracle(x);
        hit = hit || member;
    }
    return hit || repeat;
}

/// Measured values of |sigma_X>: the distinct elements in random order.
std::vector<uint64_t> measure_tuple_state(std::vector<uint64_t> x, SplitRng& rng) {
    for (size_t i = x.size(); i > 1; --i) {
        std::swap(x[i - 1], x[rng.below(i)]);
    }
    return x;
}

enum class LemmaWorld {
    kDirectSubset,      // H1: S direct, oracle S
    kViaSuperset,       // H2: S via T, oracle S
    kFloodedOracle,     // H3: S via T, oracle T
    kTupleState,        // H4: sigma_X via T, oracle T
    kTupleOracle,       // H5: sigma_X via T, oracle X
};

bool run_lemma_world(LemmaWorld world, const HybridAuditParams& p, SplitRng& rng) {
    const uint64_t domain = uint64_t{1} << p.n;
    std::vector<uint64_t> superset;
    std::vector<uint64_t> subset;

    switch (world) {
        case LemmaWorld::kDirectSubset:
            subset = rng.distinct_sorted(domain, p.s);
            break;
        case LemmaWorld::kViaSuperset:
        case LemmaWorld::kFloodedOracle: {
            superset = rng.distinct_sorted(domain, p.t);
            auto idx = rng.distinct_sorted(p.t, p.s);
            subset.reserve(p.s);
            for (uint64_t i : idx) subset.push_back(superset[i]);
            break;
        }
        case LemmaWorld::kTupleState:
        case LemmaWorld::kTupleOracle: {
            superset = rng.distinct_sorted(domain, p.t);
            auto idx = rng.distinct_sorted(p.t, p.k);
            subset.reserve(p.k);
            for (uint64_t i : idx) subset.push_back(superset[i]);
            break;
        }
    }
    std::sort(subset.begin(), subset.end());

    std::vector<uint64_t> measured;
    if (world == LemmaWorld::kTupleState || world == LemmaWorld::kTupleOracle) {
        measured = measure_tuple_state(subset, rng);
    } else {
        const SubsetState state(p.n, subset);
        measured = measure_subset_copies(state, p.k, rng);
    }

    const std::vector<uint64_t>* oracle_set = &subset;
    if (world == LemmaWorld::kFloodedOracle || world == LemmaWorld::kTupleState) {
        oracle_set = &superset;
    }
    std::vector<uint64_t> sorted_oracle = *oracle_set;
    std::sort(sorted_oracle.begin(), sorted_oracle.end());
    MembershipOracle oracle([&sorted_oracle](uint64_t x) {
        return std::binary_search(sorted_oracle.begin(), sorted_oracle.end(), x);
    });
    return lemma_distinguisher(measured, oracle, p.n, p.queries, rng);
}

/// Revocable-encryption resampling pair: the permutation world draws phi and
/// exposes phi^{-1}; the subset-first world draws S directly and exposes a
/// random permutation constrained to map S onto (* || y).
bool run_revenc_world(bool subset_first, const HybridAuditParams& p, SplitRng& rng) {
    const int width = p.n + p.m;
    if (width > 20) throw DimensionTooLarge("revenc hybrid: n+m exceeds 20");
    const uint64_t m_mask = (uint64_t{1} << p.m) - 1;
    const uint64_t y = rng.bits(p.m);

    std::vector<uint64_t> support;
    std::vector<uint32_t> oracle_table(uint64_t{1} << width);

    if (!subset_first) {
        const ExplicitPerm phi = sample_random_perm(width, rng);
        support.reserve(uint64_t{1} << p.n);
        for (uint64_t x = 0; x < (uint64_t{1} << p.n); ++x) {
            support.push_back(phi.forward((x << p.m) | y));
        }
        for (uint64_t i = 0; i < oracle_table.size(); ++i) {
            oracle_table[i] = static_cast<uint32_t>(phi.inverse(i));
        }
    } else {
        support = rng.distinct_sorted(uint64_t{1} << width, uint64_t{1} << p.n);
        // pi(s) = * || y on S, bijective on the complement.
        std::vector<uint64_t> targets;
        targets.reserve(support.size());
        for (uint64_t x = 0; x < (uint64_t{1} << p.n); ++x) targets.push_back((x << p.m) | y);
        std::vector<uint64_t> shuffled_targets = measure_tuple_state(targets, rng);
        std::vector<bool> in_support(oracle_table.size(), false);
        std::vector<bool> target_used(oracle_table.size(), false);
        for (size_t i = 0; i < support.size(); ++i) {
            oracle_table[support[i]] = static_cast<uint32_t>(shuffled_targets[i]);
            in_support[support[i]] = true;
            target_used[shuffled_targets[i]] = true;
        }
        std::vector<uint64_t> rest_domain, rest_range;
        for (uint64_t i = 0; i < oracle_table.size(); ++i) {
            if (!in_support[i]) rest_domain.push_back(i);
            if (!target_used[i]) rest_range.push_back(i);
        }
        rest_range = measure_tuple_state(rest_range, rng);
        for (size_t i = 0; i < rest_domain.size(); ++i) {
            oracle_table[rest_domain[i]] = static_cast<uint32_t>(rest_range[i]);
        }
    }
    std::sort(support.begin(), support.end());

    FunctionOracle oracle([&oracle_table](uint64_t x) { return uint64_t{oracle_table[x]}; });

    // Canonical distinguisher: decrypt a measured support element through the
    // oracle, then test whether a random point's image shares its pad bits.
    const SubsetState state(width, support);
    const uint64_t z = measure_subset_copies(state, 1, rng)[0];
    const uint64_t y_obs = oracle(z) & m_mask;
    bool out = false;
    for (uint64_t q = 1; q < std::max<uint64_t>(p.queries, 1); ++q) {
        const uint64_t r = rng.bits(width);
        out = out || (oracle(r) & m_mask) == y_obs;
    }
    return out;
}

}  // namespace

HybridAuditRow audit_hybrid_pair(HybridPair pair, const HybridAuditParams& params,
                                 uint64_t trials, SplitRng& rng) {
    if (trials == 0) throw BadParameter("audit_hybrid_pair: trials must be positive");
    uint64_t wins_left = 0;
    uint64_t wins_right = 0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng left_rng = rng.split(2 * trial);
        SplitRng right_rng = rng.split(2 * trial + 1);
        bool left = false;
        bool right = false;
        switch (pair) {
            case HybridPair::kLemmaSubsetOrder:
                left = run_lemma_world(LemmaWorld::kDirectSubset, params, left_rng);
                right = run_lemma_world(LemmaWorld::kViaSuperset, params, right_rng);
                break;
            case HybridPair::kLemmaFloodOracle:
                left = run_lemma_world(LemmaWorld::kViaSuperset, params, left_rng);
                right = run_lemma_world(LemmaWorld::kFloodedOracle, params, right_rng);
                break;
            case HybridPair::kLemmaStateSwap:
                left = run_lemma_world(LemmaWorld::kFloodedOracle, params, left_rng);
                right = run_lemma_world(LemmaWorld::kTupleState, params, right_rng);
                break;
            case HybridPair::kLemmaOracleShrink:
                left = run_lemma_world(LemmaWorld::kTupleState, params, left_rng);
                right = run_lemma_world(LemmaWorld::kTupleOracle, params, right_rng);
                break;
            case HybridPair::kRevEncResample:
                left = run_revenc_world(false, params, left_rng);
                right = run_revenc_world(true, params, right_rng);
                break;
        }
        wins_left += left ? 1 : 0;
        wins_right += right ? 1 : 0;
    }

    HybridAuditRow row;
    row.pair = to_string(pair);
    row.p_left = wilson_estimate(wins_left, trials);
    row.p_right = wilson_estimate(wins_right, trials);
    row.advantage = std::abs(row.p_left.p_hat - row.p_right.p_hat);
    const double n = static_cast<double>(trials);
    const double se = std::sqrt(row.p_left.p_hat * (1.0 - row.p_left.p_hat) / n +
                                row.p_right.p_hat * (1.0 - row.p_right.p_hat) / n);
    row.gate = 3.0 * se + 2.0 / n;

    const double domain = std::pow(2.0, params.n);
    const double q = static_cast<double>(params.queries);
    switch (pair) {
        case HybridPair::kLemmaSubsetOrder:
        case HybridPair::kRevEncResample:
            row.envelope = 0.0;
            row.identical_distribution = true;
            break;
        case HybridPair::kLemmaFloodOracle:
            row.envelope = std::min(1.0, q * std::sqrt((params.t - params.s) / domain));
            break;
        case HybridPair::kLemmaStateSwap:
            row.envelope = std::min(
                1.0, params.k / std::sqrt(static_cast<double>(params.s)) +
                         static_cast<double>(params.s) * params.k / static_cast<double>(params.t));
            break;
        case HybridPair::kLemmaOracleShrink:
            row.envelope = std::min(1.0, q * std::sqrt((params.t - params.k) / domain));
            break;
    }
    return row;
}

std::vector<HybridAuditRow> hybrid_swap_audit(const HybridAuditParams& params, uint64_t trials,
                                              SplitRng& rng) {
    std::vector<HybridAuditRow> rows;
    int stream = 0;
    for (HybridPair pair : {HybridPair::kLemmaSubsetOrder, HybridPair::kLemmaFloodOracle,
                            HybridPair::kLemmaStateSwap, HybridPair::kLemmaOracleShrink,
                            HybridPair::kRevEncResample}) {
        SplitRng prng = rng.split(stream++);
        rows.push_back(audit_hybrid_pair(pair, params, trials, prng));
    }
    return rows;
}

}  // namespace revoq
