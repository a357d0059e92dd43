#include "revoq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "revoq/errors.hpp"
#include "revoq/hash.hpp"

namespace revoq {

std::string GameTranscript::canonical_json() const {
    std::ostringstream out;
    out.precision(17);
    out << "{\"seed\":" << seed << ",\"experiment\":\"" << experiment << "\",\"strategy\":\""
        << strategy << "\",\"params\":{";
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) out << ",";
        first = false;
        out << "\"" << k << "\":\"" << v << "\"";
    }
    out << "},\"queries\":{";
    first = true;
    for (const auto& [k, v] : queries) {
        if (!first) out << ",";
        first = false;
        out << "\"" << k << "\":" << v;
    }
    out << "},\"revoked\":" << revoked << ",\"output\":\"" << output
        << "\",\"win\":" << (win ? "true" : "false") << "}";
    return out.str();
}

void TranscriptLog::add(GameTranscript t) {
    const std::string line = t.canonical_json();
    for (unsigned char c : line) {
        digest_ ^= c;
        digest_ *= 0x100000001b3ULL;
    }
    if (keep_) items_.push_back(std::move(t));
}

SuccessEstimate estimate_from_transcripts(const std::vector<GameTranscript>& ts, double z) {
    uint64_t wins = 0;
    for (const auto& t : ts) wins += t.win ? 1 : 0;
    return wilson_estimate(wins, ts.size(), z);
}

// ---------------------------------------------------------------------------
// Unforgeability
// ---------------------------------------------------------------------------

UnforgeParams::UnforgeParams(int n_in, uint64_t s_in, int k_in, uint64_t budget)
    : n(n_in), s(s_in), k(k_in), query_budget(budget) {
    if (n < 1 || n > 24) throw BadParameter("UnforgeParams: n outside [1, 24]");
    if (s < 1 || s > (uint64_t{1} << n)) throw BadParameter("UnforgeParams: s out of range");
    if (k < 1) throw BadParameter("UnforgeParams: k must be >= 1");
}

UnforgeStrategy unforge_strategy_from_string(const std::string& name) {
    if (name == "measure-then-guess") return UnforgeStrategy::kMeasureThenGuess;
    if (name == "membership-scan") return UnforgeStrategy::kMembershipScan;
    throw BadParameter("unforge strategy: unknown '" + name + "'");
}

std::string to_string(UnforgeStrategy s) {
    return s == UnforgeStrategy::kMeasureThenGuess ? "measure-then-guess" : "membership-scan";
}

UnforgeReport run_unforgeability(const UnforgeParams& params, UnforgeStrategy strategy,
                                 uint64_t trials, SplitRng& rng, bool keep_transcripts) {
    if (trials == 0) throw BadParameter("run_unforgeability: trials must be positive");
    const uint64_t domain = uint64_t{1} << params.n;
    TranscriptLog log(keep_transcripts);
    uint64_t wins = 0;
    uint64_t total_queries = 0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        const SubsetState subset(params.n, trng.distinct_sorted(domain, params.s));
        MembershipOracle oracle([&subset](uint64_t x) { return subset.contains(x); });

        std::vector<uint64_t> answer;
        switch (strategy) {
            case UnforgeStrategy::kMeasureThenGuess: {
                answer = measure_subset_copies(subset, params.k, trng);
                std::unordered_set<uint64_t> seen(answer.begin(), answer.end());
                if (seen.size() < domain) {
                    uint64_t guess;
                    do {
                        guess = trng.bits(params.n);
                    } while (seen.contains(guess));
                    answer.push_back(guess);
                } else {
                    answer.push_back(answer.front());  // forced loss
                }
                break;
            }
            case UnforgeStrategy::kMembershipScan: {
                // Learn S by scanning, then output k+1 members.
                for (uint64_t x = 0; x < domain && oracle.queries() < params.query_budget; ++x) {
                    if (oracle(x)) answer.push_back(x);
                    if (answer.size() == static_cast<size_t>(params.k) + 1) break;
                }
                while (answer.size() < static_cast<size_t>(params.k) + 1) {
                    answer.push_back(trng.bits(params.n));
                }
                break;
            }
        }

        // Challenger-side predicate: k+1 pairwise distinct elements of S.
        std::unordered_set<uint64_t> distinct(answer.begin(), answer.end());
        bool win = distinct.size() == answer.size();
        if (win) {
            for (uint64_t v : answer) win = win && subset.contains(v);
        }
        wins += win ? 1 : 0;
        total_queries += oracle.queries();

        GameTranscript t;
        t.seed = trng.seed();
        t.experiment = "unforge";
        t.strategy = to_string(strategy);
        t.params = {{"n", std::to_string(params.n)},
                    {"s", std::to_string(params.s)},
                    {"k", std::to_string(params.k)}};
        t.queries = {{"membership", oracle.queries()}};
        std::ostringstream out;
        for (size_t i = 0; i < answer.size(); ++i) out << (i ? " " : "") << answer[i];
        t.output = out.str();
        t.win = win;
        log.add(std::move(t));
    }

    UnforgeReport report;
    report.estimate = wilson_estimate(wins, trials);
    report.mean_queries = static_cast<double>(total_queries) / trials;
    report.digest = log.digest();
    report.transcripts = log.items();
    return report;
}

double measure_then_guess_win_prob(const UnforgeParams& params) {
    const double s = static_cast<double>(params.s);
    const double domain = std::pow(2.0, params.n);
    if (params.k >= static_cast<int>(params.s)) return 0.0;
    double p_distinct = 1.0;
    for (int i = 0; i < params.k; ++i) p_distinct *= (s - i) / s;
    return p_distinct * (s - params.k) / (domain - params.k);
}

double measure_then_guess_win_prob_exhaustive(int n, uint64_t s, int k) {
    const uint64_t domain = uint64_t{1} << n;
    if (n > 4 || k > 2) throw BudgetExceeded("exhaustive oracle limited to micro instances");
    // Average over every subset, every measured tuple (iid uniform over S)
    // and every guess (uniform over the domain minus the measured values).
    double total = 0.0;
    uint64_t n_subsets = 0;
    std::vector<int> ties;
    for (const auto& comb : combinations(static_cast<int>(domain), static_cast<int>(s))) {
        ++n_subsets;
        std::vector<uint64_t> subset(comb.begin(), comb.end());
        std::unordered_set<uint64_t> member(subset.begin(), subset.end());
        // Enumerate measured tuples by odometer.
        std::vector<size_t> idx(k, 0);
        double subtotal = 0.0;
        uint64_t tuples = 0;
        while (true) {
            ++tuples;
            std::unordered_set<uint64_t> seen;
            for (int i = 0; i < k; ++i) seen.insert(subset[idx[i]]);
            if (seen.size() == static_cast<size_t>(k)) {
                uint64_t fresh_in_s = 0;
                for (uint64_t v : subset) {
                    if (!seen.contains(v)) ++fresh_in_s;
                }
                subtotal += static_cast<double>(fresh_in_s) /
                            static_cast<double>(domain - seen.size());
            }
            int pos = k - 1;
            while (pos >= 0 && ++idx[pos] == subset.size()) idx[pos--] = 0;
            if (pos < 0) break;
        }
        total += subtotal / static_cast<double>(tuples);
    }
    return total / static_cast<double>(n_subsets);
}

// ---------------------------------------------------------------------------
// O2H extractor
// ---------------------------------------------------------------------------

O2HResult o2h_extract(const std::function<void(FunctionOracle&)>& post_phase,
                      FunctionOracle& oracle, SplitRng& rng) {
    std::vector<uint64_t> recorded;
    FunctionOracle recording([&](uint64_t x) {
        recorded.push_back(x);
        return oracle(x);
    });
    post_phase(recording);
    if (recorded.empty()) throw NoQueries("o2h_extract: the phase made no oracle queries");
    const uint64_t i = rng.below(recorded.size());
    return O2HResult{i, recorded[i], recorded.size()};
}

// ---------------------------------------------------------------------------
// Forge pipeline
// ---------------------------------------------------------------------------

ForgeParams::ForgeParams(int n_in, int m_in, int k_in) : n(n_in), m(m_in), k(k_in) {
    if (n < 1 || m < 1 || k < 1) throw BadParameter("ForgeParams: n, m, k must be >= 1");
    if (n + m > 24) throw BadParameter("ForgeParams: n+m outside [2, 24]");
}

ForgeAdversary forge_adversary_from_string(const std::string& name) {
    if (name == "honest-full-scan") return ForgeAdversary::kHonestFullScan;
    if (name == "honest-null-post") return ForgeAdversary::kHonestNullPost;
    throw BadParameter("forge adversary: unknown '" + name + "'");
}

std::string to_string(ForgeAdversary a) {
    return a == ForgeAdversary::kHonestFullScan ? "honest-full-scan" : "honest-null-post";
}

ForgeOutcome forge_once(const ForgeParams& params, ForgeAdversary adversary, SplitRng& rng) {
    const int width = params.n + params.m;
    const uint64_t domain = uint64_t{1} << width;
    const uint64_t s_size = uint64_t{1} << params.n;

    const SubsetState subset(width, rng.distinct_sorted(domain, s_size));
    MembershipOracle membership([&subset](uint64_t x) { return subset.contains(x); });

    rng.bits(params.m);  // y: unused by the honest pre phase, drawn for parity
    const uint64_t u = rng.bits(params.m);

    // Honest pre phase returns the copies untouched; Forge measures them.
    ForgeOutcome outcome;
    outcome.elements = measure_subset_copies(subset, params.k, rng);

    // G(x) = g1(x) || u when x is in S, g2(x) otherwise, with g1, g2 lazily
    // sampled random functions.
    SplitRng g1_rng = rng.split(0x6731);
    SplitRng g2_rng = rng.split(0x6732);
    std::unordered_map<uint64_t, uint64_t> g1, g2;
    FunctionOracle g([&](uint64_t x) -> uint64_t {
        if (membership(x)) {
            auto it = g1.find(x);
            if (it == g1.end()) it = g1.emplace(x, g1_rng.bits(params.n)).first;
            return (it->second << params.m) | u;
        }
        auto it = g2.find(x);
        if (it == g2.end()) it = g2.emplace(x, g2_rng.bits(width)).first;
        return it->second;
    });

    auto post_phase = [&](FunctionOracle& oracle) {
        if (adversary == ForgeAdversary::kHonestFullScan) {
            for (uint64_t x = 0; x < domain; ++x) oracle(x);
        }
    };
    try {
        const O2HResult ext = o2h_extract(post_phase, g, rng);
        outcome.elements.push_back(ext.value);
    } catch (const NoQueries&) {
        outcome.extractor_failed = true;
        outcome.oracle_queries = membership.queries();
        return outcome;
    }

    std::unordered_set<uint64_t> distinct(outcome.elements.begin(), outcome.elements.end());
    outcome.win = distinct.size() == outcome.elements.size();
    if (outcome.win) {
        for (uint64_t v : outcome.elements) outcome.win = outcome.win && subset.contains(v);
    }
    outcome.oracle_queries = membership.queries();
    return outcome;
}

ForgeReport run_forge(const ForgeParams& params, ForgeAdversary adversary, uint64_t trials,
                      SplitRng& rng, bool keep_transcripts) {
    if (trials == 0) throw BadParameter("run_forge: trials must be positive");
    TranscriptLog log(keep_transcripts);
    uint64_t wins = 0;
    uint64_t failures = 0;
    uint64_t total_queries = 0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        const ForgeOutcome outcome = forge_once(params, adversary, trng);
        wins += outcome.win ? 1 : 0;
        failures += outcome.extractor_failed ? 1 : 0;
        total_queries += outcome.oracle_queries;

        GameTranscript t;
        t.seed = trng.seed();
        t.experiment = "forge";
        t.strategy = to_string(adversary);
        t.params = {{"n", std::to_string(params.n)},
                    {"m", std::to_string(params.m)},
                    {"k", std::to_string(params.k)}};
        t.queries = {{"membership", outcome.oracle_queries}};
        std::ostringstream out;
        for (size_t i = 0; i < outcome.elements.size(); ++i) {
            out << (i ? " " : "") << outcome.elements[i];
        }
        if (outcome.extractor_failed) out << (outcome.elements.empty() ? "" : " ") << "ext-fail";
        t.output = out.str();
        t.win = outcome.win;
        log.add(std::move(t));
    }

    ForgeReport report;
    report.estimate = wilson_estimate(wins, trials);
    report.mean_queries = static_cast<double>(total_queries) / trials;
    report.extractor_failures = failures;
    report.digest = log.digest();
    report.transcripts = log.items();
    return report;
}

double forge_full_scan_win_prob(const ForgeParams& params) {
    const double s = std::pow(2.0, params.n);
    const double domain = std::pow(2.0, params.n + params.m);
    double p_distinct = 1.0;
    for (int i = 0; i < params.k; ++i) p_distinct *= (s - i) / s;
    return p_distinct * (s - params.k) / domain;
}

}  // namespace revoq
