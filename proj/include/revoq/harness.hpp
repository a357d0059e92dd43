#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "revoq/perm.hpp"
#include "revoq/pointfn.hpp"
#include "revoq/qstate.hpp"
#include "revoq/revenc.hpp"
#include "revoq/revprog.hpp"
#include "revoq/rng.hpp"
#include "revoq/stats.hpp"

namespace revoq {

/// One seeded security-game run. Canonical form excludes wall time, so the
/// digest of a run is reproducible byte for byte.
struct GameTranscript {
    uint64_t seed = 0;
    std::string experiment;
    std::string strategy;
    std::map<std::string, std::string> params;
    std::map<std::string, uint64_t> queries;  // per phase
    int revoked = -1;                         // -1 no revocation step, else 0/1
    std::string output;
    bool win = false;
    double wall_ms = 0.0;

    std::string canonical_json() const;
};

/// Order-sensitive digest over canonical transcript lines.
class TranscriptLog {
public:
    explicit TranscriptLog(bool keep) : keep_(keep) {}

    void add(GameTranscript t);

    uint64_t digest() const { return digest_; }
    const std::vector<GameTranscript>& items() const { return items_; }

private:
    bool keep_;
    uint64_t digest_ = 0xcbf29ce484222325ULL;
    std::vector<GameTranscript> items_;
};

SuccessEstimate estimate_from_transcripts(const std::vector<GameTranscript>& ts, double z = 1.96);

// ---------------------------------------------------------------------------
// k -> k+1 unforgeability (quantum-copy experiment)
// ---------------------------------------------------------------------------

struct UnforgeParams {
    int n;
    uint64_t s;
    int k;
    uint64_t query_budget;

    UnforgeParams(int n, uint64_t s, int k, uint64_t query_budget);
};

enum class UnforgeStrategy { kMeasureThenGuess, kMembershipScan };

UnforgeStrategy unforge_strategy_from_string(const std::string& name);
std::string to_string(UnforgeStrategy s);

struct UnforgeReport {
    SuccessEstimate estimate;
    double mean_queries = 0.0;
    uint64_t digest = 0;
    std::vector<GameTranscript> transcripts;
};

/// The adversary receives |S>^{(x)k} plus a counted membership oracle and
/// must output k+1 pairwise-distinct elements of S.
UnforgeReport run_unforgeability(const UnforgeParams& params, UnforgeStrategy strategy,
                                 uint64_t trials, SplitRng& rng, bool keep_transcripts = false);

/// Exact win rate of measure-then-guess: Pr[k measured values distinct] *
/// (s - k) / (2^n - k).
double measure_then_guess_win_prob(const UnforgeParams& params);

/// Brute-force oracle for the same rate: averages the win probability over
/// every size-s subset, every measured tuple and every guess. Feasible for
/// micro instances only.
double measure_then_guess_win_prob_exhaustive(int n, uint64_t s, int k);

// ---------------------------------------------------------------------------
// Revocation experiments
// ---------------------------------------------------------------------------

enum class Scheme { kRevEnc, kRevProg, kPointFn };

Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme s);

enum class RevokeStrategy {
    kHonestRandomGuess,  // return everything, guess blindly afterwards
    kKeepOneCopy,        // keep one copy, substitute a random basis state
    kOracleScan,         // revprog: honest return, evaluate via the public oracle
    kWrongKeyDecrypt,    // pointfn: keep one copy, decrypt with the challenge
    kTrivialGuess,       // programs: output the best classical guess
};

RevokeStrategy revoke_strategy_from_string(const std::string& name);
std::string to_string(RevokeStrategy s);

struct RevokeExptParams {
    RevEncParams base;
    // pointfn only:
    std::optional<PfParams> pf;
    // challenge distribution for program games: weight on the marked input
    // (1.0 = always the marked input); negative means uniform.
    double marked_challenge_weight = -1.0;

    explicit RevokeExptParams(RevEncParams base) : base(base) {}
};

struct RevokeExptReport {
    std::string scheme;
    std::string strategy;
    uint64_t trials = 0;
    SuccessEstimate acceptance;
    SuccessEstimate win_overall;
    std::optional<SuccessEstimate> win_given_accept;
    std::optional<SuccessEstimate> win_given_reject;
    // revenc distinguishing game: output-symbol frequencies per branch and
    // the max-over-symbols gap.
    std::map<std::string, double> symbol_freq_b0;
    std::map<std::string, double> symbol_freq_b1;
    double advantage = 0.0;
    double p_triv = -1.0;  // program games
    double mean_queries_post = 0.0;
    double mean_accept_prob = 0.0;  // average exact acceptance amplitude
    // pointfn wrong-key bookkeeping (decrypt attempts with a key differing
    // from the marked input, and how many were falsely accepted).
    uint64_t wrong_key_attempts = 0;
    uint64_t wrong_key_accepts = 0;
    uint64_t digest = 0;
    std::vector<GameTranscript> transcripts;
};

RevokeExptReport run_revoke_expt(Scheme scheme, RevokeStrategy strategy,
                                 const RevokeExptParams& params, uint64_t trials, SplitRng& rng,
                                 bool keep_transcripts = false);

// ---------------------------------------------------------------------------
// One-way-to-hiding extractor
// ---------------------------------------------------------------------------

struct O2HResult {
    uint64_t query_index;  // uniformly chosen in [0, total_queries)
    uint64_t value;        // that query's measured input
    uint64_t total_queries;
};

/// Runs the post phase against a recording wrapper of `oracle`, picks a
/// uniformly random query index and returns that query's input. Throws
/// NoQueries when the phase never queried.
O2HResult o2h_extract(const std::function<void(FunctionOracle&)>& post_phase,
                      FunctionOracle& oracle, SplitRng& rng);

// ---------------------------------------------------------------------------
// Forge pipeline
// ---------------------------------------------------------------------------

struct ForgeParams {
    int n;  // |S| = 2^n
    int m;  // strings live in {0,1}^{n+m}
    int k;

    ForgeParams(int n, int m, int k);
};

enum class ForgeAdversary { kHonestFullScan, kHonestNullPost };

ForgeAdversary forge_adversary_from_string(const std::string& name);
std::string to_string(ForgeAdversary a);

struct ForgeOutcome {
    std::vector<uint64_t> elements;  // k+1 candidates
    bool win = false;
    bool extractor_failed = false;
    uint64_t oracle_queries = 0;
};

ForgeOutcome forge_once(const ForgeParams& params, ForgeAdversary adversary, SplitRng& rng);

struct ForgeReport {
    SuccessEstimate estimate;
    double mean_queries = 0.0;
    uint64_t extractor_failures = 0;
    uint64_t digest = 0;
    std::vector<GameTranscript> transcripts;
};

ForgeReport run_forge(const ForgeParams& params, ForgeAdversary adversary, uint64_t trials,
                      SplitRng& rng, bool keep_transcripts = false);

/// Analytic win rate of the honest full-scan adversary.
double forge_full_scan_win_prob(const ForgeParams& params);

// ---------------------------------------------------------------------------
// Simultaneous distinct extraction audit
// ---------------------------------------------------------------------------

struct DistinctExtractionParams {
    int width;                    // element bits; |S| drawn over {0,1}^width
    std::vector<uint64_t> subset;  // S
    int copies;                   // k
    int env_qubits;               // Y register
    int extra_qubits;             // E register (X' is `width` qubits)
    uint64_t instances;           // randomized audits on top of the closed form

    DistinctExtractionParams(int width, std::vector<uint64_t> subset, int copies, int env_qubits,
                             int extra_qubits, uint64_t instances);
};

struct DistinctExtractionCase {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // lhs - rhs
    double revoke_prob = 0.0;
    double extract_prob = 0.0;
    bool ok = false;
};

struct DistinctExtractionReport {
    DistinctExtractionCase closed_form;
    DistinctExtractionCase zero_overlap;  // revocation probability 0, rhs 0
    std::vector<DistinctExtractionCase> random_cases;
    double factor = 0.0;  // exact distinct-tuple fraction
    bool all_ok = false;
};

/// Checks Tr[Lambda rho] >= factor * Tr[P rho_X] * Tr[|S><S| E(sigma)] with
/// the exact combinatorial factor prod_{j=1..k} (|S|-j) / |S|^k, on the
/// closed-form instance and on Haar-random (rho, V) instances.
DistinctExtractionReport check_distinct_extraction(const DistinctExtractionParams& params,
                                                   SplitRng& rng);

/// Evaluate one explicit instance: rho over X (x) Y (dimension 2^{width*k} *
/// 2^{env_qubits}) and an isometry from Y into X' (x) E. Exposed so tests can
/// audit the audit with independently constructed operators.
DistinctExtractionCase check_distinct_extraction_instance(const DistinctExtractionParams& params,
                                                          const Eigen::MatrixXcd& rho,
                                                          const Eigen::MatrixXcd& isometry);

// ---------------------------------------------------------------------------
// Hybrid swap audit
// ---------------------------------------------------------------------------

enum class HybridPair {
    kLemmaSubsetOrder,   // direct sampling vs sample-T-then-S (identical)
    kLemmaFloodOracle,   // membership oracle S vs superset T
    kLemmaStateSwap,     // |S>^{(x)k} vs |sigma_X>, oracle T on both sides
    kLemmaOracleShrink,  // oracle T vs oracle X on |sigma_X>
    kRevEncResample,     // permutation game vs subset-first resampling (identical)
};

HybridPair hybrid_pair_from_string(const std::string& name);
std::string to_string(HybridPair p);

struct HybridAuditParams {
    int n;       // domain bits for the lemma pairs
    uint64_t s;
    uint64_t t;
    int k;
    uint64_t queries;  // distinguisher probe budget
    int m = 2;         // revenc pair pad bits

    HybridAuditParams(int n, uint64_t s, uint64_t t, int k, uint64_t queries, int m = 2);
};

struct HybridAuditRow {
    std::string pair;
    SuccessEstimate p_left;
    SuccessEstimate p_right;
    double advantage = 0.0;  // |p_left - p_right|
    double gate = 0.0;       // 3-sigma width for the difference
    double envelope = 0.0;   // theory envelope with O-constants 1 (0 for identical pairs)
    bool identical_distribution = false;
};

HybridAuditRow audit_hybrid_pair(HybridPair pair, const HybridAuditParams& params,
                                 uint64_t trials, SplitRng& rng);

std::vector<HybridAuditRow> hybrid_swap_audit(const HybridAuditParams& params, uint64_t trials,
                                              SplitRng& rng);

}  // namespace revoq
