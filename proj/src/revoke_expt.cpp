#include <cmath>
#include <sstream>
#include <unordered_set>

#include "revoq/errors.hpp"
#include "revoq/harness.hpp"

namespace revoq {

Scheme scheme_from_string(const std::string& name) {
    if (name == "revenc") return Scheme::kRevEnc;
    if (name == "revprog") return Scheme::kRevProg;
    if (name == "pointfn") return Scheme::kPointFn;
    throw BadParameter("scheme: unknown '" + name + "'");
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::kRevEnc: return "revenc";
        case Scheme::kRevProg: return "revprog";
        case Scheme::kPointFn: return "pointfn";
    }
    return "?";
}

RevokeStrategy revoke_strategy_from_string(const std::string& name) {
    if (name == "honest-random-guess") return RevokeStrategy::kHonestRandomGuess;
    if (name == "keep-one-copy") return RevokeStrategy::kKeepOneCopy;
    if (name == "oracle-scan") return RevokeStrategy::kOracleScan;
    if (name == "wrong-key-decrypt") return RevokeStrategy::kWrongKeyDecrypt;
    if (name == "trivial-guess") return RevokeStrategy::kTrivialGuess;
    throw BadParameter("revoke strategy: unknown '" + name + "'");
}

std::string to_string(RevokeStrategy s) {
    switch (s) {
        case RevokeStrategy::kHonestRandomGuess: return "honest-random-guess";
        case RevokeStrategy::kKeepOneCopy: return "keep-one-copy";
        case RevokeStrategy::kOracleScan: return "oracle-scan";
        case RevokeStrategy::kWrongKeyDecrypt: return "wrong-key-decrypt";
        case RevokeStrategy::kTrivialGuess: return "trivial-guess";
    }
    return "?";
}

namespace {

struct Tally {
    uint64_t trials = 0;
    uint64_t accepted = 0;
    uint64_t wins = 0;
    uint64_t wins_accept = 0;
    uint64_t wins_reject = 0;
    uint64_t post_queries = 0;
    double accept_prob_sum = 0.0;
};

void fill_common(RevokeExptReport& report, const Tally& tally) {
    report.trials = tally.trials;
    report.acceptance = wilson_estimate(tally.accepted, tally.trials);
    report.win_overall = wilson_estimate(tally.wins, tally.trials);
    if (tally.accepted > 0) {
        report.win_given_accept = wilson_estimate(tally.wins_accept, tally.accepted);
    }
    if (tally.accepted < tally.trials) {
        report.win_given_reject = wilson_estimate(tally.wins_reject, tally.trials - tally.accepted);
    }
    report.mean_queries_post = static_cast<double>(tally.post_queries) / tally.trials;
    report.mean_accept_prob = tally.accept_prob_sum / tally.trials;
}

/// Returned register for a cheater that keeps the last copy: k-1 honest
/// copies next to a uniformly random basis state (the maximally mixed fake,
/// sampled pure per trial).
DenseState keep_one_returned(const DenseState& single, int k, SplitRng& rng) {
    DenseState fake = DenseState::basis(single.dim(), rng.below(single.dim()));
    if (k == 1) return fake;
    DenseState honest = tensor_power(single, k - 1);
    return tensor(honest, fake);
}

RevokeExptReport run_revenc_expt(RevokeStrategy strategy, const RevokeExptParams& params,
                                 uint64_t trials, SplitRng& rng, bool keep_transcripts) {
    const RevEncParams& base = params.base;
    const uint64_t mu0 = 0;
    const uint64_t mu1 = (uint64_t{1} << base.m) - 1;

    TranscriptLog log(keep_transcripts);
    Tally tally;
    std::map<std::string, uint64_t> symbols_b0, symbols_b1;
    uint64_t trials_b0 = 0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        const int b = static_cast<int>(trial & 1);
        trials_b0 += b == 0 ? 1 : 0;

        RevEncSecretKey sk = keygen(base, trng);
        auto [ct, vk] = encrypt(sk, b == 0 ? mu0 : mu1, base, trng);

        DenseState returned = ct.copies;
        std::optional<DenseState> kept;
        if (strategy == RevokeStrategy::kKeepOneCopy) {
            returned = keep_one_returned(ct.single_copy, base.k, trng);
            kept = ct.single_copy;
        }

        RevokeResult rev = revoke(sk, vk, base, returned, trng);
        tally.accept_prob_sum += rev.accept_prob;

        std::string symbol = "bot";
        bool win = false;
        CountedPerm inverse_oracle(sk.perm);
        if (rev.accepted) {
            // Oracular post phase: quantum access to the permutation inverse,
            // never the key itself.
            int guess;
            switch (strategy) {
                case RevokeStrategy::kHonestRandomGuess:
                    guess = static_cast<int>(trng.below(2));
                    break;
                case RevokeStrategy::kKeepOneCopy: {
                    const uint64_t m_mask = (uint64_t{1} << base.m) - 1;
                    const uint64_t z = measure_computational(*kept, trng);
                    const uint64_t pre = inverse_oracle.inverse(z);
                    const uint64_t mu = (pre & m_mask) ^ ct.pad;
                    guess = mu == mu1 ? 1 : 0;
                    break;
                }
                default:
                    throw BadParameter("revenc game: unsupported strategy " + to_string(strategy));
            }
            symbol = std::to_string(guess);
            win = guess == b;
        }

        tally.trials++;
        tally.accepted += rev.accepted ? 1 : 0;
        tally.wins += win ? 1 : 0;
        (rev.accepted ? tally.wins_accept : tally.wins_reject) += win ? 1 : 0;
        tally.post_queries += inverse_oracle.queries();
        (b == 0 ? symbols_b0 : symbols_b1)[symbol]++;

        GameTranscript t;
        t.seed = trng.seed();
        t.experiment = "revoke-expt:revenc";
        t.strategy = to_string(strategy);
        t.params = {{"n", std::to_string(base.n)},
                    {"m", std::to_string(base.m)},
                    {"k", std::to_string(base.k)},
                    {"b", std::to_string(b)},
                    {"backend", to_string(base.backend)}};
        t.queries = {{"post-inverse", inverse_oracle.queries()}};
        t.revoked = rev.accepted ? 1 : 0;
        t.output = symbol;
        t.win = win;
        log.add(std::move(t));
    }

    RevokeExptReport report;
    report.scheme = "revenc";
    report.strategy = to_string(strategy);
    fill_common(report, tally);
    const uint64_t trials_b1 = trials - trials_b0;
    double max_gap = 0.0;
    for (const std::string& sym : {std::string("0"), std::string("1"), std::string("bot")}) {
        const double f0 = trials_b0 ? static_cast<double>(symbols_b0[sym]) / trials_b0 : 0.0;
        const double f1 = trials_b1 ? static_cast<double>(symbols_b1[sym]) / trials_b1 : 0.0;
        report.symbol_freq_b0[sym] = f0;
        report.symbol_freq_b1[sym] = f1;
        max_gap = std::max(max_gap, std::abs(f0 - f1));
    }
    report.advantage = max_gap;
    report.digest = log.digest();
    report.transcripts = log.items();
    return report;
}

RevokeExptReport run_revprog_expt(RevokeStrategy strategy, const RevokeExptParams& params,
                                  uint64_t trials, SplitRng& rng, bool keep_transcripts) {
    const RevEncParams& base = params.base;
    // Program family: uniform multi-bit point functions over m-bit inputs.
    const int bits = base.m;
    const uint64_t dom = uint64_t{1} << bits;

    TranscriptLog log(keep_transcripts);
    Tally tally;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        const uint64_t marked = trng.bits(bits);
        const uint64_t payload = trng.bits(bits);
        const Program program = Program::point_function(bits, marked, payload);

        auto [cp, vk] = compile(program, RevProgParams(base), trng);
        const DenseState single = subset_to_dense(cp.state);
        const DenseState copies = tensor_power(single, base.k);

        DenseState returned = copies;
        if (strategy == RevokeStrategy::kKeepOneCopy) {
            returned = keep_one_returned(single, base.k, trng);
        }

        RevokeResult rev = revoke(vk, base, returned, trng);
        tally.accept_prob_sum += rev.accept_prob;

        // Challenge draw.
        uint64_t x;
        if (params.marked_challenge_weight >= 0.0) {
            if (trng.bernoulli(params.marked_challenge_weight) || dom == 1) {
                x = marked;
            } else {
                do {
                    x = trng.bits(bits);
                } while (x == marked);
            }
        } else {
            x = trng.bits(bits);
        }

        std::string symbol = "bot";
        bool win = false;
        const uint64_t before = cp.oracle->queries();
        if (rev.accepted) {
            uint64_t guess = 0;
            switch (strategy) {
                case RevokeStrategy::kTrivialGuess:
                case RevokeStrategy::kHonestRandomGuess:
                case RevokeStrategy::kKeepOneCopy:
                    guess = 0;  // best classical guess for point functions
                    break;
                case RevokeStrategy::kOracleScan: {
                    // The checking oracle stays public after revocation; scan
                    // the carrier domain for a subset witness.
                    guess = 0;
                    for (uint64_t s = 0; s < (uint64_t{1} << base.total_bits()); ++s) {
                        const uint64_t v = (*cp.oracle)({x, s});
                        if (v != 0) {
                            guess = v;
                            break;
                        }
                    }
                    break;
                }
                default:
                    throw BadParameter("revprog game: unsupported strategy " + to_string(strategy));
            }
            symbol = std::to_string(guess);
            win = guess == program.eval(x);
        }

        tally.trials++;
        tally.accepted += rev.accepted ? 1 : 0;
        tally.wins += win ? 1 : 0;
        (rev.accepted ? tally.wins_accept : tally.wins_reject) += win ? 1 : 0;
        tally.post_queries += cp.oracle->queries() - before;

        GameTranscript t;
        t.seed = trng.seed();
        t.experiment = "revoke-expt:revprog";
        t.strategy = to_string(strategy);
        t.params = {{"n", std::to_string(base.n)},
                    {"m", std::to_string(base.m)},
                    {"k", std::to_string(base.k)},
                    {"backend", to_string(base.backend)}};
        t.queries = {{"post-oracle", cp.oracle->queries() - before}};
        t.revoked = rev.accepted ? 1 : 0;
        t.output = symbol;
        t.win = win;
        log.add(std::move(t));
    }

    RevokeExptReport report;
    report.scheme = "revprog";
    report.strategy = to_string(strategy);
    fill_common(report, tally);

    // Exact trivial guessing probability for the sampled family.
    ProgramDist family;
    std::vector<uint64_t> marks;
    const double w = 1.0 / static_cast<double>(dom * dom);
    for (uint64_t y = 0; y < dom; ++y) {
        for (uint64_t p = 0; p < dom; ++p) {
            family.entries.emplace_back(Program::point_function(bits, y, p), w);
            marks.push_back(y);
        }
    }
    const ChallengeDist challenge =
        params.marked_challenge_weight >= 0.0
            ? ChallengeDist::marked(params.marked_challenge_weight, bits, marks)
            : ChallengeDist::uniform(bits);
    report.p_triv = trivial_guess_prob(family, challenge);
    report.advantage = (report.win_given_accept ? report.win_given_accept->p_hat : 0.0) -
                       report.p_triv;
    report.digest = log.digest();
    report.transcripts = log.items();
    return report;
}

RevokeExptReport run_pointfn_expt(RevokeStrategy strategy, const RevokeExptParams& params,
                                  uint64_t trials, SplitRng& rng, bool keep_transcripts) {
    if (!params.pf) throw BadParameter("pointfn game: PfParams required");
    const PfParams& pf = *params.pf;
    const uint64_t dom = uint64_t{1} << pf.lambda;

    TranscriptLog log(keep_transcripts);
    Tally tally;
    uint64_t wrong_key_attempts = 0;
    uint64_t wrong_key_accepts = 0;

    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitRng trng = rng.split(trial);
        RandomOracle oracle = pf.make_oracle(trng.split(0x48));
        const PointFunction program{trng.bits(pf.lambda), trng.bits(pf.lambda)};
        auto [cp, vk] = pf_compile(program, pf, oracle, trng);

        const DenseState& copies = cp.ct.inner.inner.copies;
        DenseState returned = copies;
        std::optional<DenseState> kept;
        if (strategy == RevokeStrategy::kKeepOneCopy ||
            strategy == RevokeStrategy::kWrongKeyDecrypt) {
            returned = keep_one_returned(cp.ct.inner.inner.single_copy, pf.base.k, trng);
            kept = cp.ct.inner.inner.single_copy;
        }

        RevokeResult rev = pf_revoke(vk, pf, returned, trng);
        tally.accept_prob_sum += rev.accept_prob;

        // Challenge draw.
        uint64_t x;
        if (params.marked_challenge_weight >= 0.0) {
            if (trng.bernoulli(params.marked_challenge_weight) || dom == 1) {
                x = program.marked;
            } else {
                do {
                    x = trng.bits(pf.lambda);
                } while (x == program.marked);
            }
        } else {
            x = trng.bits(pf.lambda);
        }

        // The decryptor's attempt is recorded regardless of the revocation
        // outcome (the game win still requires acceptance).
        std::optional<uint64_t> decrypted;
        const uint64_t before = oracle.queries();
        if (strategy == RevokeStrategy::kWrongKeyDecrypt && kept) {
            WkdCiphertext probe = cp.ct;
            probe.inner.inner.copies = *kept;
            probe.inner.inner.single_copy = *kept;
            decrypted = wkd_decrypt(x, probe, oracle, pf, trng);
            if (x != program.marked) {
                ++wrong_key_attempts;
                wrong_key_accepts += decrypted.has_value() ? 1 : 0;
            }
        }

        std::string symbol = "bot";
        bool win = false;
        if (rev.accepted) {
            uint64_t guess = 0;
            switch (strategy) {
                case RevokeStrategy::kHonestRandomGuess:
                case RevokeStrategy::kTrivialGuess:
                case RevokeStrategy::kKeepOneCopy:
                    guess = 0;
                    break;
                case RevokeStrategy::kWrongKeyDecrypt:
                    guess = decrypted.value_or(0);
                    break;
                default:
                    throw BadParameter("pointfn game: unsupported strategy " + to_string(strategy));
            }
            symbol = std::to_string(guess);
            const uint64_t truth = x == program.marked ? program.payload : 0;
            win = guess == truth;
        }

        tally.trials++;
        tally.accepted += rev.accepted ? 1 : 0;
        tally.wins += win ? 1 : 0;
        (rev.accepted ? tally.wins_accept : tally.wins_reject) += win ? 1 : 0;
        tally.post_queries += oracle.queries() - before;

        GameTranscript t;
        t.seed = trng.seed();
        t.experiment = "revoke-expt:pointfn";
        t.strategy = to_string(strategy);
        t.params = {{"lambda", std::to_string(pf.lambda)},
                    {"ell", std::to_string(pf.ell)},
                    {"n", std::to_string(pf.base.n)},
                    {"k", std::to_string(pf.base.k)}};
        t.queries = {{"post-oracle", oracle.queries() - before}};
        t.revoked = rev.accepted ? 1 : 0;
        t.output = symbol;
        t.win = win;
        log.add(std::move(t));
    }

    RevokeExptReport report;
    report.scheme = "pointfn";
    report.strategy = to_string(strategy);
    fill_common(report, tally);
    report.wrong_key_attempts = wrong_key_attempts;
    report.wrong_key_accepts = wrong_key_accepts;
    report.digest = log.digest();
    report.transcripts = log.items();
    return report;
}

}  // namespace

RevokeExptReport run_revoke_expt(Scheme scheme, RevokeStrategy strategy,
                                 const RevokeExptParams& params, uint64_t trials, SplitRng& rng,
                                 bool keep_transcripts) {
    if (trials == 0) throw BadParameter("run_revoke_expt: trials must be positive");
    switch (scheme) {
        case Scheme::kRevEnc:
            return run_revenc_expt(strategy, params, trials, rng, keep_transcripts);
        case Scheme::kRevProg:
            return run_revprog_expt(strategy, params, trials, rng, keep_transcripts);
        case Scheme::kPointFn:
            return run_pointfn_expt(strategy, params, trials, rng, keep_transcripts);
    }
    throw BadParameter("run_revoke_expt: bad scheme");
}

}  // namespace revoq
