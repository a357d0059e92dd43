#include "revoq/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "revoq/errors.hpp"
#include "revoq/harness.hpp"
#include "revoq/hash.hpp"
#include "revoq/pointfn.hpp"
#include "revoq/revenc.hpp"
#include "revoq/revprog.hpp"
#include "revoq/sponge.hpp"

namespace revoq {

namespace {

using nlohmann::json;

struct FieldSpec {
    std::string name;
    std::string kind;  // int | real | str
    std::string def;
    int64_t min_i = 0;
    int64_t max_i = 0;
    std::vector<std::string> choices;  // str kind; empty = free-form
    std::string help;
};

struct ExperimentSpec {
    std::string name;
    std::vector<FieldSpec> fields;
    uint64_t default_trials;
};

const std::vector<ExperimentSpec>& experiment_specs() {
    static const std::vector<ExperimentSpec> specs = {
        {"revenc",
         {
             {"n", "int", "2", 1, 10, {}, "subset exponent"},
             {"m", "int", "2", 1, 10, {}, "message bits"},
             {"k", "int", "1", 1, 6, {}, "ciphertext copies"},
             {"backend", "str", "keyed", 0, 0, {"keyed", "explicit"}, "permutation backend"},
             {"strategy",
              "str",
              "honest-random-guess",
              0,
              0,
              {"honest-random-guess", "keep-one-copy"},
              "adversary strategy"},
         },
         1000},
        {"revprog",
         {
             {"n", "int", "2", 1, 10, {}, "subset exponent"},
             {"m", "int", "2", 1, 8, {}, "program input bits"},
             {"k", "int", "1", 1, 6, {}, "compiled copies"},
             {"backend", "str", "keyed", 0, 0, {"keyed", "explicit"}, "permutation backend"},
             {"program", "str", "pointfn", 0, 0, {"pointfn", "table"}, "program family"},
             {"table-file", "str", "", 0, 0, {}, "JSON table of input->output hex pairs"},
             {"strategy",
              "str",
              "trivial-guess",
              0,
              0,
              {"trivial-guess", "oracle-scan", "keep-one-copy", "honest-random-guess"},
              "adversary strategy"},
             {"marked-weight", "real", "-1", 0, 0, {}, "challenge weight on the marked input"},
         },
         1000},
        {"pointfn",
         {
             {"lambda", "int", "4", 1, 8, {}, "marked input and payload bits"},
             {"ell", "int", "0", 0, 48, {}, "oracle tag bits (0 = 4*lambda)"},
             {"n", "int", "2", 1, 6, {}, "carrier subset exponent"},
             {"k", "int", "1", 1, 4, {}, "compiled copies"},
             {"backend", "str", "keyed", 0, 0, {"keyed", "explicit"}, "permutation backend"},
             {"challenge-dist", "str", "uniform", 0, 0, {}, "uniform | marked:<p>"},
             {"strategy",
              "str",
              "trivial-guess",
              0,
              0,
              {"trivial-guess", "wrong-key-decrypt", "keep-one-copy", "honest-random-guess"},
              "adversary strategy"},
         },
         1000},
        {"unforge",
         {
             {"variant", "str", "quantum", 0, 0, {"quantum", "classical"}, "experiment variant"},
             {"n", "int", "8", 1, 20, {}, "domain bits"},
             {"s", "int", "64", 1, 1 << 20, {}, "subset size"},
             {"k", "int", "2", 1, 1 << 20, {}, "given copies / elements"},
             {"queries", "int", "0", 0, 1 << 24, {}, "membership query budget"},
             {"strategy",
              "str",
              "",
              0,
              0,
              {"", "measure-then-guess", "membership-scan", "random-guess", "scan"},
              "strategy (default depends on variant)"},
         },
         10000},
        {"forge",
         {
             {"n", "int", "2", 1, 8, {}, "subset exponent (|S| = 2^n)"},
             {"m", "int", "2", 1, 8, {}, "pad bits"},
             {"k", "int", "1", 1, 6, {}, "copies"},
             {"adversary",
              "str",
              "honest-full-scan",
              0,
              0,
              {"honest-full-scan", "honest-null-post"},
              "adversary pair"},
         },
         2000},
        {"hybrid-audit",
         {
             {"n", "int", "6", 1, 16, {}, "domain bits"},
             {"s", "int", "8", 1, 1 << 16, {}, "subset size"},
             {"t", "int", "32", 1, 1 << 16, {}, "superset size"},
             {"k", "int", "1", 1, 8, {}, "copies"},
             {"queries", "int", "4", 0, 1 << 16, {}, "distinguisher probes"},
             {"m", "int", "2", 1, 8, {}, "pad bits for the resampling pair"},
         },
         10000},
        {"distinct-extraction",
         {
             {"width", "int", "2", 1, 4, {}, "element bits"},
             {"set-size", "int", "4", 2, 16, {}, "|S|"},
             {"k", "int", "1", 1, 3, {}, "copies"},
             {"env-qubits", "int", "2", 1, 6, {}, "auxiliary register qubits"},
             {"extra-qubits", "int", "1", 0, 4, {}, "isometry environment qubits"},
         },
         100},
        {"sponge",
         {
             {"r", "int", "6", 1, 16, {}, "rate bits"},
             {"c", "int", "6", 1, 16, {}, "capacity bits"},
             {"table-size", "int", "32", 0, 1 << 16, {}, "hash table size"},
             {"queries", "int", "0", 0, 1 << 20, {}, "query budget (curve sweeps up to it)"},
             {"strategy",
              "str",
              "random-guess",
              0,
              0,
              {"random-guess", "inverse-probe", "table-extend"},
              "attack strategy"},
             {"backend", "str", "explicit", 0, 0, {"explicit", "keyed"}, "permutation backend"},
             {"scale", "real", "1", 0, 0, {}, "O-constant scale for the bound"},
             {"allow-forward", "int", "0", 0, 1, {}, "grant forward permutation access (no theory)"},
         },
         2000},
        {"regen-fixtures",
         {
             {"out-dir", "str", "data/fixtures", 0, 0, {}, "fixtures directory"},
         },
         1},
    };
    return specs;
}

const ExperimentSpec& find_spec(const std::string& experiment) {
    for (const auto& spec : experiment_specs()) {
        if (spec.name == experiment) return spec;
    }
    throw UnknownExperiment("unknown experiment '" + experiment + "'");
}

int64_t get_int(const ExperimentConfig& c, const std::string& key) {
    return std::stoll(c.params.at(key));
}

double get_real(const ExperimentConfig& c, const std::string& key) {
    return std::stod(c.params.at(key));
}

std::string get_str(const ExperimentConfig& c, const std::string& key) {
    return c.params.at(key);
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

json estimate_json(const SuccessEstimate& e) {
    return json{{"trials", e.trials}, {"wins", e.wins},     {"p_hat", e.p_hat},
                {"ci_lo", e.ci_lo},   {"ci_hi", e.ci_hi},   {"z", e.z}};
}

struct CsvRow {
    std::string experiment;
    std::string params;
    std::string strategy;
    uint64_t trials;
    uint64_t wins;
    double p_hat, ci_lo, ci_hi;
    double mean_queries;
};

struct DispatchResult {
    json results;
    bool ok = true;
    std::vector<CsvRow> csv;
    std::string csv_header =
        "experiment,params,strategy,trials,wins,p_hat,ci_lo,ci_hi,mean_queries";
    std::vector<std::string> csv_lines;  // pre-rendered (sponge custom columns)
    std::vector<GameTranscript> transcripts;
};

std::string param_blob(const ExperimentConfig& c) {
    std::string out;
    for (const auto& [k, v] : c.params) {
        if (!out.empty()) out += ";";
        out += k + "=" + v;
    }
    return out;
}

double marked_weight_from_dist(const std::string& dist) {
    if (dist == "uniform") return -1.0;
    if (dist.rfind("marked:", 0) == 0) {
        const double p = std::stod(dist.substr(7));
        if (p < 0.0 || p > 1.0) throw BadParameter("challenge-dist: weight outside [0, 1]");
        return p;
    }
    throw BadParameter("challenge-dist: expected 'uniform' or 'marked:<p>'");
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

DispatchResult run_revenc_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const RevEncParams params(static_cast<int>(get_int(c, "n")), static_cast<int>(get_int(c, "m")),
                              static_cast<int>(get_int(c, "k")),
                              backend_from_string(get_str(c, "backend")));
    DispatchResult out;

    // Correctness sweep: exact round trip and exact honest revocation.
    uint64_t dec_ok = 0;
    double worst_accept = 1.0;
    const uint64_t sweep = std::min<uint64_t>(c.trials, 200);
    for (uint64_t i = 0; i < sweep; ++i) {
        SplitRng trng = rng.split(1000000 + i);
        RevEncSecretKey sk = keygen(params, trng);
        const uint64_t mu = trng.bits(params.m);
        auto [ct, vk] = encrypt(sk, mu, params, trng);
        dec_ok += decrypt(sk, ct.single_copy, ct.pad, params, trng) == mu ? 1 : 0;
        RevokeResult rev = revoke(sk, vk, params, ct.copies, trng);
        worst_accept = std::min(worst_accept, rev.accept_prob);
    }
    out.ok = dec_ok == sweep && worst_accept >= 1.0 - kTol;

    const RevokeStrategy strategy = revoke_strategy_from_string(get_str(c, "strategy"));
    RevokeExptParams gp(params);
    const bool keep = !c.transcripts_path.empty();
    RevokeExptReport report = run_revoke_expt(Scheme::kRevEnc, strategy, gp, c.trials, rng, keep);
    if (strategy == RevokeStrategy::kHonestRandomGuess) {
        out.ok = out.ok && report.acceptance.wins == report.acceptance.trials;
    }

    out.results = json{
        {"correctness", json{{"sweep", sweep}, {"dec_ok", dec_ok}, {"worst_accept", worst_accept}}},
        {"game",
         json{{"scheme", report.scheme},
              {"strategy", report.strategy},
              {"acceptance", estimate_json(report.acceptance)},
              {"win_overall", estimate_json(report.win_overall)},
              {"advantage", report.advantage},
              {"symbol_freq_b0", report.symbol_freq_b0},
              {"symbol_freq_b1", report.symbol_freq_b1},
              {"mean_accept_prob", report.mean_accept_prob},
              {"digest", to_hex(report.digest)}}},
    };
    out.csv.push_back(CsvRow{"revenc", param_blob(c), report.strategy, report.trials,
                             report.win_overall.wins, report.win_overall.p_hat,
                             report.win_overall.ci_lo, report.win_overall.ci_hi,
                             report.mean_queries_post});
    out.transcripts = std::move(report.transcripts);
    return out;
}

Program load_table_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadParameter("table-file: cannot open '" + path + "'");
    json doc = json::parse(in);
    std::map<uint64_t, uint64_t> entries;
    uint64_t max_in = 0;
    uint64_t max_out = 0;
    for (const auto& [key, value] : doc.items()) {
        const uint64_t x = std::stoull(key, nullptr, 16);
        const uint64_t v = std::stoull(value.get<std::string>(), nullptr, 16);
        entries[x] = v;
        max_in = std::max(max_in, x);
        max_out = std::max(max_out, v);
    }
    int domain_bits = 1;
    while ((uint64_t{1} << domain_bits) <= max_in) ++domain_bits;
    if ((uint64_t{1} << domain_bits) != entries.size()) {
        throw BadParameter("table-file: table must be total on a power-of-two domain");
    }
    int range_bits = 1;
    while ((uint64_t{1} << range_bits) <= max_out) ++range_bits;
    std::vector<uint64_t> table(uint64_t{1} << domain_bits);
    for (const auto& [x, v] : entries) table[x] = v;
    return Program(domain_bits, range_bits, std::move(table));
}

DispatchResult run_revprog_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const RevEncParams base(static_cast<int>(get_int(c, "n")), static_cast<int>(get_int(c, "m")),
                            static_cast<int>(get_int(c, "k")),
                            backend_from_string(get_str(c, "backend")));
    DispatchResult out;

    // Functional preservation sweep.
    SplitRng sweep_rng = rng.split(1000001);
    Program probe = get_str(c, "program") == "table" && !get_str(c, "table-file").empty()
                        ? load_table_program(get_str(c, "table-file"))
                        : Program::random_table(base.m, base.m, sweep_rng);
    bool functional = true;
    {
        auto [cp, vk] = compile(probe, RevProgParams(base), sweep_rng);
        for (uint64_t x = 0; x < probe.table.size(); ++x) {
            functional = functional && eval(cp, x) == probe.eval(x);
        }
        RevokeResult rev =
            revoke(vk, base, tensor_power(subset_to_dense(cp.state), base.k), sweep_rng);
        functional = functional && rev.accept_prob >= 1.0 - kTol;
    }
    out.ok = functional;

    RevokeExptParams gp(base);
    gp.marked_challenge_weight = get_real(c, "marked-weight");
    const RevokeStrategy strategy = revoke_strategy_from_string(get_str(c, "strategy"));
    const bool keep = !c.transcripts_path.empty();
    RevokeExptReport report = run_revoke_expt(Scheme::kRevProg, strategy, gp, c.trials, rng, keep);
    if (strategy != RevokeStrategy::kKeepOneCopy) {
        out.ok = out.ok && report.acceptance.wins == report.acceptance.trials;
    }

    out.results = json{
        {"functional_preservation", functional},
        {"game",
         json{{"scheme", report.scheme},
              {"strategy", report.strategy},
              {"acceptance", estimate_json(report.acceptance)},
              {"win_overall", estimate_json(report.win_overall)},
              {"p_triv", report.p_triv},
              {"advantage_over_trivial", report.advantage},
              {"digest", to_hex(report.digest)}}},
    };
    out.csv.push_back(CsvRow{"revprog", param_blob(c), report.strategy, report.trials,
                             report.win_overall.wins, report.win_overall.p_hat,
                             report.win_overall.ci_lo, report.win_overall.ci_hi,
                             report.mean_queries_post});
    out.transcripts = std::move(report.transcripts);
    return out;
}

DispatchResult run_pointfn_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const int lambda = static_cast<int>(get_int(c, "lambda"));
    int ell = static_cast<int>(get_int(c, "ell"));
    if (ell == 0) ell = 4 * lambda;
    const PfParams params(lambda, ell, static_cast<int>(get_int(c, "n")),
                          static_cast<int>(get_int(c, "k")),
                          backend_from_string(get_str(c, "backend")));
    DispatchResult out;

    // Functionality sweep: marked input decrypts, a wrong input yields zero,
    // the untouched state passes revocation exactly.
    bool functional = true;
    const uint64_t sweep = std::min<uint64_t>(c.trials, 100);
    for (uint64_t i = 0; i < sweep; ++i) {
        SplitRng trng = rng.split(2000000 + i);
        RandomOracle oracle = params.make_oracle(trng.split(1));
        const PointFunction pf{trng.bits(lambda), trng.bits(lambda)};
        auto [cp, vk] = pf_compile(pf, params, oracle, trng);
        RevokeResult rev = pf_revoke(vk, params, cp.ct.inner.inner.copies, trng);
        functional = functional && rev.accept_prob >= 1.0 - kTol;
        if ((uint64_t{1} << lambda) > 1) {
            uint64_t wrong = trng.bits(lambda);
            while (wrong == pf.marked) wrong = trng.bits(lambda);
            const uint64_t r = pf_eval(cp, wrong, oracle, trng);
            functional = functional && (r == 0 || params.ell <= 8);
        }
        functional = functional && pf_eval(cp, pf.marked, oracle, trng) == pf.payload;
    }

    // Wrong-key detection estimate against the analytic per-trial rate 2^-ell
    // and the paper-style 2^{2 lambda} / 2^ell envelope.
    uint64_t false_accepts = 0;
    for (uint64_t i = 0; i < c.trials; ++i) {
        SplitRng trng = rng.split(3000000 + i);
        false_accepts += wkd_wrong_key_trial(params, trng) ? 1 : 0;
    }
    const double wkd_bound = std::pow(2.0, 2.0 * lambda) / std::pow(2.0, ell);
    const SuccessEstimate wkd_rate = wilson_estimate(false_accepts, c.trials);
    const bool wkd_ok = wkd_rate.ci_lo <= std::min(1.0, wkd_bound) + 1e-12;
    out.ok = functional && wkd_ok;

    RevokeExptParams gp(params.base);
    gp.pf = params;
    gp.marked_challenge_weight = marked_weight_from_dist(get_str(c, "challenge-dist"));
    const RevokeStrategy strategy = revoke_strategy_from_string(get_str(c, "strategy"));
    const bool keep = !c.transcripts_path.empty();
    RevokeExptReport report = run_revoke_expt(Scheme::kPointFn, strategy, gp, c.trials, rng, keep);

    out.results = json{
        {"functional_preservation", functional},
        {"wkd",
         json{{"false_accept", estimate_json(wkd_rate)},
              {"bound", wkd_bound},
              {"per_trial_collision", std::pow(2.0, -ell)},
              {"within_bound", wkd_ok}}},
        {"game",
         json{{"scheme", report.scheme},
              {"strategy", report.strategy},
              {"acceptance", estimate_json(report.acceptance)},
              {"win_overall", estimate_json(report.win_overall)},
              {"wrong_key_attempts", report.wrong_key_attempts},
              {"wrong_key_accepts", report.wrong_key_accepts},
              {"digest", to_hex(report.digest)}}},
    };
    out.csv.push_back(CsvRow{"pointfn", param_blob(c), report.strategy, report.trials,
                             report.win_overall.wins, report.win_overall.p_hat,
                             report.win_overall.ci_lo, report.win_overall.ci_hi,
                             report.mean_queries_post});
    out.transcripts = std::move(report.transcripts);
    return out;
}

DispatchResult run_unforge_cmd(const ExperimentConfig& c, SplitRng& rng) {
    DispatchResult out;
    const std::string variant = get_str(c, "variant");
    const int n = static_cast<int>(get_int(c, "n"));
    const uint64_t s = static_cast<uint64_t>(get_int(c, "s"));
    const uint64_t k = static_cast<uint64_t>(get_int(c, "k"));
    const uint64_t queries = static_cast<uint64_t>(get_int(c, "queries"));
    std::string strategy = get_str(c, "strategy");

    if (variant == "quantum") {
        if (strategy.empty()) strategy = "measure-then-guess";
        const UnforgeParams params(n, s, static_cast<int>(k), queries);
        const UnforgeStrategy strat = unforge_strategy_from_string(strategy);
        UnforgeReport report =
            run_unforgeability(params, strat, c.trials, rng, !c.transcripts_path.empty());
        const double analytic = measure_then_guess_win_prob(params);
        bool ok = true;
        if (k >= s) ok = report.estimate.wins == 0;
        if (strat == UnforgeStrategy::kMeasureThenGuess) {
            ok = ok && binomial_consistent(report.estimate.wins, report.estimate.trials, analytic);
        }
        out.ok = ok;
        out.results = json{{"variant", "quantum"},
                           {"estimate", estimate_json(report.estimate)},
                           {"analytic_measure_then_guess", analytic},
                           {"mean_queries", report.mean_queries},
                           {"digest", to_hex(report.digest)}};
        out.csv.push_back(CsvRow{"unforge", param_blob(c), strategy, report.estimate.trials,
                                 report.estimate.wins, report.estimate.p_hat,
                                 report.estimate.ci_lo, report.estimate.ci_hi,
                                 report.mean_queries});
        out.transcripts = std::move(report.transcripts);
    } else {
        if (strategy.empty()) strategy = "random-guess";
        const ClassicalUnforgeParams params(n, s, k);
        const ClassicalStrategy strat = classical_strategy_from_string(strategy);
        const SuccessEstimate est =
            run_classical_unforgeability(params, strat, queries, c.trials, rng);
        const double analytic =
            k >= s ? 0.0
                   : static_cast<double>(s - k) / (std::pow(2.0, n) - static_cast<double>(k));
        bool ok = true;
        if (k >= s) ok = est.wins == 0;
        if (strat == ClassicalStrategy::kRandomGuess) {
            ok = ok && binomial_consistent(est.wins, est.trials, analytic);
        }
        out.ok = ok;
        out.results = json{{"variant", "classical"},
                           {"estimate", estimate_json(est)},
                           {"analytic_random_guess", analytic}};
        out.csv.push_back(CsvRow{"unforge", param_blob(c), strategy, est.trials, est.wins,
                                 est.p_hat, est.ci_lo, est.ci_hi, 0.0});
    }
    return out;
}

DispatchResult run_forge_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const ForgeParams params(static_cast<int>(get_int(c, "n")), static_cast<int>(get_int(c, "m")),
                             static_cast<int>(get_int(c, "k")));
    const ForgeAdversary adversary = forge_adversary_from_string(get_str(c, "adversary"));
    ForgeReport report = run_forge(params, adversary, c.trials, rng, !c.transcripts_path.empty());

    DispatchResult out;
    const double analytic = forge_full_scan_win_prob(params);
    if (adversary == ForgeAdversary::kHonestFullScan) {
        out.ok = binomial_consistent(report.estimate.wins, report.estimate.trials, analytic);
    } else {
        out.ok = report.extractor_failures == report.estimate.trials && report.estimate.wins == 0;
    }
    out.results = json{{"estimate", estimate_json(report.estimate)},
                       {"analytic_full_scan", analytic},
                       {"extractor_failures", report.extractor_failures},
                       {"mean_queries", report.mean_queries},
                       {"digest", to_hex(report.digest)}};
    out.csv.push_back(CsvRow{"forge", param_blob(c), to_string(adversary), report.estimate.trials,
                             report.estimate.wins, report.estimate.p_hat, report.estimate.ci_lo,
                             report.estimate.ci_hi, report.mean_queries});
    out.transcripts = std::move(report.transcripts);
    return out;
}

DispatchResult run_hybrid_audit_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const HybridAuditParams params(
        static_cast<int>(get_int(c, "n")), static_cast<uint64_t>(get_int(c, "s")),
        static_cast<uint64_t>(get_int(c, "t")), static_cast<int>(get_int(c, "k")),
        static_cast<uint64_t>(get_int(c, "queries")), static_cast<int>(get_int(c, "m")));
    const auto rows = hybrid_swap_audit(params, c.trials, rng);

    DispatchResult out;
    json jrows = json::array();
    for (const auto& row : rows) {
        if (row.identical_distribution) out.ok = out.ok && row.advantage <= row.gate;
        jrows.push_back(json{{"pair", row.pair},
                             {"p_left", estimate_json(row.p_left)},
                             {"p_right", estimate_json(row.p_right)},
                             {"advantage", row.advantage},
                             {"gate", row.gate},
                             {"envelope", row.envelope},
                             {"identical_distribution", row.identical_distribution}});
        out.csv.push_back(CsvRow{"hybrid-audit", param_blob(c), row.pair, c.trials,
                                 row.p_left.wins, row.p_left.p_hat, row.p_left.ci_lo,
                                 row.p_left.ci_hi, static_cast<double>(params.queries)});
    }
    out.results = json{{"pairs", jrows}};
    return out;
}

DispatchResult run_distinct_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const int width = static_cast<int>(get_int(c, "width"));
    const uint64_t set_size = static_cast<uint64_t>(get_int(c, "set-size"));
    SplitRng srng = rng.split(7);
    const DistinctExtractionParams params(
        width, srng.distinct_sorted(uint64_t{1} << width, set_size),
        static_cast<int>(get_int(c, "k")), static_cast<int>(get_int(c, "env-qubits")),
        static_cast<int>(get_int(c, "extra-qubits")), c.trials);
    const DistinctExtractionReport report = check_distinct_extraction(params, rng);

    DispatchResult out;
    out.ok = report.all_ok;
    double worst_slack = report.closed_form.slack;
    for (const auto& r : report.random_cases) worst_slack = std::min(worst_slack, r.slack);
    out.results = json{{"factor", report.factor},
                       {"closed_form",
                        json{{"lhs", report.closed_form.lhs},
                             {"rhs", report.closed_form.rhs},
                             {"slack", report.closed_form.slack}}},
                       {"random_instances", report.random_cases.size()},
                       {"worst_slack", worst_slack},
                       {"all_ok", report.all_ok}};
    return out;
}

DispatchResult run_sponge_cmd(const ExperimentConfig& c, SplitRng& rng) {
    const SpongeParams params(static_cast<int>(get_int(c, "r")), static_cast<int>(get_int(c, "c")),
                              static_cast<uint64_t>(get_int(c, "table-size")),
                              backend_from_string(get_str(c, "backend")));
    const SpongeStrategy strategy = sponge_strategy_from_string(get_str(c, "strategy"));
    const uint64_t budget = static_cast<uint64_t>(get_int(c, "queries"));
    const double scale = get_real(c, "scale");
    const bool allow_forward = get_int(c, "allow-forward") != 0;

    // Sweep T over 0 and powers of two up to the budget.
    std::vector<uint64_t> sweep{0};
    for (uint64_t t = 1; t <= budget; t *= 2) sweep.push_back(t);
    if (!sweep.empty() && sweep.back() != budget && budget > 0) sweep.push_back(budget);

    DispatchResult out;
    out.csv_header = "r,c,S,T,strategy,trials,wins,eps_hat,ci_lo,ci_hi,bound";
    json jrows = json::array();
    double prev_bound = -1.0;
    int stream = 0;
    for (uint64_t t : sweep) {
        SplitRng prng = rng.split(stream++);
        const AttackReport report = allow_forward
                                        ? run_attack(params, strategy, t, c.trials, prng, true)
                                        : run_attack(params, strategy, t, c.trials, prng);
        const double bound = bound_eval(params, t, scale);
        out.ok = out.ok && bound >= prev_bound - 1e-12;  // monotone in T
        prev_bound = bound;
        if (t == 0 && strategy == SpongeStrategy::kRandomGuess && !allow_forward) {
            out.ok = out.ok && binomial_consistent(report.estimate.wins, report.estimate.trials,
                                                   report.mean_fresh_fraction);
        }
        jrows.push_back(json{{"T", t},
                             {"estimate", estimate_json(report.estimate)},
                             {"bound", bound},
                             {"mean_fresh_fraction", report.mean_fresh_fraction},
                             {"mean_inverse_queries", report.mean_inverse_queries},
                             {"mean_valid_queries", report.mean_valid_queries}});
        std::ostringstream line;
        line.precision(10);
        line << params.rate << "," << params.capacity << "," << params.table_size << "," << t
             << "," << to_string(strategy) << "," << report.estimate.trials << ","
             << report.estimate.wins << "," << report.estimate.p_hat << ","
             << report.estimate.ci_lo << "," << report.estimate.ci_hi << "," << bound;
        out.csv_lines.push_back(line.str());
    }
    out.results = json{{"curve", jrows}, {"allow_forward", allow_forward}};
    return out;
}

DispatchResult run_regen_cmd(const ExperimentConfig& c, SplitRng&) {
    DispatchResult out;
    const std::string path = regen_reference_tables(get_str(c, "out-dir"));
    out.results = json{{"written", path}};
    return out;
}

}  // namespace

std::vector<std::string> known_experiments() {
    std::vector<std::string> names;
    for (const auto& spec : experiment_specs()) names.push_back(spec.name);
    return names;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadParameter("config: cannot open '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = value;
    }
    return out;
}

ExperimentConfig parse_config(const std::string& experiment,
                              const std::map<std::string, std::string>& flag_params,
                              const std::map<std::string, std::string>& file_params) {
    const ExperimentSpec& spec = find_spec(experiment);

    // File values first, flags override.
    std::map<std::string, std::string> merged = file_params;
    for (const auto& [k, v] : flag_params) merged[k] = v;

    ExperimentConfig config;
    config.experiment = experiment;
    config.seed = 42;
    config.trials = spec.default_trials;

    auto take = [&merged](const std::string& key) -> std::optional<std::string> {
        auto it = merged.find(key);
        if (it == merged.end()) return std::nullopt;
        std::string v = it->second;
        merged.erase(it);
        return v;
    };

    if (auto v = take("seed")) config.seed = std::stoull(*v);
    if (auto v = take("trials")) {
        const int64_t t = std::stoll(*v);
        if (t <= 0) throw BadParameter("trials: must be positive");
        config.trials = static_cast<uint64_t>(t);
    }
    if (auto v = take("out")) config.output_path = *v;
    if (auto v = take("transcripts")) config.transcripts_path = *v;
    if (auto v = take("csv")) config.csv_path = *v;

    for (const FieldSpec& field : spec.fields) {
        std::string value = field.def;
        if (auto v = take(field.name)) value = *v;
        if (field.kind == "int") {
            int64_t parsed;
            try {
                size_t pos = 0;
                parsed = std::stoll(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw BadParameter(field.name + ": not an integer: '" + value + "'");
            }
            if (parsed < field.min_i || parsed > field.max_i) {
                throw BadParameter(field.name + ": " + value + " outside [" +
                                   std::to_string(field.min_i) + ", " +
                                   std::to_string(field.max_i) + "]");
            }
        } else if (field.kind == "real") {
            try {
                size_t pos = 0;
                (void)std::stod(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw BadParameter(field.name + ": not a number: '" + value + "'");
            }
        } else if (!field.choices.empty()) {
            bool allowed = false;
            for (const auto& choice : field.choices) allowed = allowed || choice == value;
            if (!allowed) {
                throw BadParameter(field.name + ": '" + value + "' is not a valid choice");
            }
        }
        config.params[field.name] = value;
    }
    if (!merged.empty()) {
        throw BadParameter("unknown parameter '" + merged.begin()->first + "' for experiment '" +
                           experiment + "'");
    }
    return config;
}

std::string RunManifest::to_json() const {
    json doc;
    doc["experiment"] = config.experiment;
    doc["seed"] = config.seed;
    doc["trials"] = config.trials;
    doc["params"] = config.params;
    doc["version"] = version;
    doc["wall_seconds"] = wall_seconds;
    doc["results"] = json::parse(results_json);
    doc["transcript_digest"] = transcript_digest;
    doc["ok"] = ok;
    return doc.dump(2);
}

RunManifest dispatch(const ExperimentConfig& config) {
    find_spec(config.experiment);  // validates the name
    SplitRng rng(config.seed);

    const auto start = std::chrono::steady_clock::now();
    DispatchResult result;
    if (config.experiment == "revenc") {
        result = run_revenc_cmd(config, rng);
    } else if (config.experiment == "revprog") {
        result = run_revprog_cmd(config, rng);
    } else if (config.experiment == "pointfn") {
        result = run_pointfn_cmd(config, rng);
    } else if (config.experiment == "unforge") {
        result = run_unforge_cmd(config, rng);
    } else if (config.experiment == "forge") {
        result = run_forge_cmd(config, rng);
    } else if (config.experiment == "hybrid-audit") {
        result = run_hybrid_audit_cmd(config, rng);
    } else if (config.experiment == "distinct-extraction") {
        result = run_distinct_cmd(config, rng);
    } else if (config.experiment == "sponge") {
        result = run_sponge_cmd(config, rng);
    } else if (config.experiment == "regen-fixtures") {
        result = run_regen_cmd(config, rng);
    } else {
        throw UnknownExperiment("unknown experiment '" + config.experiment + "'");
    }
    const auto end = std::chrono::steady_clock::now();

    RunManifest manifest;
    manifest.config = config;
    manifest.version = REVOQ_VERSION;
    manifest.wall_seconds = std::chrono::duration<double>(end - start).count();
    manifest.results_json = result.results.dump();
    manifest.ok = result.ok;

    // Digest over the deterministic payload only (results carry per-run
    // transcript digests; wall time lives outside).
    std::string digest_input = config.experiment + "|" + param_blob(config) + "|" +
                               std::to_string(config.seed) + "|" + std::to_string(config.trials) +
                               "|" + manifest.results_json;
    manifest.transcript_digest = to_hex(fnv1a64(digest_input));

    if (!config.output_path.empty()) atomic_write(config.output_path, manifest.to_json() + "\n");
    if (!config.csv_path.empty()) {
        std::ostringstream csv;
        csv << result.csv_header << "\n";
        csv.precision(10);
        for (const auto& line : result.csv_lines) csv << line << "\n";
        for (const auto& row : result.csv) {
            csv << row.experiment << ",\"" << row.params << "\"," << row.strategy << ","
                << row.trials << "," << row.wins << "," << row.p_hat << "," << row.ci_lo << ","
                << row.ci_hi << "," << row.mean_queries << "\n";
        }
        atomic_write(config.csv_path, csv.str());
    }
    if (!config.transcripts_path.empty()) {
        std::ostringstream lines;
        for (const auto& t : result.transcripts) lines << t.canonical_json() << "\n";
        atomic_write(config.transcripts_path, lines.str());
    }
    return manifest;
}

}  // namespace revoq
