#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "revoq/cli.hpp"
#include "revoq/errors.hpp"
#include "revoq/harness.hpp"
#include "revoq/qstate.hpp"
#include "revoq/sponge.hpp"

namespace revoq {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (int64_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int64_t c = 0; c < m.cols(); ++c) {
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

/// Exact cycle-type distribution of uniform permutations on 8 points, by
/// enumerating all 8! of them.
json cycle_type_distribution_width3() {
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::map<std::string, uint64_t> counts;
    uint64_t total = 0;
    do {
        ++total;
        std::vector<bool> seen(8, false);
        std::vector<int> cycle_lengths;
        for (int start = 0; start < 8; ++start) {
            if (seen[start]) continue;
            int len = 0;
            int cur = start;
            while (!seen[cur]) {
                seen[cur] = true;
                cur = perm[cur];
                ++len;
            }
            cycle_lengths.push_back(len);
        }
        std::sort(cycle_lengths.begin(), cycle_lengths.end());
        std::string key;
        for (size_t i = 0; i < cycle_lengths.size(); ++i) {
            if (i) key += "+";
            key += std::to_string(cycle_lengths[i]);
        }
        counts[key]++;
    } while (std::next_permutation(perm.begin(), perm.end()));

    json out;
    for (const auto& [key, count] : counts) {
        out[key] = static_cast<double>(count) / static_cast<double>(total);
    }
    return out;
}

/// Trace distance between the subset average and the tuple average at k = 1
/// over a size-t domain, from the closed-form spectrum: the difference is
/// (s-1)/(t(t-1)) * (J - I) on the domain block, with eigenvalues (s-1)/t
/// (once) and -(s-1)/(t(t-1)) (t-1 times).
double lemma_td_closed_form(uint64_t s, uint64_t t) {
    const double sd = static_cast<double>(s);
    const double td = static_cast<double>(t);
    const double lam_top = (sd - 1.0) / td;
    const double lam_rest = (sd - 1.0) / (td * (td - 1.0));
    return 0.5 * (lam_top + (td - 1.0) * lam_rest);
}

}  // namespace

std::string regen_reference_tables(const std::string& out_dir) {
    json doc;
    doc["version"] = REVOQ_VERSION;

    // qstate: direct-normalization and enumeration oracles.
    doc["qstate"]["subset_weight_size3"] = 1.0 / std::sqrt(3.0);
    doc["qstate"]["tuple_k3_nonzeros"] = 6;
    doc["qstate"]["tuple_k3_amplitude"] = 1.0 / std::sqrt(6.0);
    doc["qstate"]["tensor_subset12_n2_k2_amplitude"] = 0.5;
    doc["qstate"]["overlap_S01_S12_n2"] = 0.25;
    doc["qstate"]["td_zero_vs_plus"] = 1.0 / std::sqrt(2.0);
    {
        const DensityMatrix avg = avg_subset_density(2, 2, 1);
        doc["qstate"]["avg_subset_n2_s2_k1"] = matrix_to_json(avg.matrix());
    }
    {
        json td;
        for (uint64_t s : {uint64_t{2}, uint64_t{4}, uint64_t{8}}) {
            td[std::to_string(s)] = lemma_td_closed_form(s, 8);
        }
        doc["qstate"]["lemma_td_n3_t8_k1"] = td;
    }

    // perm: exact uniform-permutation statistics on 2^3 points.
    doc["perm"]["cycle_type_width3"] = cycle_type_distribution_width3();

    // revenc: revocation overlap law (|S intersect S'| / 2^n)^{2k}.
    {
        json law;
        for (int k : {1, 2}) {
            json per_k = json::array();
            for (int overlap = 0; overlap <= 4; ++overlap) {
                per_k.push_back(std::pow(overlap / 4.0, 2.0 * k));
            }
            law[std::to_string(k)] = per_k;
        }
        doc["revenc"]["overlap_law_n2"] = law;
    }

    // harness: counting formulas and their brute-force confirmations.
    doc["harness"]["measure_then_guess_n8_s64_k2"] =
        measure_then_guess_win_prob(UnforgeParams(8, 64, 2, 0));
    doc["harness"]["measure_then_guess_exhaustive_n3_s4_k1"] =
        measure_then_guess_win_prob_exhaustive(3, 4, 1);
    doc["harness"]["forge_full_scan_n2_m2_k1"] = forge_full_scan_win_prob(ForgeParams(2, 2, 1));

    // pointfn: wrong-key-detection bounds.
    doc["pointfn"]["wkd_bound_lambda4_ell16"] = std::pow(2.0, 8.0) / std::pow(2.0, 16.0);
    doc["pointfn"]["wkd_per_trial_ell16"] = std::pow(2.0, -16.0);
    doc["pointfn"]["wkd_per_trial_ell2"] = 0.25;

    // sponge: the bit-reversal truth table at r = c = 2 and bound values.
    {
        const SpongeParams p(2, 2, 0);
        std::vector<uint32_t> table(16);
        for (uint32_t v = 0; v < 16; ++v) {
            uint32_t rev = 0;
            for (int b = 0; b < 4; ++b) rev |= ((v >> b) & 1u) << (3 - b);
            table[v] = rev;
        }
        const ExplicitPerm reversal(4, table);
        json rows = json::array();
        for (uint64_t iv = 0; iv < 4; ++iv) {
            json per_iv = json::array();
            for (uint64_t x = 0; x < 4; ++x) per_iv.push_back(sponge_hash(reversal, iv, x, p));
            rows.push_back(per_iv);
        }
        doc["sponge"]["bit_reversal_r2_c2"] = rows;
    }
    {
        json bounds = json::array();
        const SpongeParams p(6, 6, 32);
        for (uint64_t t : {uint64_t{0}, uint64_t{1}, uint64_t{4}, uint64_t{16}, uint64_t{64}}) {
            bounds.push_back(json::array({t, bound_eval(p, t)}));
        }
        doc["sponge"]["bound_r6_c6_S32"] = bounds;
    }

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "derived.json").string();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << doc.dump(2) << "\n";
    }
    fs::rename(tmp, path);
    return path;
}

}  // namespace revoq
