#include "revoq/revprog.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "revoq/errors.hpp"

namespace revoq {

Program::Program(int domain_bits_in, int range_bits_in, std::vector<uint64_t> table_in)
    : domain_bits(domain_bits_in), range_bits(range_bits_in), table(std::move(table_in)) {
    if (domain_bits < 1 || domain_bits > 20) throw BadParameter("Program: domain_bits outside [1, 20]");
    if (range_bits < 1 || range_bits > 63) throw BadParameter("Program: range_bits outside [1, 63]");
    if (table.size() != (uint64_t{1} << domain_bits)) {
        throw BadParameter("Program: table size must be 2^domain_bits");
    }
    for (uint64_t v : table) {
        if (v >= (uint64_t{1} << range_bits)) throw BadParameter("Program: table value out of range");
    }
}

uint64_t Program::eval(uint64_t x) const {
    if (x >= table.size()) throw BadParameter("Program::eval: input out of domain");
    return table[x];
}

Program Program::point_function(int bits, uint64_t marked, uint64_t payload) {
    std::vector<uint64_t> t(uint64_t{1} << bits, 0);
    t.at(marked) = payload;
    return Program(bits, bits, std::move(t));
}

Program Program::random_table(int domain_bits, int range_bits, SplitRng& rng) {
    std::vector<uint64_t> t(uint64_t{1} << domain_bits);
    for (auto& v : t) v = rng.bits(range_bits);
    return Program(domain_bits, range_bits, std::move(t));
}

std::pair<CompiledProgram, ProgramVerificationKey> compile(const Program& program,
                                                           const RevProgParams& params,
                                                           SplitRng& rng) {
    const RevEncParams& base = params.base;
    RevEncSecretKey sk = keygen(base, rng);
    VerificationKey inner_vk{rng.bits(base.m), base.m};
    SubsetState state = subset_for(sk, inner_vk, base);

    // The oracle owns an immutable snapshot of S and the program table.
    auto subset = std::make_shared<const SubsetState>(state);
    auto prog = std::make_shared<const Program>(program);
    auto oracle = std::make_shared<ProgramOracle>([subset, prog](std::pair<uint64_t, uint64_t> q) {
        const auto [x, s] = q;
        return subset->contains(s) ? prog->eval(x) : 0;
    });

    CompiledProgram cp{program, std::move(state), std::move(oracle), base};
    ProgramVerificationKey vk{inner_vk.y, base.m, sk.perm};
    return {std::move(cp), std::move(vk)};
}

uint64_t eval(const CompiledProgram& cp, uint64_t x) { return cp.program.eval(x); }

uint64_t eval_coherent(const CompiledProgram& cp, uint64_t x, SplitRng& rng) {
    // Evaluate O(x, .) across the support; the ancilla register is then a
    // superposition with one amplitude per distinct outcome. Honest states
    // put all weight on P(x).
    std::map<uint64_t, double> ancilla_mass;
    const double w = 1.0 / static_cast<double>(cp.state.size());
    for (uint64_t s : cp.state.support) {
        ancilla_mass[(*cp.oracle)({x, s})] += w;
    }
    double u = rng.next_double();
    double acc = 0.0;
    for (const auto& [value, mass] : ancilla_mass) {
        acc += mass;
        if (u < acc) return value;
    }
    return ancilla_mass.rbegin()->first;
}

RevokeResult revoke(const ProgramVerificationKey& vk, const RevEncParams& params,
                    const DenseState& returned, SplitRng& rng) {
    RevEncSecretKey sk = secret_key_from_perm(vk.perm, params.backend);
    return revoke(sk, VerificationKey{vk.y, vk.m}, params, returned, rng);
}

void ProgramDist::validate() const {
    if (entries.empty()) throw BadParameter("ProgramDist: empty");
    double total = 0.0;
    for (const auto& [p, w] : entries) {
        if (w < 0.0) throw BadParameter("ProgramDist: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw BadParameter("ProgramDist: weights must sum to 1");
}

ChallengeDist ChallengeDist::uniform(int domain_bits) {
    const double w = 1.0 / static_cast<double>(uint64_t{1} << domain_bits);
    return ChallengeDist{[w](size_t, const Program&, uint64_t) { return w; }};
}

ChallengeDist ChallengeDist::marked(double p, int domain_bits, std::vector<uint64_t> marked_inputs) {
    if (p < 0.0 || p > 1.0) throw BadParameter("ChallengeDist: p outside [0, 1]");
    const double dom = static_cast<double>(uint64_t{1} << domain_bits);
    auto marks = std::make_shared<const std::vector<uint64_t>>(std::move(marked_inputs));
    return ChallengeDist{[p, dom, marks](size_t entry, const Program&, uint64_t x) {
        if (entry >= marks->size()) throw BadParameter("ChallengeDist: entry index out of range");
        if (x == (*marks)[entry]) return p;
        if (dom <= 1.0) return 0.0;
        return (1.0 - p) / (dom - 1.0);
    }};
}

double trivial_guess_prob(const ProgramDist& programs, const ChallengeDist& challenge) {
    programs.validate();
    const int domain_bits = programs.entries.front().first.domain_bits;
    for (const auto& [p, w] : programs.entries) {
        if (p.domain_bits != domain_bits) throw BadParameter("trivial_guess_prob: mixed domains");
    }
    double total = 0.0;
    for (uint64_t x = 0; x < (uint64_t{1} << domain_bits); ++x) {
        std::map<uint64_t, double> mass;  // joint Pr[P(x) = y, challenge = x]
        for (size_t e = 0; e < programs.entries.size(); ++e) {
            const auto& [p, w] = programs.entries[e];
            mass[p.eval(x)] += w * challenge.weight(e, p, x);
        }
        double best = 0.0;
        for (const auto& [y, m] : mass) best = std::max(best, m);
        total += best;
    }
    return total;
}

}  // namespace revoq
