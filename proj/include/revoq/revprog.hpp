#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "revoq/perm.hpp"
#include "revoq/revenc.hpp"
#include "revoq/rng.hpp"

namespace revoq {

/// Finite program as an explicit truth table.
struct Program {
    int domain_bits;
    int range_bits;
    std::vector<uint64_t> table;  // table[x] = P(x), size 2^domain_bits

    Program(int domain_bits, int range_bits, std::vector<uint64_t> table);

    uint64_t eval(uint64_t x) const;

    /// Multi-bit point function: marked input -> payload, everything else 0.
    static Program point_function(int bits, uint64_t marked, uint64_t payload);
    static Program random_table(int domain_bits, int range_bits, SplitRng& rng);
};

/// Checking oracle O(x, s) = P(x) when s is in the compiled subset, else 0.
using ProgramOracle = CountedOracle<std::pair<uint64_t, uint64_t>, uint64_t>;

struct ProgramVerificationKey {
    uint64_t y;
    int m;
    std::shared_ptr<const Permutation> perm;
};

struct CompiledProgram {
    Program program;
    SubsetState state;            // |S_y> over n+m bits
    std::shared_ptr<ProgramOracle> oracle;
    RevEncParams params;
};

struct RevProgParams {
    RevEncParams base;  // n, m, k, backend for the carrier subset state

    explicit RevProgParams(RevEncParams base) : base(base) {}
};

std::pair<CompiledProgram, ProgramVerificationKey> compile(const Program& program,
                                                           const RevProgParams& params,
                                                           SplitRng& rng);

/// Fast path: the honest compiled state's support lies inside S, so the
/// ancilla outcome is P(x) deterministically.
uint64_t eval(const CompiledProgram& cp, uint64_t x);

/// Slow path for tests: coherently evaluate the oracle over the dense state
/// and measure the ancilla.
uint64_t eval_coherent(const CompiledProgram& cp, uint64_t x, SplitRng& rng);

/// Projective revocation of k returned copies; delegates to the encryption
/// layer's check on |S_y>^{(x)k}.
RevokeResult revoke(const ProgramVerificationKey& vk, const RevEncParams& params,
                    const DenseState& returned, SplitRng& rng);

/// Explicit weighted program family.
struct ProgramDist {
    std::vector<std::pair<Program, double>> entries;  // weights sum to 1

    void validate() const;
};

/// Challenge distribution, possibly depending on the sampled program. The
/// entry index identifies the program within its family, which matters when
/// two entries share a truth table (a zero-payload point function still has a
/// definite marked input).
struct ChallengeDist {
    // weight(entry, P, x): probability of challenge x for family entry.
    std::function<double(size_t, const Program&, uint64_t)> weight;

    static ChallengeDist uniform(int domain_bits);
    /// Challenge equals marked_inputs[entry] with probability p, the rest of
    /// the domain uniformly.
    static ChallengeDist marked(double p, int domain_bits, std::vector<uint64_t> marked_inputs);
};

/// Optimal guessing probability sup_g Pr[g(x) = P(x)] computed exactly:
/// sum over x of max_y Pr[P(x) = y and challenge = x].
double trivial_guess_prob(const ProgramDist& programs, const ChallengeDist& challenge);

}  // namespace revoq
