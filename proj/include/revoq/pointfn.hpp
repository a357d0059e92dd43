#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "revoq/revenc.hpp"
#include "revoq/rng.hpp"

namespace revoq {

/// Lazily sampled random function {0,1}^input_bits -> {0,1}^output_bits.
/// Repeated queries return identical values; fresh inputs get independent
/// uniform outputs from the oracle's own stream. Query counted.
class RandomOracle {
public:
    RandomOracle(int input_bits, int output_bits, SplitRng rng);

    uint64_t query(uint64_t x);

    int input_bits() const { return input_bits_; }
    int output_bits() const { return output_bits_; }
    uint64_t queries() const { return queries_; }
    void reset_counter() { queries_ = 0; }

private:
    int input_bits_;
    int output_bits_;
    SplitRng rng_;
    std::unordered_map<uint64_t, uint64_t> table_;
    uint64_t queries_ = 0;
};

/// Parameters of the point-function stack. The underlying encryption carries
/// lambda-bit messages (base.m = lambda); keys of the wrong-key-detection
/// layer are lambda-bit strings.
struct PfParams {
    int lambda;  // marked-input / payload / WKD-key bits
    int ell;     // random-oracle tag bits (default 4*lambda)
    RevEncParams base;

    PfParams(int lambda, int ell, int n, int k, PermBackend backend = PermBackend::kKeyed);

    RandomOracle make_oracle(SplitRng rng) const;
};

struct HybridCiphertext {
    Ciphertext inner;  // encryption of a fresh random r
    uint64_t otp;      // r xor message
};

std::pair<HybridCiphertext, VerificationKey> hybrid_encrypt(const RevEncSecretKey& sk,
                                                            uint64_t message,
                                                            const RevEncParams& params,
                                                            SplitRng& rng);

uint64_t hybrid_decrypt(const RevEncSecretKey& sk, const HybridCiphertext& ct,
                        const RevEncParams& params, SplitRng& rng);

/// Deterministic lambda-bit-key -> permutation-key derivation, so wrong-key
/// decryption is well defined for every candidate key.
RevEncSecretKey derive_base_key(uint64_t wkd_key, const PfParams& params);

struct WkdCiphertext {
    HybridCiphertext inner;  // hybrid encryption of a fresh x
    uint64_t tag;            // H(sk || x), ell bits
    uint64_t mask;           // x xor message
};

std::pair<WkdCiphertext, VerificationKey> wkd_encrypt(uint64_t sk, uint64_t message,
                                                      RandomOracle& oracle,
                                                      const PfParams& params, SplitRng& rng);

/// Decryption under a candidate key. Bottom is an out-of-band value, never a
/// bit pattern. Measures (collapses) nothing outside the supplied copy.
std::optional<uint64_t> wkd_decrypt(uint64_t sk, const WkdCiphertext& ct, RandomOracle& oracle,
                                    const PfParams& params, SplitRng& rng);

struct PointFunction {
    uint64_t marked;   // y
    uint64_t payload;  // m
};

struct PfVerificationKey {
    uint64_t marked;  // doubles as the WKD secret key
    uint64_t inner_y;
};

struct CompiledPointFunction {
    WkdCiphertext ct;
    PfParams params;
};

std::pair<CompiledPointFunction, PfVerificationKey> pf_compile(const PointFunction& pf,
                                                               const PfParams& params,
                                                               RandomOracle& oracle,
                                                               SplitRng& rng);

/// Evaluate at x: attempt WKD decryption with key x on the first ciphertext
/// copy. A bottom outcome leaves the compiled state untouched (the check is
/// rewound); a non-bottom outcome measures the used copy and returns the
/// decrypted payload.
uint64_t pf_eval(CompiledPointFunction& cp, uint64_t x, RandomOracle& oracle, SplitRng& rng);

RevokeResult pf_revoke(const PfVerificationKey& vk, const PfParams& params,
                       const DenseState& returned, SplitRng& rng);

/// One wrong-key trial for the WKD property: fresh keys sk != sk', fresh
/// oracle, encrypt under sk, decrypt under sk'. Returns true when the wrong
/// key was (falsely) accepted.
bool wkd_wrong_key_trial(const PfParams& params, SplitRng& rng);

}  // namespace revoq
