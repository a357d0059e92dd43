#include "revoq/pointfn.hpp"

#include "revoq/errors.hpp"
#include "revoq/hash.hpp"

namespace revoq {

RandomOracle::RandomOracle(int input_bits, int output_bits, SplitRng rng)
    : input_bits_(input_bits), output_bits_(output_bits), rng_(rng) {
    if (input_bits < 1 || input_bits > 63) throw BadParameter("RandomOracle: input bits outside [1, 63]");
    if (output_bits < 1 || output_bits > 63) throw BadParameter("RandomOracle: output bits outside [1, 63]");
}

uint64_t RandomOracle::query(uint64_t x) {
    if (x >= (uint64_t{1} << input_bits_)) throw BadParameter("RandomOracle: input out of range");
    ++queries_;
    auto it = table_.find(x);
    if (it != table_.end()) return it->second;
    const uint64_t v = rng_.bits(output_bits_);
    table_.emplace(x, v);
    return v;
}

PfParams::PfParams(int lambda_in, int ell_in, int n, int k, PermBackend backend)
    : lambda(lambda_in), ell(ell_in), base(n, lambda_in, k, backend) {
    if (lambda < 1 || lambda > 31) throw BadParameter("PfParams: lambda outside [1, 31]");
    if (ell < 1 || ell > 63) throw BadParameter("PfParams: ell outside [1, 63]");
    if (2 * lambda > 63) throw BadParameter("PfParams: oracle input too wide");
}

RandomOracle PfParams::make_oracle(SplitRng rng) const {
    return RandomOracle(2 * lambda, ell, rng);
}

std::pair<HybridCiphertext, VerificationKey> hybrid_encrypt(const RevEncSecretKey& sk,
                                                            uint64_t message,
                                                            const RevEncParams& params,
                                                            SplitRng& rng) {
    const uint64_t r = rng.bits(params.m);
    auto [ct, vk] = encrypt(sk, r, params, rng);
    return {HybridCiphertext{std::move(ct), r ^ message}, vk};
}

uint64_t hybrid_decrypt(const RevEncSecretKey& sk, const HybridCiphertext& ct,
                        const RevEncParams& params, SplitRng& rng) {
    const uint64_t r = decrypt(sk, ct.inner.single_copy, ct.inner.pad, params, rng);
    return r ^ ct.otp;
}

RevEncSecretKey derive_base_key(uint64_t wkd_key, const PfParams& params) {
    // Expand the lambda-bit key into permutation key material with SipHash
    // under a fixed domain-separation key.
    static const std::vector<uint8_t> kKdfKey = {'r', 'e', 'v', 'o', 'q', '-', 'k', 'd',
                                                 'f', '-', 'v', '1', '.', '0', '.', '0'};
    std::vector<uint8_t> bytes;
    for (uint64_t block = 0; block < 2; ++block) {
        const uint64_t h = siphash_words(kKdfKey, {wkd_key, block});
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<uint8_t>(h >> (8 * b)));
    }
    if (params.base.backend == PermBackend::kKeyed) {
        RevEncSecretKey sk;
        sk.backend = PermBackend::kKeyed;
        sk.key = PermKey(bytes, params.base.total_bits());
        sk.perm = std::make_shared<FeistelPerm>(*sk.key);
        return sk;
    }
    const uint64_t seed = siphash_words(kKdfKey, {wkd_key, uint64_t{2}});
    SplitRng perm_rng(seed);
    return secret_key_from_perm(
        std::make_shared<ExplicitPerm>(sample_random_perm(params.base.total_bits(), perm_rng)),
        PermBackend::kExplicit);
}

std::pair<WkdCiphertext, VerificationKey> wkd_encrypt(uint64_t sk, uint64_t message,
                                                      RandomOracle& oracle,
                                                      const PfParams& params, SplitRng& rng) {
    if (message >= (uint64_t{1} << params.lambda)) throw BadParameter("wkd_encrypt: message out of range");
    const uint64_t x = rng.bits(params.lambda);
    const RevEncSecretKey base_sk = derive_base_key(sk, params);
    auto [inner, vk] = hybrid_encrypt(base_sk, x, params.base, rng);
    const uint64_t tag = oracle.query((sk << params.lambda) | x);
    return {WkdCiphertext{std::move(inner), tag, x ^ message}, vk};
}

std::optional<uint64_t> wkd_decrypt(uint64_t sk, const WkdCiphertext& ct, RandomOracle& oracle,
                                    const PfParams& params, SplitRng& rng) {
    const RevEncSecretKey base_sk = derive_base_key(sk, params);
    const uint64_t x_prime = hybrid_decrypt(base_sk, ct.inner, params.base, rng);
    if (oracle.query((sk << params.lambda) | x_prime) != ct.tag) return std::nullopt;
    return x_prime ^ ct.mask;
}

std::pair<CompiledPointFunction, PfVerificationKey> pf_compile(const PointFunction& pf,
                                                               const PfParams& params,
                                                               RandomOracle& oracle,
                                                               SplitRng& rng) {
    if (pf.marked >= (uint64_t{1} << params.lambda)) throw BadParameter("pf_compile: marked input out of range");
    auto [ct, vk] = wkd_encrypt(pf.marked, pf.payload, oracle, params, rng);
    return {CompiledPointFunction{std::move(ct), params}, PfVerificationKey{pf.marked, vk.y}};
}

uint64_t pf_eval(CompiledPointFunction& cp, uint64_t x, RandomOracle& oracle, SplitRng& rng) {
    const PfParams& params = cp.params;
    const RevEncParams& base = params.base;
    const RevEncSecretKey candidate = derive_base_key(x, params);

    // Decrypt the first copy: measure it, invert the candidate permutation on
    // the outcome, unmask.
    DenseState& copies = cp.ct.inner.inner.copies;
    auto [measured, collapsed] =
        measure_register(copies, base.k, base.total_bits(), 0, rng);
    const uint64_t y_prime = candidate.perm->inverse(measured) & ((uint64_t{1} << base.m) - 1);
    const uint64_t r_prime = y_prime ^ cp.ct.inner.inner.pad;
    const uint64_t x_prime = r_prime ^ cp.ct.inner.otp;

    if (oracle.query((x << params.lambda) | x_prime) != cp.ct.tag) {
        // Bottom branch: rewind, leaving the compiled state untouched.
        return 0;
    }
    copies = std::move(collapsed);
    return x_prime ^ cp.ct.mask;
}

RevokeResult pf_revoke(const PfVerificationKey& vk, const PfParams& params,
                       const DenseState& returned, SplitRng& rng) {
    const RevEncSecretKey base_sk = derive_base_key(vk.marked, params);
    return revoke(base_sk, VerificationKey{vk.inner_y, params.base.m}, params.base, returned, rng);
}

bool wkd_wrong_key_trial(const PfParams& params, SplitRng& rng) {
    RandomOracle oracle = params.make_oracle(rng.split(0x6f7261636c65));
    const uint64_t sk = rng.bits(params.lambda);
    uint64_t sk_wrong = rng.bits(params.lambda);
    while (sk_wrong == sk) sk_wrong = rng.bits(params.lambda);
    const uint64_t message = rng.bits(params.lambda);
    auto [ct, vk] = wkd_encrypt(sk, message, oracle, params, rng);
    return wkd_decrypt(sk_wrong, ct, oracle, params, rng).has_value();
}

}  // namespace revoq
