#include "revoq/revenc.hpp"

#include <algorithm>

#include "revoq/errors.hpp"

namespace revoq {

PermBackend backend_from_string(const std::string& name) {
    if (name == "keyed") return PermBackend::kKeyed;
    if (name == "explicit") return PermBackend::kExplicit;
    throw BadParameter("backend: expected 'keyed' or 'explicit', got '" + name + "'");
}

std::string to_string(PermBackend b) {
    return b == PermBackend::kKeyed ? "keyed" : "explicit";
}

RevEncParams::RevEncParams(int n_in, int m_in, int k_in, PermBackend backend_in)
    : n(n_in), m(m_in), k(k_in), backend(backend_in) {
    if (n < 1) throw BadParameter("RevEncParams: n must be >= 1");
    if (m < 1) throw BadParameter("RevEncParams: m must be >= 1");
    if (k < 1) throw BadParameter("RevEncParams: k must be >= 1");
    if (int64_t{k} * (n + m) > 20) {
        throw DimensionTooLarge("RevEncParams: k*(n+m) exceeds 20 qubits");
    }
}

RevEncSecretKey keygen(const RevEncParams& params, SplitRng& rng) {
    RevEncSecretKey sk;
    sk.backend = params.backend;
    if (params.backend == PermBackend::kKeyed) {
        sk.key = PermKey::sample(params.total_bits(), rng);
        sk.perm = std::make_shared<FeistelPerm>(*sk.key);
    } else {
        sk.perm = std::make_shared<ExplicitPerm>(sample_random_perm(params.total_bits(), rng));
    }
    return sk;
}

RevEncSecretKey secret_key_from_perm(std::shared_ptr<const Permutation> perm,
                                     PermBackend backend) {
    RevEncSecretKey sk;
    sk.backend = backend;
    sk.perm = std::move(perm);
    return sk;
}

SubsetState subset_for(const RevEncSecretKey& sk, const VerificationKey& vk,
                       const RevEncParams& params) {
    std::vector<uint64_t> support;
    support.reserve(uint64_t{1} << params.n);
    for (uint64_t x = 0; x < (uint64_t{1} << params.n); ++x) {
        support.push_back(sk.perm->forward((x << params.m) | vk.y));
    }
    std::sort(support.begin(), support.end());
    return SubsetState(params.total_bits(), std::move(support));
}

std::pair<Ciphertext, VerificationKey> encrypt(const RevEncSecretKey& sk, uint64_t message,
                                               const RevEncParams& params, SplitRng& rng) {
    if (message >= (uint64_t{1} << params.m)) throw BadParameter("encrypt: message out of range");
    VerificationKey vk{rng.bits(params.m), params.m};
    const DenseState one = subset_to_dense(subset_for(sk, vk, params));
    Ciphertext ct{
        tensor_power(one, params.k),
        one,
        vk.y ^ message,
        params.k,
    };
    return {std::move(ct), vk};
}

uint64_t decrypt(const RevEncSecretKey& sk, const DenseState& single_copy, uint64_t pad,
                 const RevEncParams& params, SplitRng& rng) {
    const DenseState inverted = apply_perm_inverse_unitary(*sk.perm, single_copy);
    const uint64_t outcome = measure_computational(inverted, rng);
    const uint64_t y_prime = outcome & ((uint64_t{1} << params.m) - 1);
    return y_prime ^ pad;
}

RevokeResult revoke(const RevEncSecretKey& sk, const VerificationKey& vk,
                    const RevEncParams& params, const DenseState& returned, SplitRng& rng) {
    const DenseState target =
        tensor_power(subset_to_dense(subset_for(sk, vk, params)), params.k);
    const double p = project_accept_prob(returned, target);
    auto [outcome, post] = project_and_collapse(returned, target, rng);
    return RevokeResult{outcome == MeasureOutcome::kAccept, p, std::move(post)};
}

}  // namespace revoq
