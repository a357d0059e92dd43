#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "revoq/perm.hpp"
#include "revoq/qstate.hpp"
#include "revoq/rng.hpp"

namespace revoq {

enum class PermBackend { kKeyed, kExplicit };

PermBackend backend_from_string(const std::string& name);
std::string to_string(PermBackend b);

/// Multi-copy revocable encryption over {0,1}^m messages. The ciphertext's
/// quantum payload is k identical copies of the subset state over
/// S_y = { phi(x || y) : x in {0,1}^n }, with the message hidden behind the
/// classical pad y xor mu. Basis-string convention: index = (x << m) | y.
struct RevEncParams {
    int n;  // subset exponent: |S_y| = 2^n
    int m;  // message and pad bits
    int k;  // ciphertext copies
    PermBackend backend = PermBackend::kKeyed;

    RevEncParams(int n, int m, int k, PermBackend backend = PermBackend::kKeyed);

    int total_bits() const { return n + m; }
};

struct RevEncSecretKey {
    PermBackend backend;
    std::optional<PermKey> key;  // keyed backend only
    std::shared_ptr<const Permutation> perm;
};

struct VerificationKey {
    uint64_t y;  // m bits
    int m;
};

struct Ciphertext {
    DenseState copies;       // k copies over k*(n+m) qubits
    DenseState single_copy;  // one copy over n+m qubits
    uint64_t pad;            // y xor mu
    int k;
};

RevEncSecretKey keygen(const RevEncParams& params, SplitRng& rng);

/// Wrap a fixed permutation as a secret key (backend-equivalence harness).
RevEncSecretKey secret_key_from_perm(std::shared_ptr<const Permutation> perm, PermBackend backend);

/// The subset S_y = { phi(x || y) } as a state.
SubsetState subset_for(const RevEncSecretKey& sk, const VerificationKey& vk,
                       const RevEncParams& params);

std::pair<Ciphertext, VerificationKey> encrypt(const RevEncSecretKey& sk, uint64_t message,
                                               const RevEncParams& params, SplitRng& rng);

/// Invert the permutation coherently on one ciphertext copy, measure, and
/// unmask the low m bits. Total on any input state of the right width.
uint64_t decrypt(const RevEncSecretKey& sk, const DenseState& single_copy, uint64_t pad,
                 const RevEncParams& params, SplitRng& rng);

struct RevokeResult {
    bool accepted;
    double accept_prob;  // exact |<S_y|^{(x)k} returned>|^2
    DenseState post_state;
};

/// Projective check { |S_y><S_y|^{(x)k}, I - ... } on the returned register.
RevokeResult revoke(const RevEncSecretKey& sk, const VerificationKey& vk,
                    const RevEncParams& params, const DenseState& returned, SplitRng& rng);

}  // namespace revoq
