#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "revoq/qstate.hpp"
#include "revoq/rng.hpp"

namespace revoq {

/// Keyed-permutation key material: at least 16 opaque bytes plus the width of
/// the permuted domain.
struct PermKey {
    std::vector<uint8_t> key_bytes;
    int width;

    PermKey(std::vector<uint8_t> bytes, int width);

    static PermKey sample(int width, SplitRng& rng);
    static PermKey from_hex(const std::string& hex, int width);
};

/// Bijection on {0,1}^width with forward and inverse evaluation.
class Permutation {
public:
    virtual ~Permutation() = default;
    virtual int width() const = 0;
    virtual uint64_t forward(uint64_t x) const = 0;
    virtual uint64_t inverse(uint64_t y) const = 0;

    uint64_t domain_size() const { return uint64_t{1} << width(); }
};

/// Tabulated bijection; the "perfectly random permutation" backend.
class ExplicitPerm final : public Permutation {
public:
    ExplicitPerm(int width, std::vector<uint32_t> table);

    int width() const override { return width_; }
    uint64_t forward(uint64_t x) const override { return table_[x]; }
    uint64_t inverse(uint64_t y) const override { return inverse_[y]; }

    const std::vector<uint32_t>& table() const { return table_; }

    static ExplicitPerm identity(int width);
    /// Tabulate any permutation (used for backend-equivalence checks).
    static ExplicitPerm tabulate(const Permutation& p);

private:
    int width_;
    std::vector<uint32_t> table_;
    std::vector<uint32_t> inverse_;
};

/// Uniformly random bijection via Fisher-Yates over the full table.
ExplicitPerm sample_random_perm(int width, SplitRng& rng);

/// Keyed bijection: 4-round Feistel network whose round function is
/// SipHash-2-4 over (round index || half block). A correctness stand-in for a
/// QPRP; no quantum-security claim attached.
class FeistelPerm final : public Permutation {
public:
    FeistelPerm(PermKey key, int rounds = 4);

    int width() const override { return key_.width; }
    uint64_t forward(uint64_t x) const override;
    uint64_t inverse(uint64_t y) const override;

    const PermKey& key() const { return key_; }

private:
    uint64_t round_mask(int round, uint64_t half, int out_bits) const;

    PermKey key_;
    int rounds_;
    int lo_bits_;  // right half width (floor(w/2))
    int hi_bits_;  // left half width
};

/// Construct a permutation handle by backend name.
std::shared_ptr<const Permutation> feistel_perm(const PermKey& key);

/// Basis-relabeling unitary: amplitude at i moves to index perm(i).
DenseState apply_perm_unitary(const Permutation& perm, const DenseState& state);

/// Inverse relabeling: amplitude at i moves to perm^{-1}(i).
DenseState apply_perm_inverse_unitary(const Permutation& perm, const DenseState& state);

/// Query-counted wrapper around a point function. One evaluation, one count;
/// nested wrappers each count their own layer.
template <class In, class Out>
class CountedOracle {
public:
    explicit CountedOracle(std::function<Out(In)> fn) : fn_(std::move(fn)) {}

    Out operator()(In x) {
        ++queries_;
        return fn_(x);
    }

    uint64_t queries() const { return queries_; }
    void reset() { queries_ = 0; }

private:
    std::function<Out(In)> fn_;
    uint64_t queries_ = 0;
};

using MembershipOracle = CountedOracle<uint64_t, bool>;
using FunctionOracle = CountedOracle<uint64_t, uint64_t>;

/// Counted handle to a permutation. Point queries and whole-state unitary
/// applications each cost exactly one query.
class CountedPerm {
public:
    explicit CountedPerm(std::shared_ptr<const Permutation> p) : perm_(std::move(p)) {}

    uint64_t forward(uint64_t x) {
        ++queries_;
        return perm_->forward(x);
    }
    uint64_t inverse(uint64_t y) {
        ++queries_;
        return perm_->inverse(y);
    }
    DenseState apply_inverse_unitary(const DenseState& s) {
        ++queries_;
        return apply_perm_inverse_unitary(*perm_, s);
    }

    int width() const { return perm_->width(); }
    uint64_t queries() const { return queries_; }
    void reset() { queries_ = 0; }

private:
    std::shared_ptr<const Permutation> perm_;
    uint64_t queries_ = 0;
};

}  // namespace revoq
