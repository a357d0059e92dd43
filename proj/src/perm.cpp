#include "revoq/perm.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "revoq/errors.hpp"
#include "revoq/hash.hpp"

namespace revoq {

PermKey::PermKey(std::vector<uint8_t> bytes, int width_in)
    : key_bytes(std::move(bytes)), width(width_in) {
    if (key_bytes.size() < 16) throw BadParameter("PermKey: key must be at least 16 bytes");
    if (width < 1 || width > 64) throw BadParameter("PermKey: width outside [1, 64]");
}

PermKey PermKey::sample(int width, SplitRng& rng) { return PermKey(rng.bytes(16), width); }

PermKey PermKey::from_hex(const std::string& hex, int width) {
    return PermKey(hex_to_bytes(hex), width);
}

ExplicitPerm::ExplicitPerm(int width, std::vector<uint32_t> table)
    : width_(width), table_(std::move(table)) {
    if (width < 1 || width > 20) throw DimensionTooLarge("ExplicitPerm: width outside [1, 20]");
    const uint64_t dom = uint64_t{1} << width;
    if (table_.size() != dom) throw BadParameter("ExplicitPerm: table size mismatch");
    inverse_.assign(dom, UINT32_MAX);
    for (uint64_t i = 0; i < dom; ++i) {
        const uint32_t img = table_[i];
        if (img >= dom || inverse_[img] != UINT32_MAX) {
            throw BadParameter("ExplicitPerm: table is not a bijection");
        }
        inverse_[img] = static_cast<uint32_t>(i);
    }
}

ExplicitPerm ExplicitPerm::identity(int width) {
    std::vector<uint32_t> t(uint64_t{1} << width);
    std::iota(t.begin(), t.end(), 0);
    return ExplicitPerm(width, std::move(t));
}

ExplicitPerm ExplicitPerm::tabulate(const Permutation& p) {
    if (p.width() > 20) throw DimensionTooLarge("tabulate: width outside [1, 20]");
    std::vector<uint32_t> t(p.domain_size());
    for (uint64_t i = 0; i < t.size(); ++i) t[i] = static_cast<uint32_t>(p.forward(i));
    return ExplicitPerm(p.width(), std::move(t));
}

ExplicitPerm sample_random_perm(int width, SplitRng& rng) {
    if (width < 1 || width > 20) throw DimensionTooLarge("sample_random_perm: width outside [1, 20]");
    const uint64_t dom = uint64_t{1} << width;
    std::vector<uint32_t> t(dom);
    std::iota(t.begin(), t.end(), 0);
    for (uint64_t i = dom - 1; i > 0; --i) {
        const uint64_t j = rng.below(i + 1);
        std::swap(t[i], t[j]);
    }
    return ExplicitPerm(width, std::move(t));
}

FeistelPerm::FeistelPerm(PermKey key, int rounds) : key_(std::move(key)), rounds_(rounds) {
    if (key_.width < 2) throw BadParameter("FeistelPerm: width must be at least 2");
    lo_bits_ = key_.width / 2;
    hi_bits_ = key_.width - lo_bits_;
}

uint64_t FeistelPerm::round_mask(int round, uint64_t half, int out_bits) const {
    const uint64_t h = siphash_words(key_.key_bytes, {static_cast<uint64_t>(round), half});
    return out_bits == 64 ? h : (h & ((uint64_t{1} << out_bits) - 1));
}

// Alternating-half Feistel: even rounds mix the high half with a keyed hash
// of the low half, odd rounds the reverse. Trivially invertible for any
// (odd or even) width split.
uint64_t FeistelPerm::forward(uint64_t x) const {
    uint64_t lo = x & ((uint64_t{1} << lo_bits_) - 1);
    uint64_t hi = x >> lo_bits_;
    for (int r = 0; r < rounds_; ++r) {
        if (r % 2 == 0) {
            hi ^= round_mask(r, lo, hi_bits_);
        } else {
            lo ^= round_mask(r, hi, lo_bits_);
        }
    }
    return (hi << lo_bits_) | lo;
}

uint64_t FeistelPerm::inverse(uint64_t y) const {
    uint64_t lo = y & ((uint64_t{1} << lo_bits_) - 1);
    uint64_t hi = y >> lo_bits_;
    for (int r = rounds_ - 1; r >= 0; --r) {
        if (r % 2 == 0) {
            hi ^= round_mask(r, lo, hi_bits_);
        } else {
            lo ^= round_mask(r, hi, lo_bits_);
        }
    }
    return (hi << lo_bits_) | lo;
}

std::shared_ptr<const Permutation> feistel_perm(const PermKey& key) {
    return std::make_shared<FeistelPerm>(key);
}

DenseState apply_perm_unitary(const Permutation& perm, const DenseState& state) {
    const int64_t dim = int64_t{1} << perm.width();
    if (state.dim() != dim) throw DimensionMismatch("apply_perm_unitary: dims differ");
    Amplitudes out = Amplitudes::Zero(dim);
    for (int64_t i = 0; i < dim; ++i) {
        out(static_cast<int64_t>(perm.forward(static_cast<uint64_t>(i)))) = state.amp(i);
    }
    return DenseState(std::move(out));
}

DenseState apply_perm_inverse_unitary(const Permutation& perm, const DenseState& state) {
    const int64_t dim = int64_t{1} << perm.width();
    if (state.dim() != dim) throw DimensionMismatch("apply_perm_inverse_unitary: dims differ");
    Amplitudes out = Amplitudes::Zero(dim);
    for (int64_t i = 0; i < dim; ++i) {
        out(static_cast<int64_t>(perm.inverse(static_cast<uint64_t>(i)))) = state.amp(i);
    }
    return DenseState(std::move(out));
}

}  // namespace revoq
