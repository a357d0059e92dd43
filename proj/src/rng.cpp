#include "revoq/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "revoq/errors.hpp"

namespace revoq {

namespace {

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SplitRng::SplitRng(uint64_t seed) : seed_(seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
}

uint64_t SplitRng::next_u64() {
    const uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
}

double SplitRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t SplitRng::below(uint64_t bound) {
    if (bound == 0) throw BadParameter("below: bound must be positive");
    if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

bool SplitRng::bernoulli(double p) { return next_double() < p; }

uint64_t SplitRng::bits(int w) {
    if (w < 0 || w > 64) throw BadParameter("bits: width out of range");
    if (w == 0) return 0;
    return next_u64() >> (64 - w);
}

SplitRng SplitRng::split(uint64_t stream) const {
    uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    uint64_t derived = splitmix64(x);
    derived ^= splitmix64(x);
    return SplitRng(derived);
}

std::vector<uint8_t> SplitRng::bytes(size_t count) {
    std::vector<uint8_t> out(count);
    size_t i = 0;
    while (i < count) {
        uint64_t v = next_u64();
        for (int b = 0; b < 8 && i < count; ++b, ++i) {
            out[i] = static_cast<uint8_t>(v >> (8 * b));
        }
    }
    return out;
}

std::vector<uint64_t> SplitRng::distinct_sorted(uint64_t domain, uint64_t count) {
    if (count > domain) throw BadParameter("distinct_sorted: count exceeds domain");
    // Dense Fisher-Yates when the subset is a large fraction, rejection otherwise.
    std::vector<uint64_t> out;
    out.reserve(count);
    if (domain <= 1024 || count * 3 > domain) {
        std::vector<uint64_t> pool(domain);
        for (uint64_t i = 0; i < domain; ++i) pool[i] = i;
        for (uint64_t i = 0; i < count; ++i) {
            uint64_t j = i + below(domain - i);
            std::swap(pool[i], pool[j]);
        }
        out.assign(pool.begin(), pool.begin() + count);
    } else {
        std::unordered_set<uint64_t> seen;
        while (out.size() < count) {
            uint64_t v = below(domain);
            if (seen.insert(v).second) out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace revoq
