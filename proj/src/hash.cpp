#include "revoq/hash.hpp"

#include <bit>
#include <cstring>

#include "revoq/errors.hpp"

namespace revoq {

namespace {

inline void sipround(uint64_t& v0, uint64_t& v1, uint64_t& v2, uint64_t& v3) {
    v0 += v1;
    v1 = std::rotl(v1, 13);
    v1 ^= v0;
    v0 = std::rotl(v0, 32);
    v2 += v3;
    v3 = std::rotl(v3, 16);
    v3 ^= v2;
    v0 += v3;
    v3 = std::rotl(v3, 21);
    v3 ^= v0;
    v2 += v1;
    v1 = std::rotl(v1, 17);
    v1 ^= v2;
    v2 = std::rotl(v2, 32);
}

inline uint64_t read_le64(const uint8_t* p) {
    uint64_t v;
    std::memcpy(&v, p, 8);
    return v;  // little-endian hosts only; fine for this artifact
}

}  // namespace

uint64_t siphash24(const std::array<uint64_t, 2>& key, std::span<const uint8_t> data) {
    uint64_t v0 = key[0] ^ 0x736f6d6570736575ULL;
    uint64_t v1 = key[1] ^ 0x646f72616e646f6dULL;
    uint64_t v2 = key[0] ^ 0x6c7967656e657261ULL;
    uint64_t v3 = key[1] ^ 0x7465646279746573ULL;

    const size_t n = data.size();
    const size_t full = n / 8;
    for (size_t i = 0; i < full; ++i) {
        uint64_t m = read_le64(data.data() + 8 * i);
        v3 ^= m;
        sipround(v0, v1, v2, v3);
        sipround(v0, v1, v2, v3);
        v0 ^= m;
    }
    uint64_t last = static_cast<uint64_t>(n & 0xff) << 56;
    for (size_t i = 0; i < (n & 7); ++i) {
        last |= static_cast<uint64_t>(data[full * 8 + i]) << (8 * i);
    }
    v3 ^= last;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    v0 ^= last;

    v2 ^= 0xff;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    return v0 ^ v1 ^ v2 ^ v3;
}

uint64_t siphash_words(const std::vector<uint8_t>& key_bytes, std::initializer_list<uint64_t> words) {
    if (key_bytes.size() < 16) throw BadParameter("siphash_words: key must be at least 16 bytes");
    std::array<uint64_t, 2> key{read_le64(key_bytes.data()), read_le64(key_bytes.data() + 8)};
    std::vector<uint8_t> buf;
    buf.reserve(8 * words.size());
    for (uint64_t w : words) {
        for (int b = 0; b < 8; ++b) buf.push_back(static_cast<uint8_t>(w >> (8 * b)));
    }
    return siphash24(key, buf);
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::vector<uint8_t> hex_to_bytes(const std::string& hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw BadParameter("hex_to_bytes: invalid hex digit");
    };
    if (hex.size() % 2 != 0) throw BadParameter("hex_to_bytes: odd-length hex string");
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::string bytes_to_hex(const std::vector<uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

}  // namespace revoq
