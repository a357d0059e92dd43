#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace revoq {

/// SipHash-2-4 with a 128-bit key. Used as the keyed PRF behind the Feistel
/// rounds, as the key derivation for wrong-key-detection schemes, and as the
/// transcript digest primitive.
uint64_t siphash24(const std::array<uint64_t, 2>& key, std::span<const uint8_t> data);

/// Convenience: hash a small tuple of machine words under a byte-string key.
uint64_t siphash_words(const std::vector<uint8_t>& key_bytes, std::initializer_list<uint64_t> words);

/// FNV-1a over a string, for order-stable digests of transcript lines.
uint64_t fnv1a64(const std::string& data);

std::string to_hex(uint64_t v);

std::vector<uint8_t> hex_to_bytes(const std::string& hex);
std::string bytes_to_hex(const std::vector<uint8_t>& bytes);

}  // namespace revoq
