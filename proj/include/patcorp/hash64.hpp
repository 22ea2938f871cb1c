#pragma once

// 64-bit hashing primitives shared across the pipeline: shingle hashing,
// MinHash seed mixing, LSH band keys and file digests.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace patcorp {

// splitmix64 finalizer. Bijective for fixed xor-seed, which keeps per-seed
// MinHash mixers collision-free over distinct inputs.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// splitmix64 sequence step; used to derive seed families from a master seed.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

// MurmurHash64A-style chained multiply hash. The input length is folded in
// at finalization (not initialization) so the streaming and one-shot forms
// produce identical digests.
std::uint64_t hash_bytes(const void* data, std::size_t len, std::uint64_t seed = 0);

inline std::uint64_t hash_bytes(std::string_view s, std::uint64_t seed = 0) {
    return hash_bytes(s.data(), s.size(), seed);
}

// Streaming digest with the same output as hash_bytes over the concatenated
// input. Used for file/manifest digests; not cryptographic.
class Hash64Stream {
public:
    explicit Hash64Stream(std::uint64_t seed = 0) : seed_(seed) {}

    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    // May be called once; consumes buffered tail bytes.
    std::uint64_t finish();

    std::uint64_t total_bytes() const { return total_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t acc_ = 0;
    std::uint64_t total_ = 0;
    unsigned char tail_[8] = {};
    std::size_t tail_len_ = 0;
    bool started_ = false;
};

}  // namespace patcorp
