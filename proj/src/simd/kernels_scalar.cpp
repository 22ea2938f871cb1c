#include "patcorp/simd_kernels.hpp"

#include "patcorp/hash64.hpp"

namespace patcorp::simd {

void minhash_fold_scalar(const std::uint64_t* shingles, std::size_t count,
                         const std::uint64_t* seeds, std::size_t num_hashes,
                         std::uint64_t* sig) {
    for (std::size_t s = 0; s < count; ++s) {
        const std::uint64_t x = shingles[s];
        for (std::size_t i = 0; i < num_hashes; ++i) {
            const std::uint64_t h = mix64(x ^ seeds[i]);
            if (h < sig[i]) sig[i] = h;
        }
    }
}

namespace {
inline bool is_ws_byte(unsigned char c) {
    return c == 0x20 || (c >= 0x09 && c <= 0x0d);
}
}  // namespace

std::size_t ws_token_count_scalar(const char* data, std::size_t len) {
    std::size_t tokens = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < len; ++i) {
        const bool ws = is_ws_byte(static_cast<unsigned char>(data[i]));
        if (!ws && !in_token) ++tokens;
        in_token = !ws;
    }
    return tokens;
}

}  // namespace patcorp::simd
