// AVX2 variants. This translation unit is compiled with -mavx2 and must only
// be entered through the runtime dispatcher.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "patcorp/hash64.hpp"
#include "patcorp/simd_kernels.hpp"

namespace patcorp::simd {

namespace {

// 64-bit lane-wise multiply from 32-bit products (no _mm256_mullo_epi64
// below AVX-512).
inline __m256i mullo64(__m256i a, __m256i b) {
    const __m256i lo = _mm256_mul_epu32(a, b);
    const __m256i ah_bl = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b);
    const __m256i al_bh = _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32));
    const __m256i hi = _mm256_add_epi64(ah_bl, al_bh);
    return _mm256_add_epi64(lo, _mm256_slli_epi64(hi, 32));
}

inline __m256i mix64_vec(__m256i x) {
    const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xbf58476d1ce4e5b9ULL));
    const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0x94d049bb133111ebULL));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 30));
    x = mullo64(x, c1);
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 27));
    x = mullo64(x, c2);
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 31));
    return x;
}

inline __m256i min_epu64(__m256i a, __m256i b) {
    const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));
    const __m256i a_gt_b = _mm256_cmpgt_epi64(_mm256_xor_si256(a, bias), _mm256_xor_si256(b, bias));
    return _mm256_blendv_epi8(a, b, a_gt_b);
}

}  // namespace

void minhash_fold_avx2(const std::uint64_t* shingles, std::size_t count,
                       const std::uint64_t* seeds, std::size_t num_hashes,
                       std::uint64_t* sig) {
    const std::size_t blocks = num_hashes / 4;
    // Tile over seed blocks so the running minima stay in a register while
    // the (small, cache-resident) shingle array is re-read per block.
    for (std::size_t b = 0; b < blocks; ++b) {
        const __m256i seed4 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(seeds + 4 * b));
        __m256i acc = _mm256_loadu_si256(reinterpret_cast<__m256i*>(sig + 4 * b));
        for (std::size_t s = 0; s < count; ++s) {
            const __m256i x = _mm256_set1_epi64x(static_cast<long long>(shingles[s]));
            const __m256i h = mix64_vec(_mm256_xor_si256(x, seed4));
            acc = min_epu64(acc, h);
        }
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(sig + 4 * b), acc);
    }
    const std::size_t done = blocks * 4;
    if (done < num_hashes) {
        minhash_fold_scalar(shingles, count, seeds + done, num_hashes - done, sig + done);
    }
}

std::size_t ws_token_count_avx2(const char* data, std::size_t len) {
    const __m256i sp = _mm256_set1_epi8(0x20);
    const __m256i tab = _mm256_set1_epi8(0x09);
    const __m256i lf = _mm256_set1_epi8(0x0a);
    const __m256i vt = _mm256_set1_epi8(0x0b);
    const __m256i ff = _mm256_set1_epi8(0x0c);
    const __m256i cr = _mm256_set1_epi8(0x0d);

    std::size_t tokens = 0;
    std::uint32_t prev_nonws = 0;  // bit 0: last byte of previous block was non-ws
    std::size_t i = 0;
    for (; i + 32 <= len; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        __m256i ws = _mm256_cmpeq_epi8(v, sp);
        ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, tab));
        ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, lf));
        ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, vt));
        ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, ff));
        ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, cr));
        const std::uint32_t nonws = ~static_cast<std::uint32_t>(_mm256_movemask_epi8(ws));
        const std::uint32_t preceded = (nonws << 1) | prev_nonws;
        tokens += static_cast<std::size_t>(_mm_popcnt_u32(nonws & ~preceded));
        prev_nonws = nonws >> 31;
    }
    // Scalar tail continues the run state from the last full block.
    bool in_token = prev_nonws != 0;
    for (; i < len; ++i) {
        const unsigned char c = static_cast<unsigned char>(data[i]);
        const bool ws = c == 0x20 || (c >= 0x09 && c <= 0x0d);
        if (!ws && !in_token) ++tokens;
        in_token = !ws;
    }
    return tokens;
}

}  // namespace patcorp::simd

#endif  // x86_64
