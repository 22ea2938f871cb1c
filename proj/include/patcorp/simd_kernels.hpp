#pragma once

// Data-parallel inner loops with scalar reference implementations and AVX2
// variants selected at runtime. Every SIMD variant must be bit-identical to
// its scalar reference; tests/test_kernels.cpp enforces the equivalence.
//
// Kernels:
//   minhash_fold  — fold shingle hashes into per-seed minima (the MinHash
//                   signature inner loop).
//   ws_token_count — count maximal runs of non-whitespace bytes.
//
// Dispatch picks AVX2 when the CPU supports it; set PATCORP_FORCE_SCALAR=1
// (or call force_scalar) to pin the reference path.

#include <cstddef>
#include <cstdint>

namespace patcorp::simd {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);

// ISA the dispatcher currently selects.
Isa active_isa();

bool cpu_has_avx2();

// Test/bench knob; overrides CPU detection when true.
void force_scalar(bool on);

// sig[i] = min(sig[i], mix64(shingle ^ seeds[i])) for every shingle and
// every i < num_hashes. Callers initialize sig with UINT64_MAX.
using MinhashFoldFn = void (*)(const std::uint64_t* shingles, std::size_t count,
                               const std::uint64_t* seeds, std::size_t num_hashes,
                               std::uint64_t* sig);

void minhash_fold_scalar(const std::uint64_t* shingles, std::size_t count,
                         const std::uint64_t* seeds, std::size_t num_hashes,
                         std::uint64_t* sig);
#if defined(__x86_64__) || defined(_M_X64)
void minhash_fold_avx2(const std::uint64_t* shingles, std::size_t count,
                       const std::uint64_t* seeds, std::size_t num_hashes,
                       std::uint64_t* sig);
#endif
MinhashFoldFn minhash_fold();

// Number of maximal runs of bytes outside {0x09..0x0D, 0x20}. UTF-8
// continuation bytes never match the whitespace set, so multi-byte
// characters stay inside their run.
using TokenCountFn = std::size_t (*)(const char* data, std::size_t len);

std::size_t ws_token_count_scalar(const char* data, std::size_t len);
#if defined(__x86_64__) || defined(_M_X64)
std::size_t ws_token_count_avx2(const char* data, std::size_t len);
#endif
TokenCountFn ws_token_count();

}  // namespace patcorp::simd
