#pragma once

// Table layout for the generated Unicode data (see
// scripts/gen_unicode_tables.py). Internal to the normalizer.

#include <cstddef>
#include <cstdint>

namespace patcorp::uni {

struct DecompEntry {
    char32_t cp;
    std::uint32_t pool_offset;
    std::uint8_t len;
};

struct CccEntry {
    char32_t cp;
    std::uint8_t ccc;
};

struct CompEntry {
    char32_t lead;
    char32_t trail;
    char32_t composed;
};

struct LowerEntry {
    char32_t cp;
    char32_t lower;
};

struct CpRange {
    char32_t lo;
    char32_t hi;
};

extern const DecompEntry kDecomp[];
extern const std::size_t kDecompCount;
extern const char32_t kDecompPool[];
extern const CccEntry kCcc[];
extern const std::size_t kCccCount;
extern const CompEntry kComp[];
extern const std::size_t kCompCount;
extern const LowerEntry kLower[];
extern const std::size_t kLowerCount;
extern const CpRange kCased[];
extern const std::size_t kCasedCount;
extern const CpRange kCaseIgnorable[];
extern const std::size_t kCaseIgnorableCount;

}  // namespace patcorp::uni
