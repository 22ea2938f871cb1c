#include "patcorp/unicode.hpp"

#include <algorithm>

#include "unicode_tables.hpp"

namespace patcorp::uni {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Hangul syllable arithmetic (UAX #15 §3.12).
constexpr char32_t kSBase = 0xAC00, kLBase = 0x1100, kVBase = 0x1161, kTBase = 0x11A7;
constexpr int kLCount = 19, kVCount = 21, kTCount = 28;
constexpr int kNCount = kVCount * kTCount;  // 588
constexpr int kSCount = kLCount * kNCount;  // 11172

const DecompEntry* find_decomp(char32_t cp) {
    const DecompEntry* end = kDecomp + kDecompCount;
    const DecompEntry* it = std::lower_bound(
        kDecomp, end, cp, [](const DecompEntry& e, char32_t c) { return e.cp < c; });
    return (it != end && it->cp == cp) ? it : nullptr;
}

bool in_ranges(const CpRange* ranges, std::size_t n, char32_t cp) {
    const CpRange* end = ranges + n;
    const CpRange* it = std::upper_bound(
        ranges, end, cp, [](char32_t c, const CpRange& r) { return c < r.lo; });
    return it != ranges && cp <= (it - 1)->hi;
}

char32_t compose_pair(char32_t lead, char32_t trail) {
    // Hangul L+V and LV+T compose algorithmically.
    if (lead >= kLBase && lead < kLBase + kLCount && trail >= kVBase && trail < kVBase + kVCount) {
        return kSBase + ((lead - kLBase) * kVCount + (trail - kVBase)) * kTCount;
    }
    if (lead >= kSBase && lead < kSBase + kSCount && (lead - kSBase) % kTCount == 0 &&
        trail > kTBase && trail < kTBase + kTCount) {
        return lead + (trail - kTBase);
    }
    const CompEntry* end = kComp + kCompCount;
    const CompEntry* it = std::lower_bound(
        kComp, end, std::pair<char32_t, char32_t>{lead, trail},
        [](const CompEntry& e, const std::pair<char32_t, char32_t>& k) {
            return e.lead != k.first ? e.lead < k.first : e.trail < k.second;
        });
    if (it != end && it->lead == lead && it->trail == trail) return it->composed;
    return 0;
}

}  // namespace

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    while (i < s.size()) {
        const unsigned char b = p[i];
        if (b < 0x80) {
            out.push_back(b);
            ++i;
            continue;
        }
        int need;
        char32_t cp;
        if ((b & 0xE0) == 0xC0) { need = 1; cp = b & 0x1F; }
        else if ((b & 0xF0) == 0xE0) { need = 2; cp = b & 0x0F; }
        else if ((b & 0xF8) == 0xF0) { need = 3; cp = b & 0x07; }
        else { out.push_back(kReplacement); ++i; continue; }
        if (i + need >= s.size()) {
            // truncated sequence
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= need; ++k) {
            if ((p[i + k] & 0xC0) != 0x80) { ok = false; break; }
            cp = (cp << 6) | (p[i + k] & 0x3F);
        }
        if (!ok) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        // reject overlong forms, surrogates and out-of-range values
        static constexpr char32_t kMinByLen[4] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMinByLen[need] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += need + 1;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string utf8_encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

std::uint8_t combining_class(char32_t cp) {
    const CccEntry* end = kCcc + kCccCount;
    const CccEntry* it = std::lower_bound(
        kCcc, end, cp, [](const CccEntry& e, char32_t c) { return e.cp < c; });
    return (it != end && it->cp == cp) ? it->ccc : 0;
}

bool is_cased_cp(char32_t cp) { return in_ranges(kCased, kCasedCount, cp); }

bool is_case_ignorable_cp(char32_t cp) {
    return in_ranges(kCaseIgnorable, kCaseIgnorableCount, cp);
}

std::u32string nfkd(std::u32string_view in) {
    std::u32string out;
    out.reserve(in.size());
    for (char32_t cp : in) {
        if (cp >= kSBase && cp < kSBase + kSCount) {
            const int s = static_cast<int>(cp - kSBase);
            out.push_back(kLBase + s / kNCount);
            out.push_back(kVBase + (s % kNCount) / kTCount);
            if (s % kTCount != 0) out.push_back(kTBase + s % kTCount);
            continue;
        }
        if (const DecompEntry* e = find_decomp(cp)) {
            // table entries are pre-flattened to full NFKD form
            for (std::uint8_t k = 0; k < e->len; ++k)
                out.push_back(kDecompPool[e->pool_offset + k]);
            continue;
        }
        out.push_back(cp);
    }
    return out;
}

void canonical_order(std::u32string& buf) {
    // stable insertion sort of each maximal nonzero-ccc run; runs are short
    for (std::size_t i = 1; i < buf.size(); ++i) {
        const std::uint8_t cc = combining_class(buf[i]);
        if (cc == 0) continue;
        std::size_t j = i;
        while (j > 0 && combining_class(buf[j - 1]) > cc) {
            std::swap(buf[j - 1], buf[j]);
            --j;
        }
    }
}

std::u32string compose(std::u32string_view in) {
    if (in.empty()) return {};
    std::u32string out;
    out.reserve(in.size());
    out.push_back(in[0]);
    std::ptrdiff_t last_starter = combining_class(in[0]) == 0 ? 0 : -1;
    std::uint8_t prev_cc = combining_class(in[0]);
    for (std::size_t i = 1; i < in.size(); ++i) {
        const char32_t c = in[i];
        const std::uint8_t cc = combining_class(c);
        char32_t composed = 0;
        if (last_starter >= 0) {
            const bool blocked =
                static_cast<std::ptrdiff_t>(out.size()) - 1 > last_starter && prev_cc >= cc;
            if (!blocked) composed = compose_pair(out[last_starter], c);
        }
        if (composed != 0) {
            out[static_cast<std::size_t>(last_starter)] = composed;
            prev_cc = (static_cast<std::ptrdiff_t>(out.size()) - 1 == last_starter)
                          ? 0
                          : combining_class(out.back());
        } else {
            if (cc == 0) last_starter = static_cast<std::ptrdiff_t>(out.size());
            out.push_back(c);
            prev_cc = cc;
        }
    }
    return out;
}

namespace {

char32_t lower_simple(char32_t cp) {
    const LowerEntry* end = kLower + kLowerCount;
    const LowerEntry* it = std::lower_bound(
        kLower, end, cp, [](const LowerEntry& e, char32_t c) { return e.cp < c; });
    return (it != end && it->cp == cp) ? it->lower : cp;
}

// Final_Sigma per the Unicode default casing rules: preceded by a cased
// character (skipping case-ignorables) and not followed by one.
bool sigma_is_final(std::u32string_view in, std::size_t i) {
    bool preceded = false;
    for (std::size_t j = i; j > 0; --j) {
        const char32_t c = in[j - 1];
        if (is_case_ignorable_cp(c)) continue;
        preceded = is_cased_cp(c);
        break;
    }
    if (!preceded) return false;
    for (std::size_t j = i + 1; j < in.size(); ++j) {
        const char32_t c = in[j];
        if (is_case_ignorable_cp(c)) continue;
        return !is_cased_cp(c);
    }
    return true;
}

}  // namespace

std::u32string lowercase(std::u32string_view in) {
    std::u32string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const char32_t cp = in[i];
        if (cp == 0x03A3) {  // greek capital sigma
            out.push_back(sigma_is_final(in, i) ? 0x03C2 : 0x03C3);
        } else if (cp == 0x0130) {  // latin capital I with dot above
            out.push_back(0x0069);
            out.push_back(0x0307);
        } else {
            out.push_back(lower_simple(cp));
        }
    }
    return out;
}

std::string nfkc_lower(std::string_view text) {
    bool ascii = true;
    for (unsigned char c : text) {
        if (c >= 0x80) {
            ascii = false;
            break;
        }
    }
    if (ascii) {
        // ASCII is NFKC-stable and contains no combining marks
        std::string out(text);
        for (char& c : out) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        return out;
    }
    std::u32string cps = utf8_decode(text);
    std::u32string d = nfkd(cps);
    canonical_order(d);
    std::u32string c = compose(d);
    return utf8_encode(lowercase(c));
}

}  // namespace patcorp::uni
