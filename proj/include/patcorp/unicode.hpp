#pragma once

// Self-contained Unicode support: UTF-8 codec and the NFKC + lowercase
// normalization used by the tokenizer. Tables are generated offline from
// the Unicode character database (scripts/gen_unicode_tables.py).

#include <cstdint>
#include <string>
#include <string_view>

namespace patcorp::uni {

// Decodes UTF-8; invalid bytes become U+FFFD.
std::u32string utf8_decode(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
std::string utf8_encode(std::u32string_view cps);

std::uint8_t combining_class(char32_t cp);
bool is_cased_cp(char32_t cp);
bool is_case_ignorable_cp(char32_t cp);

// Normalization stages, exposed for tests. Strings of code points.
std::u32string nfkd(std::u32string_view in);
void canonical_order(std::u32string& buf);
std::u32string compose(std::u32string_view in);
std::u32string lowercase(std::u32string_view in);

// NFKC followed by lowercasing (final-sigma aware). Idempotent.
std::string nfkc_lower(std::string_view text);

}  // namespace patcorp::uni
