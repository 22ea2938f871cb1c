#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "patcorp/hash64.hpp"
#include "patcorp/unicode.hpp"

using namespace patcorp;

namespace {
std::string data_dir() {
    const char* d = std::getenv("PATCORP_TEST_DATA");
    REQUIRE(d != nullptr);
    return d;
}
}  // namespace

TEST_CASE("spec-pinned normalizations") {
    CHECK(uni::nfkc_lower("ＡＢＣ") == "abc");          // fullwidth ABC
    CHECK(uni::nfkc_lower("ＡＢＣﬁ") == "abcfi");  // + fi ligature
    CHECK(uni::nfkc_lower("ﬁlter") == "filter");
    CHECK(uni::nfkc_lower("abc") == "abc");
    CHECK(uni::nfkc_lower("") == "");
}

TEST_CASE("frozen fixture cases match the reference normalizer") {
    std::ifstream in(data_dir() + "/nfkc_cases.jsonl");
    REQUIRE(in.is_open());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        const std::string input = j["in"].get<std::string>();
        const std::string expected = j["out"].get<std::string>();
        const std::string got = uni::nfkc_lower(input);
        if (got != expected) {
            CAPTURE(input);
            CAPTURE(expected);
            CAPTURE(got);
            REQUIRE(got == expected);
        }
        ++n;
    }
    CHECK(n > 3000);
}

TEST_CASE("all-codepoint digest pins the full table set") {
    std::ifstream in(data_dir() + "/nfkc_allcp_digest.json");
    REQUIRE(in.is_open());
    nlohmann::json j;
    in >> j;
    const std::uint64_t expected = j["digest"].get<std::uint64_t>();
    Hash64Stream h;
    std::size_t count = 0;
    for (char32_t cp = 0; cp < 0x110000; ++cp) {
        if (cp >= 0xD800 && cp <= 0xDFFF) continue;
        std::string s;
        uni::append_utf8(s, cp);
        const std::string norm = uni::nfkc_lower(s);
        h.update(norm);
        h.update("\x00", 1);
        ++count;
    }
    CHECK(count == j["codepoints"].get<std::size_t>());
    CHECK(h.finish() == expected);
}

TEST_CASE("normalization is idempotent over every code point") {
    for (char32_t cp = 0; cp < 0x110000; ++cp) {
        if (cp >= 0xD800 && cp <= 0xDFFF) continue;
        std::string s;
        uni::append_utf8(s, cp);
        const std::string once = uni::nfkc_lower(s);
        const std::string twice = uni::nfkc_lower(once);
        if (once != twice) {
            CAPTURE(cp);
            REQUIRE(once == twice);
        }
    }
}

TEST_CASE("final sigma rule") {
    CHECK(uni::nfkc_lower("ΑΣ") == "ας");          // ΑΣ -> ας
    CHECK(uni::nfkc_lower("ΣΑ") == "σα");          // ΣΑ -> σα
    CHECK(uni::nfkc_lower("Σ") == "σ");                      // lone Σ -> σ
    CHECK(uni::nfkc_lower("ΑΣ.") == "ας.");        // ΑΣ. -> ας.
}

TEST_CASE("utf8 decode flags invalid input with replacement") {
    const std::string bad = "a\xff" "b\xc3" "(";
    const std::u32string cps = uni::utf8_decode(bad);
    REQUIRE(cps.size() == 5);
    CHECK(cps[0] == U'a');
    CHECK(cps[1] == 0xFFFD);
    CHECK(cps[2] == U'b');
    CHECK(cps[3] == 0xFFFD);
    CHECK(cps[4] == U'(');
    // overlong form of '/'
    const std::string overlong = "\xc0\xaf";
    CHECK(uni::utf8_decode(overlong)[0] == 0xFFFD);
}
