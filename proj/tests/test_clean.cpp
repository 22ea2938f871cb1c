#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "patcorp/clean.hpp"
#include "patcorp/corpus.hpp"

using namespace patcorp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("patcorp_clean_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

PatentRecord rec(std::string no, std::string fam, std::string date) {
    PatentRecord r;
    r.pub_no = std::move(no);
    r.family_id = std::move(fam);
    r.pub_date = *Date::parse(date);
    return r;
}

// simple independent sanitizer: drop every char between '<' and '>', decode
// the five basic entities
std::string naive_strip(std::string_view s) {
    std::string no_tags;
    bool in_tag = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!in_tag && s[i] == '<' && i + 1 < s.size() &&
            (std::isalpha(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '/')) {
            in_tag = true;
        } else if (in_tag && s[i] == '>') {
            in_tag = false;
        } else if (!in_tag) {
            no_tags.push_back(s[i]);
        }
    }
    const std::pair<std::string, std::string> ents[] = {
        {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}};
    for (const auto& [from, to] : ents) {
        std::size_t pos = 0;
        while ((pos = no_tags.find(from, pos)) != std::string::npos)
            no_tags.replace(pos, from.size(), to);
    }
    return no_tags;
}

}  // namespace

TEST_CASE("strip_markup: definitional cases") {
    CHECK(strip_markup("<p>lens &amp; sensor</p>") == "lens & sensor");
    CHECK(strip_markup("no tags here") == "no tags here");
    CHECK(strip_markup("<b><i>x</i></b>y") == "xy");
    CHECK(strip_markup("a &lt; b &gt; c") == "a < b > c");
    CHECK(strip_markup("5 &#x25; and &#37;") == "5 % and %");
    CHECK(strip_markup("<!-- comment -->text") == "text");
    CHECK(strip_markup("2 < 3 but x<y>z loses the tag") == "2 < 3 but xz");
    CHECK(strip_markup("unknown &foobar; stays") == "unknown &foobar; stays");
}

TEST_CASE("strip_markup agrees with a reference sanitizer on a fuzz corpus") {
    std::mt19937_64 rng(41);
    const std::string words[] = {"lens", "sensor", "gate", "the", "of"};
    const std::string tags[] = {"<p>", "</p>", "<b>", "</b>", "<i>", "</i>"};
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const int parts = 1 + static_cast<int>(rng() % 20);
        for (int k = 0; k < parts; ++k) {
            switch (rng() % 4) {
                case 0: s += words[rng() % 5]; break;
                case 1: s += tags[rng() % 6]; break;
                case 2: s += "&amp;"; break;
                default: s += " "; break;
            }
        }
        CHECK(strip_markup(s) == naive_strip(s));
    }
}

TEST_CASE("normalize_chars: definitional cases") {
    CHECK(normalize_chars(std::string_view("a\0b  c", 6)) == "a b c");
    CHECK(normalize_chars("") == "");
    CHECK(normalize_chars("a\n\tb") == "a b");
    CHECK(normalize_chars("  pad  ") == "pad");
    CHECK(normalize_chars("a\xef\xbf\xbd" "b") == "a b");   // U+FFFD
    CHECK(normalize_chars("a\xc2\xa0" "b") == "a b");        // NBSP
    CHECK(normalize_chars("zero\xe2\x80\x8bwidth") == "zerowidth");  // U+200B dropped
}

TEST_CASE("normalize_chars: property scan over mixed-script fuzz strings") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const int n = static_cast<int>(rng() % 60);
        for (int k = 0; k < n; ++k) {
            switch (rng() % 6) {
                case 0: s.push_back(static_cast<char>('a' + rng() % 26)); break;
                case 1: s.push_back(static_cast<char>(rng() % 0x20)); break;   // controls
                case 2: s += "\xc3\xa9"; break;                                 // é
                case 3: s += "\xe6\xb0\xb4"; break;                             // 水
                case 4: s.push_back(' '); break;
                default: s += "\xef\xbf\xbd"; break;                            // U+FFFD
            }
        }
        const std::string out = normalize_chars(s);
        CHECK(out.find("  ") == std::string::npos);
        for (unsigned char c : out) CHECK((c >= 0x20 || c >= 0x80));
        CHECK(out == normalize_chars(out));  // idempotent
    }
}

TEST_CASE("remove_boilerplate: prefixes and figure refs") {
    const auto cfg = BoilerplateConfig::defaults();
    CHECK(remove_boilerplate("What is claimed is: A lens...", FieldKind::kFirstClaim, cfg) ==
          "A lens...");
    CHECK(remove_boilerplate("A lens (see FIG. 2) with...", FieldKind::kAbstract, cfg) ==
          "A lens with...");
    CHECK(remove_boilerplate("A lens with no refs", FieldKind::kAbstract, cfg) ==
          "A lens with no refs");
    CHECK(remove_boilerplate("ABSTRACT A method for measuring.", FieldKind::kAbstract, cfg) ==
          "A method for measuring.");
    CHECK(remove_boilerplate("As shown in FIGS. 1-3, the device", FieldKind::kAbstract, cfg) ==
          "As shown in, the device");
    CHECK(remove_boilerplate("See Figure 2a and the table", FieldKind::kAbstract, cfg) ==
          "See and the table");
    // "figure" without a number is prose, not a reference
    CHECK(remove_boilerplate("a figure of merit", FieldKind::kAbstract, cfg) ==
          "a figure of merit");
    // word boundary: "config." is not "fig."
    CHECK(remove_boilerplate("the config. 3 entries", FieldKind::kAbstract, cfg) ==
          "the config. 3 entries");
}

TEST_CASE("remove_boilerplate is idempotent, including stacked prefixes") {
    const auto cfg = BoilerplateConfig::defaults();
    const std::string cases[] = {
        "CLAIMS: What is claimed is: A device.",
        "ABSTRACT ABSTRACT doubled",
        "A lens (see FIG. 2) with FIG. 3 refs",
    };
    for (const auto& s : cases) {
        const std::string once = remove_boilerplate(s, FieldKind::kAbstract, cfg);
        CHECK(remove_boilerplate(once, FieldKind::kAbstract, cfg) == once);
    }
}

TEST_CASE("remove_boilerplate reports fired rules") {
    const auto cfg = BoilerplateConfig::defaults();
    CleaningReport report;
    remove_boilerplate("What is claimed is: A lens (see FIG. 2).", FieldKind::kFirstClaim, cfg,
                       &report);
    bool saw_prefix = false, saw_fig = false;
    for (const auto& [rule, count] : report.rules_fired) {
        if (rule == "boilerplate_prefix") saw_prefix = count == 1;
        if (rule == "figure_ref_paren") saw_fig = count == 1;
    }
    CHECK(saw_prefix);
    CHECK(saw_fig);
    // report exists even when nothing fires
    CleaningReport empty_report;
    remove_boilerplate("plain", FieldKind::kAbstract, cfg, &empty_report);
    CHECK(empty_report.to_json().contains("rules_fired"));
}

TEST_CASE("select_first_independent_claim") {
    const auto pat = ClaimPatterns::defaults();
    CHECK(select_first_independent_claim({"1. A lens.", "2. The lens of claim 1..."}, pat)
              .value() == "1. A lens.");
    CHECK(select_first_independent_claim(
              {"1. The device of claim 9...", "2. A device comprising..."}, pat)
              .value() == "2. A device comprising...");
    CHECK(!select_first_independent_claim({}, pat).has_value());
    CHECK(!select_first_independent_claim(
               {"1. The lens of claim 2.", "2. A widget according to claim 1."}, pat)
               .has_value());
}

TEST_CASE("claim selection on a labeled mini-corpus") {
    const auto pat = ClaimPatterns::defaults();
    // (claims, expected index or -1)
    struct Case {
        std::vector<std::string> claims;
        int expected;
    };
    const Case cases[] = {
        {{"1. An apparatus comprising a base."}, 0},
        {{"1. The method as claimed in claim 3.", "2. A method of forming a layer."}, 1},
        {{"1. Device as set forth in claim 1.", "2. Apparatus as recited in claim 4.",
          "3. A system for data storage."}, 2},
        {{"1. A method in accordance with claim 7."}, -1},
        {{"1. Use of the composition of any one of claims 1 to 5.",
          "2. A composition comprising polymer."}, 1},
        {{"1. A lens assembly according to any of the preceding claims.",
          "2. A lens assembly comprising an aperture."}, 1},
    };
    for (const auto& c : cases) {
        auto got = select_first_independent_claim(c.claims, pat);
        if (c.expected < 0) {
            CHECK(!got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(*got == c.claims[static_cast<std::size_t>(c.expected)]);
        }
    }
}

TEST_CASE("selected claim is always an element of the input") {
    const auto pat = ClaimPatterns::defaults();
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> claims;
        const int n = static_cast<int>(rng() % 5);
        for (int k = 0; k < n; ++k) {
            claims.push_back(rng() % 2 ? "A widget of claim " + std::to_string(k)
                                       : "A widget numbered " + std::to_string(k));
        }
        auto got = select_first_independent_claim(claims, pat);
        if (got) CHECK(std::find(claims.begin(), claims.end(), *got) != claims.end());
    }
}

TEST_CASE("family_dedupe: most recent pub_date wins, ties by greatest pub_no") {
    auto survivors = family_dedupe({rec("A", "F", "2020-01-01"), rec("B", "F", "2021-05-05")});
    REQUIRE(survivors.size() == 1);
    CHECK(survivors[0].pub_no == "B");

    survivors = family_dedupe({rec("A", "F", "2021-05-05"), rec("B", "F", "2021-05-05")});
    REQUIRE(survivors.size() == 1);
    CHECK(survivors[0].pub_no == "B");

    survivors = family_dedupe({rec("S", "G", "2019-01-01")});
    REQUIRE(survivors.size() == 1);
    CHECK(survivors[0].pub_no == "S");
}

TEST_CASE("family_dedupe tie rule verified by exhaustive 3-record permutations") {
    std::vector<PatentRecord> base = {rec("A", "F", "2021-05-05"), rec("B", "F", "2021-05-05"),
                                      rec("C", "F", "2020-01-01")};
    std::sort(base.begin(), base.end(),
              [](const PatentRecord& a, const PatentRecord& b) { return a.pub_no < b.pub_no; });
    std::vector<std::size_t> idx = {0, 1, 2};
    do {
        std::vector<PatentRecord> perm;
        for (auto i : idx) perm.push_back(base[i]);
        auto survivors = family_dedupe(perm);
        REQUIRE(survivors.size() == 1);
        CHECK(survivors[0].pub_no == "B");  // max (date, pub_no)
    } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("family_dedupe is permutation-invariant on a random corpus") {
    std::mt19937_64 rng(53);
    std::vector<PatentRecord> records;
    for (int i = 0; i < 200; ++i) {
        const int fam = static_cast<int>(rng() % 40);
        const int day = 1 + static_cast<int>(rng() % 28);
        char date[16];
        std::snprintf(date, sizeof(date), "2020-03-%02d", day);
        records.push_back(rec("P" + std::to_string(i), "F" + std::to_string(fam), date));
    }
    auto names = [](std::vector<PatentRecord> v) {
        std::vector<std::string> out;
        for (auto& r : v) out.push_back(r.pub_no);
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto expect = names(family_dedupe(records));
    // survivor count equals the number of distinct families
    CHECK(expect.size() == 40);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        std::shuffle(records.begin(), records.end(), rng);
        CHECK(names(family_dedupe(records)) == expect);
    }
}

TEST_CASE("missing family_id records survive as singletons and are counted") {
    std::uint64_t missing = 0;
    auto survivors = family_dedupe(
        {rec("A", "", "2020-01-01"), rec("B", "", "2020-01-01"), rec("C", "F", "2020-01-01")},
        &missing);
    CHECK(missing == 2);
    CHECK(survivors.size() == 3);
}

TEST_CASE("full phase1 run: cleaning, dedup, ledger conservation, idempotence") {
    TempDir tmp;
    const std::string in = tmp.file("raw.jsonl");
    {
        std::ofstream out(in, std::ios::binary);
        // family F1: two records, later one wins
        out << R"({"pub_no":"A1","family_id":"F1","pub_date":"2020-01-01","abstract":"<p>Old &amp; stale</p>"})" << "\n";
        out << R"({"pub_no":"A2","family_id":"F1","pub_date":"2021-01-01","abstract":"ABSTRACT A lens (see FIG. 2) assembly.","claims":["1. The lens of claim 4.","2. A lens comprising a barrel."]})" << "\n";
        // singleton with only dwpi
        out << R"({"pub_no":"B1","family_id":"F2","pub_date":"2019-06-06","dwpi":"An improved sensor."})" << "\n";
        // bad date -> quarantined
        out << R"({"pub_no":"C1","family_id":"F3","pub_date":"2019-13-06","dwpi":"x"})" << "\n";
        // cleaned to nothing -> filtered
        out << R"({"pub_no":"D1","family_id":"F4","pub_date":"2019-06-06","abstract":"<p></p>"})" << "\n";
        out << "garbage line\n";
    }
    const std::string out_path = tmp.file("clean.jsonl");
    Phase1Options opt;
    Phase1Result res = run_phase1(in, out_path, opt);

    CHECK(res.stats.docs_in == 6);
    CHECK(res.stats.docs_rejected == 2);  // bad date + garbage
    CHECK(res.stats.docs_filtered == 2);  // family loser + emptied record
    CHECK(res.stats.docs_out == 2);
    CHECK(res.stats.conserved());

    std::ifstream result(out_path);
    std::string line;
    std::vector<CleanRecord> cleaned;
    while (std::getline(result, line)) {
        if (line.empty()) continue;
        auto r = clean_record_from_json(json::parse(line));
        REQUIRE(r.has_value());
        cleaned.push_back(*r);
    }
    REQUIRE(cleaned.size() == 2);
    CHECK(cleaned[0].pub_no == "A2");
    CHECK(cleaned[0].abstract.value() == "A lens assembly.");
    CHECK(cleaned[0].first_ind_claim.value() == "2. A lens comprising a barrel.");
    CHECK(cleaned[1].pub_no == "B1");

    // applying the per-record cleaner to its own output changes nothing
    for (const auto& r : cleaned) {
        PatentRecord again;
        again.pub_no = r.pub_no;
        again.family_id = "X";
        again.pub_date = *Date::parse("2020-01-01");
        again.abstract_raw = r.abstract;
        if (r.first_ind_claim) again.claims_raw = {*r.first_ind_claim};
        again.dwpi_raw = r.dwpi;
        auto twice = clean_one_record(again, opt, nullptr);
        REQUIRE(twice.has_value());
        CHECK(twice->abstract == r.abstract);
        CHECK(twice->first_ind_claim == r.first_ind_claim);
        CHECK(twice->dwpi == r.dwpi);
    }
}
