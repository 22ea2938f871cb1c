#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "patcorp/errors.hpp"
#include "patcorp/filters.hpp"

using namespace patcorp;
namespace fs = std::filesystem;

namespace {

const FilterConfig kDefaults;

std::string repeat_lines(const std::string& line, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
        out += line;
        out += "\n";
    }
    return out;
}

const char* kGoodAbstract =
    "A lens assembly for a compact camera module includes a barrel, several glass "
    "elements and an infrared filter. The barrel is threaded so that focus can be "
    "adjusted during assembly without special tools. An actuator moves the whole "
    "group relative to the image sensor to compensate for temperature drift. In one "
    "arrangement the outer element is aspheric, which reduces distortion near the "
    "edge of the field. The assembly is sealed against dust by a thin elastomer "
    "ring placed between the barrel and the housing. Test results indicate stable "
    "focus across the full operating range and improved contrast at high spatial "
    "frequencies compared with earlier designs.";

}  // namespace

TEST_CASE("repetition: ten identical lines fail duplicate-line fraction") {
    auto v = repetition_filter(repeat_lines("the same exact line again", 10), kDefaults);
    CHECK(!v.passed);
    CHECK(v.rule == "dup_line_frac");
    CHECK(v.measured == doctest::Approx(0.9));
    CHECK(v.threshold == 0.30);
}

TEST_CASE("repetition: ordinary varied paragraph passes") {
    auto v = repetition_filter(kGoodAbstract, kDefaults);
    CHECK(v.passed);
}

TEST_CASE("repetition: single line cannot fail the duplicate-line rule") {
    auto v = repetition_filter("one line only", kDefaults);
    CHECK(v.rule != "dup_line_frac");
}

TEST_CASE("repetition: dominant word bigram fails the top-2-gram share") {
    std::string s;
    for (int i = 0; i < 40; ++i) s += "focus lens ";
    s += "with a housing";
    auto v = repetition_filter(s, kDefaults);
    CHECK(!v.passed);
    CHECK(v.rule == "top2gram_share");
}

TEST_CASE("quality: word-count bounds") {
    auto v = quality_filter("two words", kDefaults);
    CHECK(!v.passed);
    CHECK(v.rule == "min_words");
    CHECK(v.measured == 2.0);
    CHECK(v.threshold == 20.0);
}

TEST_CASE("quality: all-symbol tokens fail the alphabetic-word floor") {
    std::string s;
    for (int i = 0; i < 50; ++i) s += "@@@ ";
    auto v = quality_filter(s, kDefaults);
    CHECK(!v.passed);
    // '@@@' words are short too; the first failing rule must be named
    CHECK((v.rule == "alpha_word_frac" || v.rule == "mean_word_len_low"));
    FilterConfig relaxed = kDefaults;
    relaxed.min_mean_word_len = 0.0;
    auto v2 = quality_filter(s, relaxed);
    CHECK(v2.rule == "alpha_word_frac");
    CHECK(v2.measured == 0.0);
}

TEST_CASE("quality: representative cleaned abstract passes") {
    CHECK(quality_filter(kGoodAbstract, kDefaults).passed);
}

TEST_CASE("quality: symbol ratio counts # and ellipses") {
    std::string s = "a good sentence with enough normal words here to pass the minimum word "
                    "count limit of the quality rule easily today";
    for (int i = 0; i < 5; ++i) s += " #tag";
    auto v = quality_filter(s, kDefaults);
    CHECK(!v.passed);
    CHECK(v.rule == "symbol_word_ratio");
}

TEST_CASE("fineweb: lines ending mid-token fail the punctuation floor") {
    std::string s;
    for (int i = 0; i < 9; ++i) s += "a line that just stops mid\n";
    s += "only this one ends properly.\n";
    auto v = fineweb_filter(s, kDefaults);
    CHECK(!v.passed);
    CHECK(v.rule == "terminal_punct_frac");
    CHECK(v.measured == doctest::Approx(0.1));
}

TEST_CASE("fineweb: well-formed abstract passes") {
    CHECK(fineweb_filter(kGoodAbstract, kDefaults).passed);
    CHECK(fineweb_filter("A single complete sentence about a lens assembly.", kDefaults).passed);
}

TEST_CASE("fineweb: bullet-dominated lists fail") {
    std::string s;
    for (int i = 0; i < 20; ++i) s += "- bullet item number " + std::to_string(i) + ".\n";
    auto v = fineweb_filter(s, kDefaults);
    CHECK(!v.passed);
    CHECK(v.rule == "bullet_line_frac");
}

TEST_CASE("cascade order and short-circuit: language failure stops evaluation") {
    const auto& model = LangIdModel::builtin();
    FieldDoc doc{"X#abstract", FieldKind::kAbstract,
                 "Die Vorrichtung umfasst ein Gehäuse mit einer Öffnung für den Sensor."};
    auto out = apply_filters(doc, kDefaults, model);
    CHECK(!out.passed);
    REQUIRE(out.trail.size() == 1);  // later filters never evaluated
    CHECK((out.trail[0].rule == "language" || out.trail[0].rule == "language_confidence"));
}

TEST_CASE("cascade: passing doc carries a 4-entry trail") {
    const auto& model = LangIdModel::builtin();
    FieldDoc doc{"X#abstract", FieldKind::kAbstract, kGoodAbstract};
    auto out = apply_filters(doc, kDefaults, model);
    CHECK(out.passed);
    REQUIRE(out.trail.size() == 4);
    for (const auto& v : out.trail) CHECK(v.passed);
}

TEST_CASE("empty doc fails with rule 'empty'") {
    const auto& model = LangIdModel::builtin();
    FieldDoc doc{"X#abstract", FieldKind::kAbstract, "   "};
    auto out = apply_filters(doc, kDefaults, model);
    CHECK(!out.passed);
    CHECK(out.trail[0].rule == "empty");
}

namespace {

// 1000-doc synthetic mix for the cascade/intersection oracle
std::vector<FieldDoc> synthetic_mix() {
    std::mt19937_64 rng(61);
    std::vector<FieldDoc> docs;
    const char* fillers[] = {"lens", "sensor", "housing", "method", "signal", "layer",
                             "circuit", "valve", "beam", "filter"};
    for (int i = 0; i < 1000; ++i) {
        std::string text;
        switch (rng() % 5) {
            case 0:  // good english prose
                text = "A device includes ";
                for (int w = 0; w < 30; ++w) {
                    text += fillers[rng() % 10];
                    text += (w % 9 == 8) ? ". Also " : " ";
                }
                text += "according to the measurement.";
                break;
            case 1:  // german-ish
                text = "Die Vorrichtung umfasst ein Gehäuse und eine Steuerung, die die "
                       "Spannung in Abhängigkeit von der Temperatur anpasst und regelt.";
                break;
            case 2:  // repetitive
                text = repeat_lines("identical line of text.", 8);
                break;
            case 3:  // too short
                text = "tiny fragment.";
                break;
            default:  // symbol heavy
                text = "A sentence with lots of tags ";
                for (int k = 0; k < 20; ++k) text += "# ";
                text += "and then some words to reach the count threshold for words.";
                break;
        }
        docs.push_back({"D" + std::to_string(i) + "#abstract", FieldKind::kAbstract, text});
    }
    return docs;
}

}  // namespace

TEST_CASE("cascade equals running each filter independently and intersecting") {
    const auto& model = LangIdModel::builtin();
    const auto docs = synthetic_mix();
    std::size_t survivors = 0;
    for (const auto& doc : docs) {
        const bool cascade = apply_filters(doc, kDefaults, model).passed;
        const bool independent = language_filter(doc.text, kDefaults, model).passed &&
                                 repetition_filter(doc.text, kDefaults).passed &&
                                 quality_filter(doc.text, kDefaults).passed &&
                                 fineweb_filter(doc.text, kDefaults).passed;
        CHECK(cascade == independent);
        if (cascade) ++survivors;
    }
    CHECK(survivors > 0);
    CHECK(survivors < docs.size());
}

TEST_CASE("monotonicity: tightening a threshold never grows the survivor set") {
    const auto& model = LangIdModel::builtin();
    const auto docs = synthetic_mix();
    FilterConfig tight = kDefaults;
    tight.min_words = 40;
    tight.max_dup_line_frac = 0.10;
    for (const auto& doc : docs) {
        const bool relaxed_pass = apply_filters(doc, kDefaults, model).passed;
        const bool tight_pass = apply_filters(doc, tight, model).passed;
        if (tight_pass) CHECK(relaxed_pass);
    }
}

TEST_CASE("every discarded doc names exactly one first-failing rule") {
    const auto& model = LangIdModel::builtin();
    for (const auto& doc : synthetic_mix()) {
        auto out = apply_filters(doc, kDefaults, model);
        if (!out.passed) {
            CHECK(!out.trail.empty());
            CHECK(!out.trail.back().passed);
            for (std::size_t k = 0; k + 1 < out.trail.size(); ++k)
                CHECK(out.trail[k].passed);
        }
    }
}

TEST_CASE("filter config rejects unknown keys and bad types") {
    CHECK_THROWS_AS(FilterConfig::from_json(json{{"bogus_key", 1}}), ConfigError);
    CHECK_THROWS_AS(FilterConfig::from_json(json{{"min_words", "twenty"}}), ConfigError);
    FilterConfig cfg = FilterConfig::from_json(json{{"min_words", 5}});
    CHECK(cfg.min_words == 5);
}

TEST_CASE("filter stage: explodes records, writes kept and dropped, conserves ledger") {
    const auto tmp = fs::temp_directory_path() /
                     ("patcorp_filter_" + std::to_string(std::random_device{}()));
    fs::create_directories(tmp);
    const std::string in = (tmp / "clean.jsonl").string();
    {
        std::ofstream out(in, std::ios::binary);
        json rec{{"pub_no", "P1"}, {"abstract", kGoodAbstract}, {"first_ind_claim", "short."}};
        out << rec.dump() << "\n";
        out << field_doc_to_json({"P2#dwpi", FieldKind::kDwpi, kGoodAbstract}).dump() << "\n";
    }
    const std::string kept = (tmp / "kept.jsonl").string();
    const std::string dropped = (tmp / "dropped.jsonl").string();
    auto res = run_filter_stage(in, kept, dropped, kDefaults, LangIdModel::builtin(), 1);
    CHECK(res.stats.docs_in == 3);  // P1 exploded to 2 + P2
    CHECK(res.stats.docs_out == 2);
    CHECK(res.stats.docs_filtered == 1);
    CHECK(res.stats.conserved());

    std::ifstream dropped_in(dropped);
    std::string line;
    REQUIRE(std::getline(dropped_in, line));
    json d = json::parse(line);
    CHECK(d["doc_id"] == "P1#first_claim");
    CHECK(d.contains("rule"));
    fs::remove_all(tmp);
}

TEST_CASE("filter stage output is independent of worker count") {
    const auto tmp = fs::temp_directory_path() /
                     ("patcorp_filterw_" + std::to_string(std::random_device{}()));
    fs::create_directories(tmp);
    const std::string in = (tmp / "docs.jsonl").string();
    {
        std::ofstream out(in, std::ios::binary);
        for (const auto& d : synthetic_mix()) out << field_doc_to_json(d).dump() << "\n";
    }
    auto run_with = [&](unsigned workers, const std::string& suffix) {
        const std::string kept = (tmp / ("kept" + suffix)).string();
        const std::string dropped = (tmp / ("dropped" + suffix)).string();
        run_filter_stage(in, kept, dropped, kDefaults, LangIdModel::builtin(), workers);
        std::ifstream k(kept, std::ios::binary), d(dropped, std::ios::binary);
        std::stringstream ks, ds;
        ks << k.rdbuf();
        ds << d.rdbuf();
        return ks.str() + "\x01" + ds.str();
    };
    CHECK(run_with(1, "_1") == run_with(8, "_8"));
    fs::remove_all(tmp);
}
