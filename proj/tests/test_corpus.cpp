#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "patcorp/corpus.hpp"
#include "patcorp/errors.hpp"

using namespace patcorp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("patcorp_corpus_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("read_records: valid three-line file") {
    TempDir tmp;
    const std::string p = tmp.file("in.jsonl");
    write_file(p,
               R"({"pub_no":"A1","family_id":"F1","pub_date":"2020-01-02","abstract":"x"})" "\n"
               R"({"pub_no":"A2","family_id":"F1","pub_date":"2021-05-05","claims":["1. A lens."]})" "\n"
               R"({"pub_no":"A3","family_id":"F2","pub_date":"2019-12-31","dwpi":"y"})" "\n");
    std::vector<PatentRecord> recs;
    std::vector<RejectEntry> rejects;
    auto stats = read_records(p, {}, [&](PatentRecord&& r) { recs.push_back(std::move(r)); },
                              [&](const RejectEntry& e) { rejects.push_back(e); });
    CHECK(stats.docs_in == 3);
    CHECK(stats.rejects == 0);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].pub_no == "A1");
    CHECK(recs[0].pub_date.iso() == "2020-01-02");
    CHECK(recs[1].claims_raw.size() == 1);
    CHECK(recs[2].dwpi_raw.value() == "y");
}

TEST_CASE("read_records: truncated line among three is rejected, stream continues") {
    TempDir tmp;
    const std::string p = tmp.file("in.jsonl");
    write_file(p,
               R"({"pub_no":"A1","family_id":"F1","pub_date":"2020-01-02"})" "\n"
               R"({"pub_no":"A2","family_id":)" "\n"
               R"({"pub_no":"A3","family_id":"F2","pub_date":"2019-12-31"})" "\n");
    std::size_t records = 0;
    std::vector<RejectEntry> rejects;
    auto stats = read_records(p, {}, [&](PatentRecord&&) { ++records; },
                              [&](const RejectEntry& e) { rejects.push_back(e); });
    CHECK(stats.docs_in == 3);
    CHECK(records == 2);
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].line_no == 2);
    CHECK(rejects[0].reason == "malformed json");
}

TEST_CASE("read_records: empty file gives empty stream") {
    TempDir tmp;
    const std::string p = tmp.file("empty.jsonl");
    write_file(p, "");
    std::size_t records = 0, rejects = 0;
    auto stats = read_records(p, {}, [&](PatentRecord&&) { ++records; },
                              [&](const RejectEntry&) { ++rejects; });
    CHECK(stats.docs_in == 0);
    CHECK(records == 0);
    CHECK(rejects == 0);
}

TEST_CASE("read_records: unreadable file is fatal") {
    CHECK_THROWS_AS(read_records("/nonexistent/path.jsonl", {},
                                 [](PatentRecord&&) {}, [](const RejectEntry&) {}),
                    DataError);
}

TEST_CASE("read_records: custom schema mapping") {
    TempDir tmp;
    const std::string p = tmp.file("in.jsonl");
    write_file(p, R"({"pn":"A1","fam":"F1","date":"2020-01-02","abs":"text here"})" "\n");
    RecordSchema schema;
    schema.pub_no = "pn";
    schema.family_id = "fam";
    schema.pub_date = "date";
    schema.abstract = "abs";
    std::vector<PatentRecord> recs;
    read_records(p, schema, [&](PatentRecord&& r) { recs.push_back(std::move(r)); },
                 [](const RejectEntry&) {});
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].abstract_raw.value() == "text here");
}

TEST_CASE("date parsing accepts dates, datetimes; rejects junk") {
    CHECK(Date::parse("2020-02-29").has_value());   // leap day
    CHECK(!Date::parse("2021-02-29").has_value());  // not a leap year
    CHECK(!Date::parse("2020-13-01").has_value());
    CHECK(!Date::parse("2020-00-10").has_value());
    CHECK(!Date::parse("20200110").has_value());
    CHECK(!Date::parse("").has_value());
    auto d = Date::parse("2021-05-05T12:30:00Z");  // time-of-day discarded
    REQUIRE(d.has_value());
    CHECK(d->iso() == "2021-05-05");
    CHECK(*Date::parse("2021-05-05") == *d);
    CHECK(*Date::parse("2020-01-01") < *Date::parse("2020-01-02"));
    CHECK(*Date::parse("2019-12-31") < *Date::parse("2020-01-01"));
}

TEST_CASE("compute_reduction: pinned values") {
    CHECK(compute_reduction(47791818029ULL, 31644981330ULL) == 33.79);
    CHECK(compute_reduction(100, 100) == 0.00);
    CHECK(compute_reduction(150000000ULL, 70000000ULL) == 53.33);
}

TEST_CASE("compute_reduction: domain errors") {
    CHECK_THROWS_AS(compute_reduction(0, 0), DomainError);
    CHECK_THROWS_AS(compute_reduction(10, 11), DomainError);
}

TEST_CASE("compute_reduction: endpoint and monotonicity properties") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t before = 1 + rng() % 1000000;
        CHECK(compute_reduction(before, before) == 0.0);
        const std::uint64_t a1 = rng() % (before + 1);
        const std::uint64_t a2 = rng() % (before + 1);
        const double r1 = compute_reduction(before, std::min(a1, a2));
        const double r2 = compute_reduction(before, std::max(a1, a2));
        CHECK(r1 >= r2);
    }
}

TEST_CASE("count_tokens whitespace mode") {
    CHECK(count_tokens_ws("adaptive focus lens") == 3);
    CHECK(count_tokens_ws("") == 0);
    CHECK(count_tokens_ws("  leading and trailing  ") == 3);
}

TEST_CASE("count_tokens matches independent splitter over a synthetic corpus") {
    std::mt19937_64 rng(29);
    std::size_t ours = 0, oracle = 0;
    for (int doc = 0; doc < 1000; ++doc) {
        std::string text;
        const int words = static_cast<int>(rng() % 40);
        for (int w = 0; w < words; ++w) {
            const int len = 1 + static_cast<int>(rng() % 12);
            for (int c = 0; c < len; ++c)
                text.push_back(static_cast<char>('a' + rng() % 26));
            text.push_back(rng() % 5 == 0 ? '\t' : ' ');
            if (rng() % 7 == 0) text.push_back(' ');
        }
        ours += count_tokens_ws(text);
        std::istringstream iss(text);
        std::string tok;
        while (iss >> tok) ++oracle;
    }
    CHECK(ours == oracle);
}

TEST_CASE("streaming determinism: two reads yield identical sequences") {
    TempDir tmp;
    const std::string p = tmp.file("in.jsonl");
    std::string content;
    for (int i = 0; i < 50; ++i) {
        content += R"({"pub_no":"P)" + std::to_string(i) +
                   R"(","family_id":"F","pub_date":"2020-01-01"})" "\n";
    }
    content += "not json\n";
    write_file(p, content);
    auto read_all = [&] {
        std::vector<std::string> ids;
        std::vector<std::uint64_t> reject_lines;
        auto st = read_records(p, {}, [&](PatentRecord&& r) { ids.push_back(r.pub_no); },
                               [&](const RejectEntry& e) { reject_lines.push_back(e.line_no); });
        return std::make_tuple(ids, reject_lines, st.docs_in, st.rejects);
    };
    CHECK(read_all() == read_all());
}

TEST_CASE("stage stats merge as a monoid and conserve the ledger") {
    StageStats a{10, 6, 2, 2, 100, 60};
    StageStats b{5, 5, 0, 0, 50, 50};
    CHECK(a.conserved());
    CHECK(b.conserved());
    StageStats ab = a;
    ab.merge(b);
    CHECK(ab.docs_in == 15);
    CHECK(ab.docs_out == 11);
    CHECK(ab.conserved());
    CHECK(StageStats::from_json(ab.to_json()).to_json() == ab.to_json());
}

TEST_CASE("atomic writer leaves no file behind on abandonment, renames on commit") {
    TempDir tmp;
    const std::string p = tmp.file("out.jsonl");
    {
        AtomicJsonlWriter w(p);
        w.write_line("{\"x\":1}");
        // no commit
    }
    CHECK(!fs::exists(p));
    CHECK(!fs::exists(p + ".tmp"));
    {
        AtomicJsonlWriter w(p);
        w.write_line("{\"x\":1}");
        w.commit();
    }
    CHECK(fs::exists(p));
}

TEST_CASE("field doc json round-trip and doc ids") {
    FieldDoc d{make_doc_id("US123", FieldKind::kFirstClaim), FieldKind::kFirstClaim, "a lens"};
    CHECK(d.doc_id == "US123#first_claim");
    auto back = field_doc_from_json(field_doc_to_json(d));
    REQUIRE(back.has_value());
    CHECK(back->doc_id == d.doc_id);
    CHECK(back->field_kind == d.field_kind);
    CHECK(back->text == d.text);
    CHECK(!field_doc_from_json(json{{"doc_id", "x"}}).has_value());
}
