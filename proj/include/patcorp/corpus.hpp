#pragma once

// Record/field data model and streaming JSONL ingestion shared by all
// pipeline stages.

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace patcorp {

using json = nlohmann::json;

enum class FieldKind { kAbstract, kFirstClaim, kDwpi };

constexpr const char* kFieldKindNames[] = {"abstract", "first_claim", "dwpi"};

const char* field_kind_name(FieldKind k);
std::optional<FieldKind> parse_field_kind(std::string_view name);

// UTC calendar date; time-of-day from datetime inputs is discarded.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    static std::optional<Date> parse(std::string_view iso);
    std::string iso() const;
    auto operator<=>(const Date&) const = default;
};

struct PatentRecord {
    std::string pub_no;
    std::string family_id;
    Date pub_date;
    std::optional<std::string> abstract_raw;
    std::vector<std::string> claims_raw;
    std::optional<std::string> dwpi_raw;
};

struct CleanRecord {
    std::string pub_no;
    std::optional<std::string> abstract;
    std::optional<std::string> first_ind_claim;
    std::optional<std::string> dwpi;

    bool has_text() const { return abstract || first_ind_claim || dwpi; }
};

struct FieldDoc {
    std::string doc_id;  // pub_no + "#" + field kind
    FieldKind field_kind = FieldKind::kAbstract;
    std::string text;
};

std::string make_doc_id(std::string_view pub_no, FieldKind kind);

// Per-stage ledger. Counters form a mergeable monoid so stages may shard
// input and combine counts associatively.
struct StageStats {
    std::uint64_t docs_in = 0;
    std::uint64_t docs_out = 0;
    std::uint64_t docs_rejected = 0;
    std::uint64_t docs_filtered = 0;
    std::uint64_t tokens_in = 0;
    std::uint64_t tokens_out = 0;

    void merge(const StageStats& o);
    // docs_in == docs_out + docs_rejected + docs_filtered
    bool conserved() const;

    json to_json() const;
    static StageStats from_json(const json& j);
};

// 100*(before-after)/before rounded to 2 decimals. Throws DomainError when
// before == 0 or after > before (accounting bug upstream).
double compute_reduction(std::uint64_t before, std::uint64_t after);

// Whitespace token count (maximal non-whitespace runs); SIMD-dispatched.
// Vocab-mode counting lives in bpe.hpp next to the encoder.
std::size_t count_tokens_ws(std::string_view text);

// ---------------------------------------------------------------------------
// JSONL streaming

struct RejectEntry {
    std::uint64_t line_no = 0;
    std::string reason;
};

// Line-oriented reader; blank lines are skipped but counted in line numbers.
class JsonlReader {
public:
    explicit JsonlReader(const std::string& path);

    bool next(std::string& line);
    std::uint64_t line_no() const { return line_no_; }

private:
    std::ifstream in_;
    std::uint64_t line_no_ = 0;
};

// Writes lines to <path>.tmp and renames into place on commit() so a crash
// never leaves a half-written output behind its final name.
class AtomicJsonlWriter {
public:
    explicit AtomicJsonlWriter(std::string path);
    ~AtomicJsonlWriter();

    void write_line(std::string_view line);
    void write_json(const json& j);
    std::uint64_t lines_written() const { return lines_; }
    void commit();

private:
    std::string path_;
    std::string tmp_path_;
    std::ofstream out_;
    std::uint64_t lines_ = 0;
    bool committed_ = false;
};

// Canonical key mapping for raw record ingestion; values name the input keys.
struct RecordSchema {
    std::string pub_no = "pub_no";
    std::string family_id = "family_id";
    std::string pub_date = "pub_date";
    std::string abstract = "abstract";
    std::string claims = "claims";
    std::string dwpi = "dwpi";
};

// Parses one raw JSONL line. Returns the record or a reject reason.
struct ParsedRecord {
    std::optional<PatentRecord> record;
    std::string reject_reason;  // set when record is absent
};
ParsedRecord parse_record_line(const std::string& line, const RecordSchema& schema);

// Streams records from a JSONL file. Malformed lines go to on_reject and
// never abort the stream; an unreadable file throws DataError.
struct ReadStats {
    std::uint64_t docs_in = 0;
    std::uint64_t rejects = 0;
};
ReadStats read_records(const std::string& path, const RecordSchema& schema,
                       const std::function<void(PatentRecord&&)>& on_record,
                       const std::function<void(const RejectEntry&)>& on_reject);

json clean_record_to_json(const CleanRecord& r);
std::optional<CleanRecord> clean_record_from_json(const json& j);

json field_doc_to_json(const FieldDoc& d);
std::optional<FieldDoc> field_doc_from_json(const json& j);

}  // namespace patcorp
