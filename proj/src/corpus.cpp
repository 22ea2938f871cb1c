#include "patcorp/corpus.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "patcorp/errors.hpp"
#include "patcorp/simd_kernels.hpp"

namespace patcorp {

const char* field_kind_name(FieldKind k) { return kFieldKindNames[static_cast<int>(k)]; }

std::optional<FieldKind> parse_field_kind(std::string_view name) {
    for (int i = 0; i < 3; ++i) {
        if (name == kFieldKindNames[i]) return static_cast<FieldKind>(i);
    }
    return std::nullopt;
}

std::string make_doc_id(std::string_view pub_no, FieldKind kind) {
    std::string id(pub_no);
    id.push_back('#');
    id += field_kind_name(kind);
    return id;
}

namespace {
bool parse_int(std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap(y)) return 29;
    return kDays[m - 1];
}
}  // namespace

std::optional<Date> Date::parse(std::string_view iso) {
    // accept YYYY-MM-DD, optionally followed by a time part
    if (iso.size() > 10 && (iso[10] == 'T' || iso[10] == ' ')) iso = iso.substr(0, 10);
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    Date d;
    if (!parse_int(iso.substr(0, 4), d.year) || !parse_int(iso.substr(5, 2), d.month) ||
        !parse_int(iso.substr(8, 2), d.day))
        return std::nullopt;
    if (d.year < 1 || d.month < 1 || d.month > 12 || d.day < 1 ||
        d.day > days_in_month(d.year, d.month))
        return std::nullopt;
    return d;
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

void StageStats::merge(const StageStats& o) {
    docs_in += o.docs_in;
    docs_out += o.docs_out;
    docs_rejected += o.docs_rejected;
    docs_filtered += o.docs_filtered;
    tokens_in += o.tokens_in;
    tokens_out += o.tokens_out;
}

bool StageStats::conserved() const {
    return docs_in == docs_out + docs_rejected + docs_filtered;
}

json StageStats::to_json() const {
    return json{{"docs_in", docs_in},           {"docs_out", docs_out},
                {"docs_rejected", docs_rejected}, {"docs_filtered", docs_filtered},
                {"tokens_in", tokens_in},       {"tokens_out", tokens_out}};
}

StageStats StageStats::from_json(const json& j) {
    StageStats s;
    s.docs_in = j.value("docs_in", 0ULL);
    s.docs_out = j.value("docs_out", 0ULL);
    s.docs_rejected = j.value("docs_rejected", 0ULL);
    s.docs_filtered = j.value("docs_filtered", 0ULL);
    s.tokens_in = j.value("tokens_in", 0ULL);
    s.tokens_out = j.value("tokens_out", 0ULL);
    return s;
}

double compute_reduction(std::uint64_t before, std::uint64_t after) {
    if (before == 0) throw DomainError("compute_reduction: before == 0");
    if (after > before) throw DomainError("compute_reduction: after > before");
    const double pct =
        100.0 * (static_cast<double>(before) - static_cast<double>(after)) /
        static_cast<double>(before);
    return std::round(pct * 100.0) / 100.0;
}

std::size_t count_tokens_ws(std::string_view text) {
    static const simd::TokenCountFn fn = simd::ws_token_count();
    return fn(text.data(), text.size());
}

JsonlReader::JsonlReader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_.is_open()) throw DataError("cannot open input file: " + path);
}

bool JsonlReader::next(std::string& line) {
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        return true;
    }
    return false;
}

AtomicJsonlWriter::AtomicJsonlWriter(std::string path)
    : path_(std::move(path)), tmp_path_(path_ + ".tmp"), out_(tmp_path_, std::ios::binary) {
    if (!out_.is_open()) throw DataError("cannot open output file: " + tmp_path_);
}

AtomicJsonlWriter::~AtomicJsonlWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void AtomicJsonlWriter::write_line(std::string_view line) {
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.put('\n');
    ++lines_;
}

void AtomicJsonlWriter::write_json(const json& j) { write_line(j.dump()); }

void AtomicJsonlWriter::commit() {
    out_.flush();
    if (!out_.good()) throw DataError("write failed: " + tmp_path_);
    out_.close();
    std::filesystem::rename(tmp_path_, path_);
    committed_ = true;
}

ParsedRecord parse_record_line(const std::string& line, const RecordSchema& schema) {
    ParsedRecord out;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        out.reject_reason = "malformed json";
        return out;
    }
    PatentRecord r;
    if (!j.contains(schema.pub_no) || !j[schema.pub_no].is_string() ||
        j[schema.pub_no].get_ref<const std::string&>().empty()) {
        out.reject_reason = "missing pub_no";
        return out;
    }
    r.pub_no = j[schema.pub_no].get<std::string>();
    if (j.contains(schema.family_id) && j[schema.family_id].is_string())
        r.family_id = j[schema.family_id].get<std::string>();
    if (!j.contains(schema.pub_date) || !j[schema.pub_date].is_string()) {
        out.reject_reason = "missing pub_date";
        return out;
    }
    auto date = Date::parse(j[schema.pub_date].get_ref<const std::string&>());
    if (!date) {
        out.reject_reason = "unparseable pub_date";
        return out;
    }
    r.pub_date = *date;
    if (j.contains(schema.abstract) && j[schema.abstract].is_string())
        r.abstract_raw = j[schema.abstract].get<std::string>();
    if (j.contains(schema.claims)) {
        const json& c = j[schema.claims];
        if (c.is_array()) {
            for (const auto& item : c) {
                if (item.is_string()) r.claims_raw.push_back(item.get<std::string>());
            }
        } else if (c.is_string()) {
            r.claims_raw.push_back(c.get<std::string>());
        }
    }
    if (j.contains(schema.dwpi) && j[schema.dwpi].is_string())
        r.dwpi_raw = j[schema.dwpi].get<std::string>();
    out.record = std::move(r);
    return out;
}

ReadStats read_records(const std::string& path, const RecordSchema& schema,
                       const std::function<void(PatentRecord&&)>& on_record,
                       const std::function<void(const RejectEntry&)>& on_reject) {
    JsonlReader reader(path);
    ReadStats stats;
    std::string line;
    while (reader.next(line)) {
        ++stats.docs_in;
        ParsedRecord p = parse_record_line(line, schema);
        if (p.record) {
            on_record(std::move(*p.record));
        } else {
            ++stats.rejects;
            on_reject(RejectEntry{reader.line_no(), p.reject_reason});
        }
    }
    return stats;
}

json clean_record_to_json(const CleanRecord& r) {
    json j{{"pub_no", r.pub_no}};
    if (r.abstract) j["abstract"] = *r.abstract;
    if (r.first_ind_claim) j["first_ind_claim"] = *r.first_ind_claim;
    if (r.dwpi) j["dwpi"] = *r.dwpi;
    return j;
}

std::optional<CleanRecord> clean_record_from_json(const json& j) {
    if (!j.is_object() || !j.contains("pub_no") || !j["pub_no"].is_string()) return std::nullopt;
    CleanRecord r;
    r.pub_no = j["pub_no"].get<std::string>();
    if (j.contains("abstract") && j["abstract"].is_string())
        r.abstract = j["abstract"].get<std::string>();
    if (j.contains("first_ind_claim") && j["first_ind_claim"].is_string())
        r.first_ind_claim = j["first_ind_claim"].get<std::string>();
    if (j.contains("dwpi") && j["dwpi"].is_string()) r.dwpi = j["dwpi"].get<std::string>();
    return r;
}

json field_doc_to_json(const FieldDoc& d) {
    return json{{"doc_id", d.doc_id},
                {"field_kind", field_kind_name(d.field_kind)},
                {"text", d.text}};
}

std::optional<FieldDoc> field_doc_from_json(const json& j) {
    if (!j.is_object() || !j.contains("doc_id") || !j.contains("field_kind") ||
        !j.contains("text"))
        return std::nullopt;
    if (!j["doc_id"].is_string() || !j["field_kind"].is_string() || !j["text"].is_string())
        return std::nullopt;
    auto kind = parse_field_kind(j["field_kind"].get_ref<const std::string&>());
    if (!kind) return std::nullopt;
    FieldDoc d;
    d.doc_id = j["doc_id"].get<std::string>();
    d.field_kind = *kind;
    d.text = j["text"].get<std::string>();
    return d;
}

}  // namespace patcorp
