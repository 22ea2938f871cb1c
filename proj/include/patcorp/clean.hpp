#pragma once

// Field extraction and cleanup: markup stripping, character normalization,
// boilerplate/figure-reference removal, first-independent-claim selection
// and family-level deduplication.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patcorp/corpus.hpp"

namespace patcorp {

struct CleaningReport {
    std::vector<std::pair<std::string, std::uint64_t>> rules_fired;
    std::uint64_t chars_removed = 0;

    void fire(std::string_view rule, std::uint64_t count = 1);
    void merge(const CleaningReport& o);
    json to_json() const;
};

// Removes tag syntax and decodes entity references; inter-tag text is
// preserved in order. Unbalanced tags are removed best-effort.
std::string strip_markup(std::string_view text);

// Control/replacement characters become separators, whitespace runs collapse
// to single spaces, zero-width characters are dropped. Output is valid
// UTF-8 and idempotent under re-application.
std::string normalize_chars(std::string_view text);

struct BoilerplateConfig {
    std::vector<std::string> prefixes;  // stripped at string start, case-insensitive
    bool remove_figure_refs = true;

    static BoilerplateConfig defaults();
    // one prefix per line; '#' starts a comment
    static BoilerplateConfig load(const std::string& path);
};

std::string remove_boilerplate(std::string_view text, FieldKind kind,
                               const BoilerplateConfig& cfg,
                               CleaningReport* report = nullptr);

struct ClaimPatterns {
    std::vector<std::string> dependency_phrases;
    static ClaimPatterns defaults();
};

// First claim without a dependency reference, or nullopt when every claim is
// dependent (or the list is empty). Always returns an element of the input.
std::optional<std::string> select_first_independent_claim(
    const std::vector<std::string>& claims, const ClaimPatterns& patterns);

struct FamilyGroup {
    std::string family_id;
    std::vector<std::pair<std::string, Date>> members;  // (pub_no, pub_date)
};

// Winner of one family: most recent pub_date, ties broken by
// lexicographically greatest pub_no.
std::size_t family_representative(const FamilyGroup& group);

// In-memory family dedup; records without a family_id survive as singleton
// families. Output preserves input order of the survivors.
std::vector<PatentRecord> family_dedupe(const std::vector<PatentRecord>& records,
                                        std::uint64_t* missing_family_count = nullptr);

struct Phase1Options {
    RecordSchema schema;
    BoilerplateConfig boilerplate = BoilerplateConfig::defaults();
    ClaimPatterns claims = ClaimPatterns::defaults();
    std::string reject_path;  // empty → <out>.rejects.jsonl
};

struct Phase1Result {
    StageStats stats;
    CleaningReport report;
};

// Full Phase 1 over a raw-record JSONL file: two passes (family winners,
// then clean + emit) so memory stays at one key per family.
Phase1Result run_phase1(const std::string& in_path, const std::string& out_path,
                        const Phase1Options& opt);

// Per-record cleaning used by run_phase1; exposed for tests.
std::optional<CleanRecord> clean_one_record(const PatentRecord& rec, const Phase1Options& opt,
                                            CleaningReport* report);

}  // namespace patcorp
