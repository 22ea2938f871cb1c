#pragma once

// Per-field quality filtering: language ID, repetition and quality
// heuristics, and a final pass over line-shape statistics. Thresholds are
// config-declared defaults, not ground truth from any one corpus study.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patcorp/corpus.hpp"
#include "patcorp/langid.hpp"

namespace patcorp {

struct FilterVerdict {
    bool passed = false;
    std::string rule;      // failing rule name, or stage name on pass
    double measured = 0;
    double threshold = 0;

    json to_json() const;
};

struct FilterConfig {
    // language
    std::string lang_accept = "en";
    double lang_confidence = 0.65;

    // repetition
    double max_dup_line_frac = 0.30;
    double max_dup_para_frac = 0.30;
    double max_top2gram_share = 0.20;
    double max_top3gram_share = 0.18;
    double max_top4gram_share = 0.16;

    // quality; min_words sits below the usual web-page floor because patent
    // abstracts and claims are short
    std::uint64_t min_words = 20;
    std::uint64_t max_words = 100000;
    double min_mean_word_len = 3.0;
    double max_mean_word_len = 10.0;
    double max_symbol_word_ratio = 0.10;
    double min_alpha_word_frac = 0.80;

    // line-shape pass; ';' and ':' count as terminal since claim elements
    // end with them
    double min_terminal_punct_frac = 0.12;
    double max_short_line_frac = 0.67;
    std::uint64_t short_line_words = 4;
    double max_bullet_line_frac = 0.90;

    bool audit = false;  // emit verdict trails for passing docs

    json to_json() const;
    static FilterConfig from_json(const json& j);  // throws ConfigError on bad keys
};

LangScore detect_language(std::string_view text, const LangIdModel& model);

FilterVerdict language_filter(std::string_view text, const FilterConfig& cfg,
                              const LangIdModel& model);
FilterVerdict repetition_filter(std::string_view text, const FilterConfig& cfg);
FilterVerdict quality_filter(std::string_view text, const FilterConfig& cfg);
FilterVerdict fineweb_filter(std::string_view text, const FilterConfig& cfg);

struct FilterOutcome {
    bool passed = false;
    std::vector<FilterVerdict> trail;  // stops at the first failure
};

// Cascade in fixed order: language, repetition, quality, line shape.
// Short-circuits at the first failing rule.
FilterOutcome apply_filters(const FieldDoc& doc, const FilterConfig& cfg,
                            const LangIdModel& model);

std::vector<FieldDoc> explode_record(const CleanRecord& rec);

struct FilterStageResult {
    StageStats stats;
};

// Input may be FieldDoc lines or CleanRecord lines (exploded per field).
FilterStageResult run_filter_stage(const std::string& in_path, const std::string& out_path,
                                   const std::string& dropped_path, const FilterConfig& cfg,
                                   const LangIdModel& model, unsigned workers = 1);

}  // namespace patcorp
