#include "patcorp/filters.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "patcorp/errors.hpp"
#include "patcorp/hash64.hpp"

namespace patcorp {

json FilterVerdict::to_json() const {
    return json{{"passed", passed}, {"rule", rule}, {"measured", measured},
                {"threshold", threshold}};
}

json FilterConfig::to_json() const {
    return json{
        {"lang_accept", lang_accept},
        {"lang_confidence", lang_confidence},
        {"max_dup_line_frac", max_dup_line_frac},
        {"max_dup_para_frac", max_dup_para_frac},
        {"max_top2gram_share", max_top2gram_share},
        {"max_top3gram_share", max_top3gram_share},
        {"max_top4gram_share", max_top4gram_share},
        {"min_words", min_words},
        {"max_words", max_words},
        {"min_mean_word_len", min_mean_word_len},
        {"max_mean_word_len", max_mean_word_len},
        {"max_symbol_word_ratio", max_symbol_word_ratio},
        {"min_alpha_word_frac", min_alpha_word_frac},
        {"min_terminal_punct_frac", min_terminal_punct_frac},
        {"max_short_line_frac", max_short_line_frac},
        {"short_line_words", short_line_words},
        {"max_bullet_line_frac", max_bullet_line_frac},
        {"audit", audit},
    };
}

FilterConfig FilterConfig::from_json(const json& j) {
    FilterConfig cfg;
    const json defaults = cfg.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key))
            throw ConfigError("filter config: unknown key '" + key + "'");
        if (defaults[key].is_boolean() != value.is_boolean() ||
            (defaults[key].is_number() && !value.is_number()) ||
            (defaults[key].is_string() && !value.is_string()))
            throw ConfigError("filter config: bad type for key '" + key + "'");
    }
    cfg.lang_accept = j.value("lang_accept", cfg.lang_accept);
    cfg.lang_confidence = j.value("lang_confidence", cfg.lang_confidence);
    cfg.max_dup_line_frac = j.value("max_dup_line_frac", cfg.max_dup_line_frac);
    cfg.max_dup_para_frac = j.value("max_dup_para_frac", cfg.max_dup_para_frac);
    cfg.max_top2gram_share = j.value("max_top2gram_share", cfg.max_top2gram_share);
    cfg.max_top3gram_share = j.value("max_top3gram_share", cfg.max_top3gram_share);
    cfg.max_top4gram_share = j.value("max_top4gram_share", cfg.max_top4gram_share);
    cfg.min_words = j.value("min_words", cfg.min_words);
    cfg.max_words = j.value("max_words", cfg.max_words);
    cfg.min_mean_word_len = j.value("min_mean_word_len", cfg.min_mean_word_len);
    cfg.max_mean_word_len = j.value("max_mean_word_len", cfg.max_mean_word_len);
    cfg.max_symbol_word_ratio = j.value("max_symbol_word_ratio", cfg.max_symbol_word_ratio);
    cfg.min_alpha_word_frac = j.value("min_alpha_word_frac", cfg.min_alpha_word_frac);
    cfg.min_terminal_punct_frac = j.value("min_terminal_punct_frac", cfg.min_terminal_punct_frac);
    cfg.max_short_line_frac = j.value("max_short_line_frac", cfg.max_short_line_frac);
    cfg.short_line_words = j.value("short_line_words", cfg.short_line_words);
    cfg.max_bullet_line_frac = j.value("max_bullet_line_frac", cfg.max_bullet_line_frac);
    cfg.audit = j.value("audit", cfg.audit);
    return cfg;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string_view line = trim(text.substr(start, i - start));
            if (!line.empty()) out.push_back(line);
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string_view> split_paragraphs(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find("\n\n", start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view para = trim(text.substr(start, end - start));
        if (!para.empty()) out.push_back(para);
        start = end + 2;
    }
    return out;
}

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

double duplicate_fraction(const std::vector<std::string_view>& items) {
    if (items.empty()) return 0.0;
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t dups = 0;
    for (auto s : items) {
        if (!seen.insert(hash_bytes(s)).second) ++dups;
    }
    return static_cast<double>(dups) / static_cast<double>(items.size());
}

// Fraction of word characters covered by occurrences of the most frequent
// word n-gram (case-folded). Word lengths are counted in code points.
double top_ngram_share(const std::vector<std::string_view>& words, std::size_t n) {
    if (words.size() < n) return 0.0;
    std::vector<std::uint64_t> word_hashes;
    std::vector<std::size_t> word_cps;
    word_hashes.reserve(words.size());
    word_cps.reserve(words.size());
    std::size_t total_cps = 0;
    for (auto w : words) {
        std::string lw(w);
        for (char& c : lw) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        word_hashes.push_back(hash_bytes(lw));
        std::size_t cps = 0;
        for (unsigned char c : lw) {
            if ((c & 0xC0) != 0x80) ++cps;
        }
        word_cps.push_back(cps);
        total_cps += cps;
    }
    if (total_cps == 0) return 0.0;
    struct Best {
        std::uint64_t count = 0;
        std::size_t chars = 0;
    };
    std::unordered_map<std::uint64_t, Best> grams;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        std::size_t chars = 0;
        for (std::size_t k = 0; k < n; ++k) {
            h = mix64(h ^ word_hashes[i + k]);
            chars += word_cps[i + k];
        }
        auto& b = grams[h];
        ++b.count;
        b.chars = chars;
    }
    double best = 0;
    for (const auto& [h, b] : grams) {
        if (b.count < 2) continue;  // a gram seen once is not repetition
        best = std::max(best, static_cast<double>(b.count * b.chars));
    }
    return best / static_cast<double>(total_cps);
}

bool word_has_alpha(std::string_view w) {
    for (unsigned char c : w) {
        if (std::isalpha(c) || c >= 0x80) return true;
    }
    return false;
}

FilterVerdict pass_verdict(std::string_view stage) {
    return FilterVerdict{true, std::string(stage), 0, 0};
}

FilterVerdict fail_verdict(std::string_view rule, double measured, double threshold) {
    return FilterVerdict{false, std::string(rule), measured, threshold};
}

}  // namespace

LangScore detect_language(std::string_view text, const LangIdModel& model) {
    return model.classify(text);
}

FilterVerdict language_filter(std::string_view text, const FilterConfig& cfg,
                              const LangIdModel& model) {
    if (trim(text).empty()) return fail_verdict("empty", 0, 0);
    const LangScore score = model.classify(text);
    if (score.language != cfg.lang_accept)
        return fail_verdict("language", 0.0, cfg.lang_confidence);
    if (score.confidence < cfg.lang_confidence)
        return fail_verdict("language_confidence", score.confidence, cfg.lang_confidence);
    return pass_verdict("language");
}

FilterVerdict repetition_filter(std::string_view text, const FilterConfig& cfg) {
    const auto lines = split_lines(text);
    const double dup_lines = duplicate_fraction(lines);
    if (dup_lines > cfg.max_dup_line_frac)
        return fail_verdict("dup_line_frac", dup_lines, cfg.max_dup_line_frac);

    const auto paras = split_paragraphs(text);
    const double dup_paras = duplicate_fraction(paras);
    if (dup_paras > cfg.max_dup_para_frac)
        return fail_verdict("dup_para_frac", dup_paras, cfg.max_dup_para_frac);

    const auto words = split_words(text);
    const double s2 = top_ngram_share(words, 2);
    if (s2 > cfg.max_top2gram_share)
        return fail_verdict("top2gram_share", s2, cfg.max_top2gram_share);
    const double s3 = top_ngram_share(words, 3);
    if (s3 > cfg.max_top3gram_share)
        return fail_verdict("top3gram_share", s3, cfg.max_top3gram_share);
    const double s4 = top_ngram_share(words, 4);
    if (s4 > cfg.max_top4gram_share)
        return fail_verdict("top4gram_share", s4, cfg.max_top4gram_share);
    return pass_verdict("repetition");
}

FilterVerdict quality_filter(std::string_view text, const FilterConfig& cfg) {
    const auto words = split_words(text);
    const double n = static_cast<double>(words.size());
    if (words.size() < cfg.min_words)
        return fail_verdict("min_words", n, static_cast<double>(cfg.min_words));
    if (words.size() > cfg.max_words)
        return fail_verdict("max_words", n, static_cast<double>(cfg.max_words));

    std::size_t total_cps = 0;
    std::uint64_t alpha_words = 0;
    for (auto w : words) {
        for (unsigned char c : w) {
            if ((c & 0xC0) != 0x80) ++total_cps;
        }
        if (word_has_alpha(w)) ++alpha_words;
    }
    const double mean_len = static_cast<double>(total_cps) / n;
    if (mean_len < cfg.min_mean_word_len)
        return fail_verdict("mean_word_len_low", mean_len, cfg.min_mean_word_len);
    if (mean_len > cfg.max_mean_word_len)
        return fail_verdict("mean_word_len_high", mean_len, cfg.max_mean_word_len);

    // symbols: '#', ellipsis (either form); counted per occurrence
    std::uint64_t symbols = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '#') ++symbols;
        else if (text.compare(i, 3, "...") == 0) { ++symbols; i += 2; }
        else if (text.compare(i, 3, "…") == 0) { ++symbols; i += 2; }
    }
    const double sym_ratio = static_cast<double>(symbols) / n;
    if (sym_ratio > cfg.max_symbol_word_ratio)
        return fail_verdict("symbol_word_ratio", sym_ratio, cfg.max_symbol_word_ratio);

    const double alpha_frac = static_cast<double>(alpha_words) / n;
    if (alpha_frac < cfg.min_alpha_word_frac)
        return fail_verdict("alpha_word_frac", alpha_frac, cfg.min_alpha_word_frac);
    return pass_verdict("quality");
}

FilterVerdict fineweb_filter(std::string_view text, const FilterConfig& cfg) {
    const auto lines = split_lines(text);
    if (lines.empty()) return fail_verdict("empty", 0, 0);
    const double n = static_cast<double>(lines.size());

    static constexpr std::string_view kTerminal = ".!?\"';:";
    static constexpr std::string_view kBullets = "-*•·‣▪◦";

    std::uint64_t punct = 0, shorts = 0, bullets = 0;
    for (auto line : lines) {
        if (kTerminal.find(line.back()) != std::string_view::npos) ++punct;
        if (split_words(line).size() < cfg.short_line_words) ++shorts;
        // bullet markers may be multi-byte; compare prefixes
        for (std::size_t i = 0; i < kBullets.size();) {
            const unsigned char lead = static_cast<unsigned char>(kBullets[i]);
            std::size_t blen = 1;
            if ((lead & 0xE0) == 0xC0) blen = 2;
            else if ((lead & 0xF0) == 0xE0) blen = 3;
            if (line.substr(0, blen) == kBullets.substr(i, blen)) {
                ++bullets;
                break;
            }
            i += blen;
        }
    }
    const double punct_frac = static_cast<double>(punct) / n;
    if (punct_frac < cfg.min_terminal_punct_frac)
        return fail_verdict("terminal_punct_frac", punct_frac, cfg.min_terminal_punct_frac);
    const double short_frac = static_cast<double>(shorts) / n;
    if (short_frac > cfg.max_short_line_frac)
        return fail_verdict("short_line_frac", short_frac, cfg.max_short_line_frac);
    const double bullet_frac = static_cast<double>(bullets) / n;
    if (bullet_frac > cfg.max_bullet_line_frac)
        return fail_verdict("bullet_line_frac", bullet_frac, cfg.max_bullet_line_frac);
    return pass_verdict("fineweb");
}

FilterOutcome apply_filters(const FieldDoc& doc, const FilterConfig& cfg,
                            const LangIdModel& model) {
    FilterOutcome out;
    FilterVerdict v = language_filter(doc.text, cfg, model);
    out.trail.push_back(v);
    if (!v.passed) return out;
    v = repetition_filter(doc.text, cfg);
    out.trail.push_back(v);
    if (!v.passed) return out;
    v = quality_filter(doc.text, cfg);
    out.trail.push_back(v);
    if (!v.passed) return out;
    v = fineweb_filter(doc.text, cfg);
    out.trail.push_back(v);
    if (!v.passed) return out;
    out.passed = true;
    return out;
}

std::vector<FieldDoc> explode_record(const CleanRecord& rec) {
    std::vector<FieldDoc> out;
    if (rec.abstract)
        out.push_back({make_doc_id(rec.pub_no, FieldKind::kAbstract), FieldKind::kAbstract,
                       *rec.abstract});
    if (rec.first_ind_claim)
        out.push_back({make_doc_id(rec.pub_no, FieldKind::kFirstClaim), FieldKind::kFirstClaim,
                       *rec.first_ind_claim});
    if (rec.dwpi)
        out.push_back({make_doc_id(rec.pub_no, FieldKind::kDwpi), FieldKind::kDwpi, *rec.dwpi});
    return out;
}

FilterStageResult run_filter_stage(const std::string& in_path, const std::string& out_path,
                                   const std::string& dropped_path, const FilterConfig& cfg,
                                   const LangIdModel& model, unsigned workers) {
    FilterStageResult res;
    StageStats& st = res.stats;
    AtomicJsonlWriter out(out_path);
    AtomicJsonlWriter dropped(dropped_path);

    // Collect docs first (explode records if the input is record-shaped),
    // then score in parallel chunks and emit in input order.
    std::vector<FieldDoc> docs;
    {
        JsonlReader reader(in_path);
        std::string line;
        while (reader.next(line)) {
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object()) {
                ++st.docs_in;
                ++st.docs_rejected;
                dropped.write_json(json{{"line_no", reader.line_no()}, {"rule", "malformed"}});
                continue;
            }
            if (auto doc = field_doc_from_json(j)) {
                ++st.docs_in;
                docs.push_back(std::move(*doc));
            } else if (auto rec = clean_record_from_json(j)) {
                for (auto& d : explode_record(*rec)) {
                    ++st.docs_in;
                    docs.push_back(std::move(d));
                }
            } else {
                ++st.docs_in;
                ++st.docs_rejected;
                dropped.write_json(json{{"line_no", reader.line_no()}, {"rule", "malformed"}});
            }
        }
    }

    std::vector<FilterOutcome> outcomes(docs.size());
    if (workers <= 1 || docs.size() < 64) {
        for (std::size_t i = 0; i < docs.size(); ++i)
            outcomes[i] = apply_filters(docs[i], cfg, model);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(64);
                    if (i >= docs.size()) return;
                    const std::size_t end = std::min(docs.size(), i + 64);
                    for (std::size_t k = i; k < end; ++k)
                        outcomes[k] = apply_filters(docs[k], cfg, model);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < docs.size(); ++i) {
        const FieldDoc& d = docs[i];
        const FilterOutcome& o = outcomes[i];
        st.tokens_in += count_tokens_ws(d.text);
        if (o.passed) {
            ++st.docs_out;
            st.tokens_out += count_tokens_ws(d.text);
            out.write_json(field_doc_to_json(d));
            if (cfg.audit) {
                json trail = json::array();
                for (const auto& v : o.trail) trail.push_back(v.to_json());
                dropped.write_json(json{{"doc_id", d.doc_id}, {"passed", true},
                                        {"trail", trail}});
            }
        } else {
            ++st.docs_filtered;
            const FilterVerdict& v = o.trail.back();
            dropped.write_json(json{{"doc_id", d.doc_id}, {"rule", v.rule},
                                    {"measured", v.measured}, {"threshold", v.threshold}});
        }
    }
    out.commit();
    dropped.commit();
    return res;
}

}  // namespace patcorp
