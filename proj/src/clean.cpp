#include "patcorp/clean.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "patcorp/errors.hpp"
#include "patcorp/unicode.hpp"

namespace patcorp {

namespace {

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (ascii_lower(s[i]) != ascii_lower(prefix[i])) return false;
    }
    return true;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

const std::unordered_map<std::string, std::string>& entity_map() {
    static const std::unordered_map<std::string, std::string> m = {
        {"amp", "&"},     {"lt", "<"},      {"gt", ">"},      {"quot", "\""},
        {"apos", "'"},    {"nbsp", " "},    {"ensp", " "},    {"emsp", " "},
        {"thinsp", " "},  {"mdash", "—"}, {"ndash", "–"}, {"shy", ""},
        {"deg", "°"},   {"plusmn", "±"}, {"times", "×"}, {"divide", "÷"},
        {"micro", "µ"}, {"sect", "§"},   {"para", "¶"},  {"middot", "·"},
        {"copy", "©"},  {"reg", "®"},    {"trade", "™"}, {"bull", "•"},
        {"hellip", "…"}, {"prime", "′"}, {"Prime", "″"}, {"le", "≤"},
        {"ge", "≥"},    {"ne", "≠"},     {"lsquo", "‘"}, {"rsquo", "’"},
        {"ldquo", "“"}, {"rdquo", "”"},  {"alpha", "α"}, {"beta", "β"},
        {"gamma", "γ"}, {"delta", "δ"},  {"mu", "μ"},    {"lambda", "λ"},
    };
    return m;
}

// Decodes "&...;" at s[i] (i at '&'). Returns replacement and advances i past
// the reference, or returns nullopt leaving i untouched.
std::optional<std::string> decode_entity(std::string_view s, std::size_t& i) {
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12 || semi == i + 1) return std::nullopt;
    std::string_view body = s.substr(i + 1, semi - i - 1);
    std::string repl;
    if (body[0] == '#') {
        char32_t cp = 0;
        bool ok = body.size() > 1;
        if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
            for (std::size_t k = 2; k < body.size() && ok; ++k) {
                const char c = body[k];
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else { ok = false; break; }
                cp = cp * 16 + static_cast<char32_t>(d);
            }
        } else {
            for (std::size_t k = 1; k < body.size() && ok; ++k) {
                const char c = body[k];
                if (c < '0' || c > '9') { ok = false; break; }
                cp = cp * 10 + static_cast<char32_t>(c - '0');
            }
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
        uni::append_utf8(repl, cp);
    } else {
        auto it = entity_map().find(std::string(body));
        if (it == entity_map().end()) return std::nullopt;
        repl = it->second;
    }
    i = semi + 1;
    return repl;
}

}  // namespace

void CleaningReport::fire(std::string_view rule, std::uint64_t count) {
    for (auto& [name, n] : rules_fired) {
        if (name == rule) {
            n += count;
            return;
        }
    }
    rules_fired.emplace_back(std::string(rule), count);
}

void CleaningReport::merge(const CleaningReport& o) {
    for (const auto& [name, n] : o.rules_fired) fire(name, n);
    chars_removed += o.chars_removed;
}

json CleaningReport::to_json() const {
    json rules = json::object();
    for (const auto& [name, n] : rules_fired) rules[name] = n;
    return json{{"rules_fired", rules}, {"chars_removed", chars_removed}};
}

std::string strip_markup(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '<') {
            // tag start only when followed by a name, '/', '!' or '?'
            if (i + 1 < text.size()) {
                const char n = text[i + 1];
                const bool tagish = std::isalpha(static_cast<unsigned char>(n)) || n == '/' ||
                                    n == '!' || n == '?';
                if (tagish) {
                    if (text.compare(i, 4, "<!--") == 0) {
                        const std::size_t end = text.find("-->", i + 4);
                        i = (end == std::string_view::npos) ? text.size() : end + 3;
                        continue;
                    }
                    const std::size_t end = text.find('>', i + 1);
                    i = (end == std::string_view::npos) ? text.size() : end + 1;
                    continue;
                }
            }
            out.push_back(c);
            ++i;
        } else if (c == '&') {
            if (auto repl = decode_entity(text, i)) {
                out += *repl;
            } else {
                out.push_back(c);
                ++i;
            }
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

std::string normalize_chars(std::string_view text) {
    const std::u32string cps = uni::utf8_decode(text);
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    bool at_start = true;
    for (char32_t cp : cps) {
        bool separator = false;
        bool drop = false;
        switch (cp) {
            case 0x200B: case 0x200C: case 0x200D: case 0xFEFF: case 0x00AD:
                drop = true;  // zero-width and soft hyphen: no word break
                break;
            default:
                if (cp == 0x20 || (cp >= 0x09 && cp <= 0x0D)) separator = true;
                else if (cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F)) separator = true;
                else if (cp == 0xFFFD) separator = true;
                else if (cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
                         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
                         cp == 0x3000 || cp == 0x85)
                    separator = true;
                break;
        }
        if (drop) continue;
        if (separator) {
            pending_space = !at_start;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        uni::append_utf8(out, cp);
        at_start = false;
    }
    return out;
}

BoilerplateConfig BoilerplateConfig::defaults() {
    BoilerplateConfig cfg;
    cfg.prefixes = {
        "ABSTRACT OF THE DISCLOSURE",
        "ABSTRACT:",
        "ABSTRACT",
        "SUMMARY OF THE INVENTION",
        "SUMMARY:",
        "TECHNICAL FIELD:",
        "FIELD OF THE INVENTION",
        "What is claimed is:",
        "What we claim is:",
        "What is claimed:",
        "The invention claimed is:",
        "I claim:",
        "We claim:",
        "Claims:",
        "CLAIM:",
        "It is claimed:",
        "Having thus described the invention, what is claimed is:",
    };
    return cfg;
}

BoilerplateConfig BoilerplateConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw DataError("cannot open boilerplate list: " + path);
    BoilerplateConfig cfg;
    cfg.prefixes.clear();
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        cfg.prefixes.push_back(line);
    }
    return cfg;
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Matches a figure keyword at position i ("fig", "figs", "figure", "figures",
// optionally "fig./figs."); returns length or 0. Caller checks the left word
// boundary.
std::size_t match_fig_keyword(std::string_view s, std::size_t i) {
    if (!starts_with_ci(s.substr(i), "fig")) return 0;
    std::size_t len = 3;
    if (starts_with_ci(s.substr(i), "figures")) len = 7;
    else if (starts_with_ci(s.substr(i), "figure")) len = 6;
    else if (starts_with_ci(s.substr(i), "figs")) len = 4;
    if (i + len < s.size() && is_word_char(s[i + len])) return 0;  // e.g. "figment"
    if (i + len < s.size() && s[i + len] == '.') ++len;
    return len;
}

// Consumes a figure number list after the keyword: "3", "1-3", "2a", "4 and 5",
// "1, 2 and 3". Returns end position, or start when no number follows.
std::size_t consume_fig_numbers(std::string_view s, std::size_t start) {
    std::size_t i = start;
    auto skip_ws = [&] { while (i < s.size() && s[i] == ' ') ++i; };
    auto consume_one = [&]() -> bool {
        std::size_t j = i;
        if (j >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j]))) return false;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j])) &&
               (j + 1 >= s.size() || !is_word_char(s[j + 1])))
            ++j;  // sub-figure letter, e.g. "2a"
        i = j;
        return true;
    };
    skip_ws();
    if (!consume_one()) return start;
    for (;;) {
        const std::size_t save = i;
        skip_ws();
        if (i < s.size() && (s[i] == ',' || s[i] == '-' || s[i] == '/' || s[i] == '&')) {
            ++i;
        } else if (starts_with_ci(s.substr(i), "and ") || starts_with_ci(s.substr(i), "and\t")) {
            i += 3;
        } else if (starts_with_ci(s.substr(i), "to ")) {
            i += 2;
        } else {
            i = save;
            break;
        }
        skip_ws();
        if (!consume_one()) {
            i = save;
            break;
        }
    }
    return i;
}

bool contains_fig_keyword(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((i == 0 || !is_word_char(s[i - 1])) && match_fig_keyword(s, i) > 0) return true;
    }
    return false;
}

std::string tidy_spacing(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == ' ') {
            if (out.empty() || out.back() == ' ' || out.back() == '(') continue;
            // peek: drop the space before closing punctuation
            if (i + 1 < s.size()) {
                const char n = s[i + 1];
                if (n == ',' || n == '.' || n == ';' || n == ':' || n == ')') continue;
            }
        }
        out.push_back(c);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace

std::string remove_boilerplate(std::string_view text, FieldKind kind,
                               const BoilerplateConfig& cfg, CleaningReport* report) {
    (void)kind;  // prefix list is shared across fields; kept for config routing
    std::string_view rest = text;
    bool fired = true;
    while (fired) {
        fired = false;
        for (const std::string& prefix : cfg.prefixes) {
            if (prefix.empty()) continue;
            if (starts_with_ci(rest, prefix)) {
                rest = rest.substr(prefix.size());
                while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) {
                    rest = rest.substr(1);
                }
                if (report) report->fire("boilerplate_prefix");
                fired = true;
            }
        }
    }
    std::string out;
    if (!cfg.remove_figure_refs) {
        out = std::string(rest);
        if (report) report->chars_removed += text.size() - out.size();
        return out;
    }
    out.reserve(rest.size());
    std::size_t i = 0;
    while (i < rest.size()) {
        const char c = rest[i];
        if (c == '(') {
            // parenthesized figure reference: "(see FIG. 2)", "(FIGS. 1-3)"
            const std::size_t close = rest.find(')', i + 1);
            if (close != std::string_view::npos && close - i <= 80) {
                std::string_view inner = rest.substr(i + 1, close - i - 1);
                if (contains_fig_keyword(inner)) {
                    if (report) report->fire("figure_ref_paren");
                    i = close + 1;
                    continue;
                }
            }
        }
        if ((i == 0 || !is_word_char(rest[i - 1]))) {
            const std::size_t klen = match_fig_keyword(rest, i);
            if (klen > 0) {
                const std::size_t end = consume_fig_numbers(rest, i + klen);
                if (end > i + klen) {  // keyword followed by a number: a reference
                    if (report) report->fire("figure_ref_bare");
                    i = end;
                    continue;
                }
            }
        }
        out.push_back(c);
        ++i;
    }
    out = tidy_spacing(out);
    if (report) report->chars_removed += text.size() - out.size();
    return out;
}

ClaimPatterns ClaimPatterns::defaults() {
    return ClaimPatterns{{
        "according to claim",
        "according to any",
        "as claimed in claim",
        "as claimed in any",
        "of claim",
        "of claims",
        "of any of claims",
        "of any one of claims",
        "of any preceding claim",
        "of the preceding claims",
        "as in claim",
        "as defined in claim",
        "as set forth in claim",
        "as recited in claim",
        "in accordance with claim",
        "claimed in any",
    }};
}

std::optional<std::string> select_first_independent_claim(
    const std::vector<std::string>& claims, const ClaimPatterns& patterns) {
    for (const std::string& claim : claims) {
        const std::string lc = to_lower_ascii(claim);
        bool dependent = false;
        for (const std::string& phrase : patterns.dependency_phrases) {
            if (lc.find(phrase) != std::string::npos) {
                dependent = true;
                break;
            }
        }
        if (!dependent) return claim;
    }
    return std::nullopt;
}

std::size_t family_representative(const FamilyGroup& group) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < group.members.size(); ++i) {
        const auto& [no, date] = group.members[i];
        const auto& [bno, bdate] = group.members[best];
        if (date > bdate || (date == bdate && no > bno)) best = i;
    }
    return best;
}

std::vector<PatentRecord> family_dedupe(const std::vector<PatentRecord>& records,
                                        std::uint64_t* missing_family_count) {
    // winner per family: max (pub_date, pub_no)
    std::unordered_map<std::string, std::pair<Date, std::string>> best;
    std::uint64_t missing = 0;
    for (const auto& r : records) {
        if (r.family_id.empty()) {
            ++missing;
            continue;
        }
        auto it = best.find(r.family_id);
        if (it == best.end()) {
            best.emplace(r.family_id, std::make_pair(r.pub_date, r.pub_no));
        } else if (r.pub_date > it->second.first ||
                   (r.pub_date == it->second.first && r.pub_no > it->second.second)) {
            it->second = {r.pub_date, r.pub_no};
        }
    }
    if (missing_family_count) *missing_family_count = missing;
    std::vector<PatentRecord> out;
    for (const auto& r : records) {
        if (r.family_id.empty()) {
            out.push_back(r);  // singleton family
            continue;
        }
        const auto& b = best.at(r.family_id);
        if (r.pub_date == b.first && r.pub_no == b.second) out.push_back(r);
    }
    return out;
}

std::optional<CleanRecord> clean_one_record(const PatentRecord& rec, const Phase1Options& opt,
                                            CleaningReport* report) {
    auto clean_field = [&](const std::string& raw, FieldKind kind) -> std::optional<std::string> {
        std::string s = normalize_chars(strip_markup(raw));
        s = remove_boilerplate(s, kind, opt.boilerplate, report);
        if (s.empty()) return std::nullopt;
        return s;
    };

    CleanRecord out;
    out.pub_no = rec.pub_no;
    if (rec.abstract_raw) out.abstract = clean_field(*rec.abstract_raw, FieldKind::kAbstract);
    if (!rec.claims_raw.empty()) {
        std::vector<std::string> cleaned;
        cleaned.reserve(rec.claims_raw.size());
        for (const auto& c : rec.claims_raw) cleaned.push_back(normalize_chars(strip_markup(c)));
        if (auto sel = select_first_independent_claim(cleaned, opt.claims)) {
            std::string s = remove_boilerplate(*sel, FieldKind::kFirstClaim, opt.boilerplate, report);
            if (!s.empty()) out.first_ind_claim = s;
        }
    }
    if (rec.dwpi_raw) out.dwpi = clean_field(*rec.dwpi_raw, FieldKind::kDwpi);
    if (!out.has_text()) return std::nullopt;
    return out;
}

Phase1Result run_phase1(const std::string& in_path, const std::string& out_path,
                        const Phase1Options& opt) {
    Phase1Result res;
    const std::string reject_path =
        opt.reject_path.empty() ? out_path + ".rejects.jsonl" : opt.reject_path;

    // Pass 1: family winners and duplicate pub_no detection.
    std::unordered_map<std::string, std::pair<Date, std::string>> best;
    std::unordered_set<std::string> seen_pub_no;
    std::unordered_set<std::string> dup_pub_no;
    read_records(
        in_path, opt.schema,
        [&](PatentRecord&& r) {
            if (!seen_pub_no.insert(r.pub_no).second) {
                dup_pub_no.insert(r.pub_no);
                return;
            }
            if (r.family_id.empty()) return;  // singleton, always survives
            auto it = best.find(r.family_id);
            if (it == best.end()) {
                best.emplace(r.family_id, std::make_pair(r.pub_date, r.pub_no));
            } else if (r.pub_date > it->second.first ||
                       (r.pub_date == it->second.first && r.pub_no > it->second.second)) {
                it->second = {r.pub_date, r.pub_no};
            }
        },
        [](const RejectEntry&) {});

    // Pass 2: clean winners and emit.
    AtomicJsonlWriter out(out_path);
    AtomicJsonlWriter rejects(reject_path);
    std::unordered_set<std::string> emitted_pub_no;
    StageStats& st = res.stats;
    read_records(
        in_path, opt.schema,
        [&](PatentRecord&& r) {
            ++st.docs_in;
            if (dup_pub_no.count(r.pub_no) && !emitted_pub_no.insert(r.pub_no).second) {
                ++st.docs_rejected;
                rejects.write_json(json{{"line_no", 0}, {"reason", "duplicate pub_no"},
                                        {"pub_no", r.pub_no}});
                return;
            }
            if (r.abstract_raw) st.tokens_in += count_tokens_ws(*r.abstract_raw);
            for (const auto& c : r.claims_raw) st.tokens_in += count_tokens_ws(c);
            if (r.dwpi_raw) st.tokens_in += count_tokens_ws(*r.dwpi_raw);
            if (!r.family_id.empty()) {
                const auto& b = best.at(r.family_id);
                if (!(r.pub_date == b.first && r.pub_no == b.second)) {
                    ++st.docs_filtered;  // family-dedup loser
                    return;
                }
            } else {
                res.report.fire("missing_family_id_singleton");
            }
            auto cleaned = clean_one_record(r, opt, &res.report);
            if (!cleaned) {
                ++st.docs_filtered;
                rejects.write_json(json{{"line_no", 0}, {"reason", "no text after cleaning"},
                                        {"pub_no", r.pub_no}});
                return;
            }
            if (cleaned->abstract) st.tokens_out += count_tokens_ws(*cleaned->abstract);
            if (cleaned->first_ind_claim) st.tokens_out += count_tokens_ws(*cleaned->first_ind_claim);
            if (cleaned->dwpi) st.tokens_out += count_tokens_ws(*cleaned->dwpi);
            ++st.docs_out;
            out.write_json(clean_record_to_json(*cleaned));
        },
        [&](const RejectEntry& rej) {
            ++st.docs_in;
            ++st.docs_rejected;
            rejects.write_json(json{{"line_no", rej.line_no}, {"reason", rej.reason}});
        });

    out.commit();
    rejects.commit();
    return res;
}

}  // namespace patcorp
