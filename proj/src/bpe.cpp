#include "patcorp/bpe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>

#include "patcorp/errors.hpp"
#include "patcorp/unicode.hpp"

namespace patcorp {

std::string bpe_normalize(std::string_view text) { return uni::nfkc_lower(text); }

namespace {

inline bool is_ws(char c) { return c == ' ' || (c >= 0x09 && c <= 0x0d); }

// (start, end) byte spans of maximal non-whitespace runs
std::vector<std::pair<std::uint32_t, std::uint32_t>> word_spans(std::string_view text) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_ws(text[i])) ++i;
        if (i > start)
            out.emplace_back(static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(i));
    }
    return out;
}

// splits a word into single-code-point strings
std::vector<std::string> word_symbols(std::string_view word) {
    std::vector<std::string> syms;
    std::size_t i = 0;
    while (i < word.size()) {
        const unsigned char lead = static_cast<unsigned char>(word[i]);
        std::size_t len = 1;
        if ((lead & 0xE0) == 0xC0) len = 2;
        else if ((lead & 0xF0) == 0xE0) len = 3;
        else if ((lead & 0xF8) == 0xF0) len = 4;
        len = std::min(len, word.size() - i);
        syms.emplace_back(word.substr(i, len));
        i += len;
    }
    return syms;
}

constexpr std::uint64_t pair_key(std::uint32_t l, std::uint32_t r) {
    return (static_cast<std::uint64_t>(l) << 32) | r;
}

struct FirstSeen {
    std::uint32_t step = 0;
    std::uint32_t word_rank = 0;
    std::uint32_t offset = 0;

    bool operator<(const FirstSeen& o) const {
        if (step != o.step) return step < o.step;
        if (word_rank != o.word_rank) return word_rank < o.word_rank;
        return offset < o.offset;
    }
    bool operator==(const FirstSeen& o) const {
        return step == o.step && word_rank == o.word_rank && offset == o.offset;
    }
};

struct TrainWord {
    std::vector<std::uint32_t> syms;
    std::uint64_t count = 0;
};

struct HeapEntry {
    std::uint64_t count;
    FirstSeen seen;
    std::uint32_t left, right;
};

}  // namespace

void BpeVocab::rebuild_index() {
    token_to_id.clear();
    alphabet.clear();
    merge_ranks.clear();
    if (tokens.size() < kNumSpecials) throw DataError("vocab: missing special tokens");
    for (std::uint32_t i = 0; i < kNumSpecials; ++i) {
        if (tokens[i] != kSpecialNames[i])
            throw DataError("vocab: special token mismatch at id " + std::to_string(i));
    }
    for (std::uint32_t id = 0; id < tokens.size(); ++id) {
        if (!token_to_id.emplace(tokens[id], id).second)
            throw DataError("vocab: duplicate token '" + tokens[id] + "'");
    }
    for (std::uint32_t id = kNumSpecials; id < tokens.size(); ++id) {
        const std::u32string cps = uni::utf8_decode(tokens[id]);
        if (cps.size() == 1) alphabet.emplace(cps[0], id);
    }
    for (std::uint32_t rank = 0; rank < merges.size(); ++rank) {
        const auto& [l, r] = merges[rank];
        auto li = token_to_id.find(l), ri = token_to_id.find(r);
        auto mi = token_to_id.find(l + r);
        if (li == token_to_id.end() || ri == token_to_id.end() || mi == token_to_id.end())
            throw DataError("vocab: merge " + std::to_string(rank) +
                            " references tokens missing from the vocabulary");
        merge_ranks.emplace(pair_key(li->second, ri->second),
                            std::make_pair(rank, mi->second));
    }
}

json BpeVocab::to_json() const {
    json specials = json::array();
    for (const char* s : kSpecialNames) specials.push_back(s);
    json vocab = json::array();
    for (const auto& t : tokens) vocab.push_back(t);
    json merges_j = json::array();
    for (const auto& [l, r] : merges) merges_j.push_back(json::array({l, r}));
    return json{{"version", 1}, {"specials", specials}, {"vocab", vocab}, {"merges", merges_j}};
}

BpeVocab BpeVocab::from_json(const json& j) {
    if (!j.is_object() || !j.contains("vocab") || !j.contains("merges"))
        throw DataError("vocab json: missing 'vocab' or 'merges'");
    BpeVocab v;
    for (const auto& t : j["vocab"]) v.tokens.push_back(t.get<std::string>());
    for (const auto& m : j["merges"]) {
        if (!m.is_array() || m.size() != 2) throw DataError("vocab json: malformed merge entry");
        v.merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
    }
    v.rebuild_index();
    return v;
}

void BpeVocab::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot write vocab: " + path);
    out << to_json().dump() << "\n";
    if (!out.good()) throw DataError("write failed: " + path);
}

BpeVocab BpeVocab::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open vocab: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("vocab json: parse error in " + path);
    return from_json(j);
}

BpeVocab bpe_train(const std::function<bool(std::string&)>& next_line,
                   const BpeTrainOptions& opt) {
    // Pass over the corpus: unique words in first-appearance order.
    std::unordered_map<std::string, std::uint32_t> word_index;
    std::vector<std::string> word_strings;
    std::vector<std::uint64_t> word_counts;
    {
        std::string line;
        while (next_line(line)) {
            const std::string norm = bpe_normalize(line);
            for (const auto& [start, end] : word_spans(norm)) {
                std::string w = norm.substr(start, end - start);
                auto [it, inserted] = word_index.emplace(std::move(w), word_strings.size());
                if (inserted) {
                    word_strings.push_back(it->first);
                    word_counts.push_back(1);
                } else {
                    ++word_counts[it->second];
                }
            }
        }
    }
    if (word_strings.empty()) throw DataError("bpe_train: empty corpus");

    // Alphabet in code-point order.
    std::vector<char32_t> alphabet_cps;
    {
        std::unordered_map<char32_t, bool> seen;
        for (const auto& w : word_strings) {
            for (char32_t cp : uni::utf8_decode(w)) {
                if (seen.emplace(cp, true).second) alphabet_cps.push_back(cp);
            }
        }
        std::sort(alphabet_cps.begin(), alphabet_cps.end());
    }

    BpeVocab vocab;
    for (const char* s : kSpecialNames) vocab.tokens.emplace_back(s);
    if (opt.vocab_size < kNumSpecials + alphabet_cps.size())
        throw ConfigError("bpe_train: vocab_size " + std::to_string(opt.vocab_size) +
                          " cannot hold " + std::to_string(alphabet_cps.size()) +
                          " alphabet symbols plus " + std::to_string(kNumSpecials) +
                          " specials");
    std::unordered_map<char32_t, std::uint32_t> cp_to_id;
    for (char32_t cp : alphabet_cps) {
        std::string s;
        uni::append_utf8(s, cp);
        cp_to_id.emplace(cp, static_cast<std::uint32_t>(vocab.tokens.size()));
        vocab.tokens.push_back(std::move(s));
    }

    // Words as symbol-id sequences.
    std::vector<TrainWord> words(word_strings.size());
    for (std::size_t i = 0; i < word_strings.size(); ++i) {
        words[i].count = word_counts[i];
        for (char32_t cp : uni::utf8_decode(word_strings[i]))
            words[i].syms.push_back(cp_to_id.at(cp));
    }

    std::unordered_map<std::uint64_t, std::uint64_t> pair_counts;
    std::unordered_map<std::uint64_t, FirstSeen> first_seen;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> postings;

    for (std::uint32_t w = 0; w < words.size(); ++w) {
        const auto& syms = words[w].syms;
        for (std::uint32_t i = 0; i + 1 < syms.size(); ++i) {
            const std::uint64_t key = pair_key(syms[i], syms[i + 1]);
            pair_counts[key] += words[w].count;
            first_seen.emplace(key, FirstSeen{0, w, i});
            auto& post = postings[key];
            if (post.empty() || post.back() != w) post.push_back(w);
        }
    }

    // count desc, first-seen asc, then (left, right) token strings asc
    const auto heap_less = [&vocab](const HeapEntry& a, const HeapEntry& b) {
        if (a.count != b.count) return a.count < b.count;
        if (!(a.seen == b.seen)) return b.seen < a.seen;
        if (vocab.tokens[a.left] != vocab.tokens[b.left])
            return vocab.tokens[a.left] > vocab.tokens[b.left];
        return vocab.tokens[a.right] > vocab.tokens[b.right];
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(heap_less)> heap(heap_less);
    for (const auto& [key, count] : pair_counts) {
        heap.push({count, first_seen.at(key), static_cast<std::uint32_t>(key >> 32),
                   static_cast<std::uint32_t>(key & 0xFFFFFFFFu)});
    }

    std::uint32_t step = 0;
    while (vocab.tokens.size() < opt.vocab_size && !heap.empty()) {
        const HeapEntry top = heap.top();
        heap.pop();
        const std::uint64_t key = pair_key(top.left, top.right);
        auto ci = pair_counts.find(key);
        const std::uint64_t current = ci == pair_counts.end() ? 0 : ci->second;
        if (current != top.count) continue;  // stale heap entry
        if (current < opt.min_freq) break;   // heap top is the global max

        ++step;
        const std::uint32_t merged_id = static_cast<std::uint32_t>(vocab.tokens.size());
        vocab.merges.emplace_back(vocab.tokens[top.left], vocab.tokens[top.right]);
        vocab.tokens.push_back(vocab.tokens[top.left] + vocab.tokens[top.right]);

        auto post_it = postings.find(key);
        std::vector<std::uint32_t> affected;
        if (post_it != postings.end()) {
            affected = post_it->second;
            std::sort(affected.begin(), affected.end());
            affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        }

        std::unordered_map<std::uint64_t, std::int64_t> touched;  // net count delta
        for (std::uint32_t w : affected) {
            auto& syms = words[w].syms;
            // stale posting: the pair may have been destroyed by earlier merges
            bool present = false;
            for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
                if (syms[i] == top.left && syms[i + 1] == top.right) {
                    present = true;
                    break;
                }
            }
            if (!present) continue;

            const std::int64_t wc = static_cast<std::int64_t>(words[w].count);
            for (std::size_t i = 0; i + 1 < syms.size(); ++i)
                touched[pair_key(syms[i], syms[i + 1])] -= wc;

            // greedy left-to-right replacement
            std::vector<std::uint32_t> out;
            out.reserve(syms.size());
            std::size_t i = 0;
            while (i < syms.size()) {
                if (i + 1 < syms.size() && syms[i] == top.left && syms[i + 1] == top.right) {
                    out.push_back(merged_id);
                    i += 2;
                } else {
                    out.push_back(syms[i]);
                    ++i;
                }
            }
            syms = std::move(out);

            for (std::uint32_t i2 = 0; i2 + 1 < syms.size(); ++i2) {
                const std::uint64_t nk = pair_key(syms[i2], syms[i2 + 1]);
                touched[nk] += wc;
                first_seen.emplace(nk, FirstSeen{step, w, i2});
                auto& post = postings[nk];
                if (post.empty() || post.back() != w) post.push_back(w);
            }
        }

        for (const auto& [k, delta] : touched) {
            if (delta == 0) continue;
            auto& c = pair_counts[k];
            c = static_cast<std::uint64_t>(static_cast<std::int64_t>(c) + delta);
            heap.push({c, first_seen.at(k), static_cast<std::uint32_t>(k >> 32),
                       static_cast<std::uint32_t>(k & 0xFFFFFFFFu)});
        }
    }

    vocab.rebuild_index();
    return vocab;
}

BpeVocab bpe_train_texts(const std::vector<std::string>& docs, const BpeTrainOptions& opt) {
    std::size_t i = 0;
    return bpe_train(
        [&](std::string& line) {
            if (i >= docs.size()) return false;
            line = docs[i++];
            return true;
        },
        opt);
}

BpeVocab bpe_train_file(const std::string& path, const BpeTrainOptions& opt,
                        const std::string& text_key) {
    JsonlReader reader(path);
    return bpe_train(
        [&](std::string& line) {
            std::string raw;
            while (reader.next(raw)) {
                json j = json::parse(raw, nullptr, false);
                if (j.is_discarded() || !j.is_object()) {
                    line = raw;  // plain-text corpus line
                    return true;
                }
                if (j.contains(text_key) && j[text_key].is_string()) {
                    line = j[text_key].get<std::string>();
                    return true;
                }
                // object without a text field: skip
            }
            return false;
        },
        opt);
}

Encoding bpe_encode(std::string_view text, const BpeVocab& vocab) {
    const std::string norm = bpe_normalize(text);
    Encoding enc;

    struct Sym {
        std::uint32_t id;
        std::uint32_t start, end;
    };

    for (const auto& [wstart, wend] : word_spans(norm)) {
        const std::string_view word(norm.data() + wstart, wend - wstart);
        // split to code points, mapping each to an alphabet id or UNK
        std::vector<Sym> syms;
        std::size_t i = 0;
        while (i < word.size()) {
            const unsigned char lead = static_cast<unsigned char>(word[i]);
            std::size_t len = 1;
            if ((lead & 0xE0) == 0xC0) len = 2;
            else if ((lead & 0xF0) == 0xE0) len = 3;
            else if ((lead & 0xF8) == 0xF0) len = 4;
            len = std::min(len, word.size() - i);
            const std::u32string cps = uni::utf8_decode(word.substr(i, len));
            const char32_t cp = cps.empty() ? 0xFFFD : cps[0];
            auto it = vocab.alphabet.find(cp);
            const std::uint32_t id = it == vocab.alphabet.end() ? kUnkId : it->second;
            if (id == kUnkId && !syms.empty() && syms.back().id == kUnkId) {
                syms.back().end = static_cast<std::uint32_t>(wstart + i + len);  // fuse run
            } else {
                syms.push_back({id, static_cast<std::uint32_t>(wstart + i),
                                static_cast<std::uint32_t>(wstart + i + len)});
            }
            i += len;
        }

        // apply merges in learned order within maximal known segments;
        // [UNK] blocks merging across it
        for (;;) {
            std::uint32_t best_rank = UINT32_MAX;
            for (std::size_t k = 0; k + 1 < syms.size(); ++k) {
                if (syms[k].id == kUnkId || syms[k + 1].id == kUnkId) continue;
                auto it = vocab.merge_ranks.find(pair_key(syms[k].id, syms[k + 1].id));
                if (it != vocab.merge_ranks.end() && it->second.first < best_rank)
                    best_rank = it->second.first;
            }
            if (best_rank == UINT32_MAX) break;
            const auto& [l, r] = vocab.merges[best_rank];
            const std::uint32_t lid = vocab.token_to_id.at(l);
            const std::uint32_t rid = vocab.token_to_id.at(r);
            const std::uint32_t mid = vocab.token_to_id.at(l + r);
            std::vector<Sym> out;
            out.reserve(syms.size());
            std::size_t k = 0;
            while (k < syms.size()) {
                if (k + 1 < syms.size() && syms[k].id == lid && syms[k + 1].id == rid) {
                    out.push_back({mid, syms[k].start, syms[k + 1].end});
                    k += 2;
                } else {
                    out.push_back(syms[k]);
                    ++k;
                }
            }
            syms = std::move(out);
        }

        for (const auto& s : syms) {
            enc.ids.push_back(s.id);
            enc.offsets.emplace_back(s.start, s.end);
        }
    }
    return enc;
}

std::string bpe_decode(const std::vector<std::uint32_t>& ids, const BpeVocab& vocab,
                       bool skip_specials) {
    std::string out;
    for (std::uint32_t id : ids) {
        if (id >= vocab.tokens.size())
            throw DataError("decode: id " + std::to_string(id) + " out of range");
        if (id < kNumSpecials) {
            if (skip_specials) continue;
            out += vocab.tokens[id];
            continue;
        }
        out += vocab.tokens[id];
    }
    return out;
}

std::string bpe_decode_text(const Encoding& enc, const BpeVocab& vocab, bool skip_specials) {
    std::string out;
    std::uint32_t prev_end = UINT32_MAX;
    for (std::size_t i = 0; i < enc.ids.size(); ++i) {
        const std::uint32_t id = enc.ids[i];
        if (id >= vocab.tokens.size())
            throw DataError("decode: id " + std::to_string(id) + " out of range");
        if (id < kNumSpecials && skip_specials) continue;
        const auto& [start, end] = enc.offsets[i];
        if (prev_end != UINT32_MAX && start > prev_end) out.push_back(' ');
        out += vocab.tokens[id];
        prev_end = end;
    }
    return out;
}

std::size_t count_tokens_vocab(std::string_view text, const BpeVocab& vocab) {
    return bpe_encode(text, vocab).ids.size();
}

double token_entropy(const std::vector<std::string>& sample, const BpeVocab& vocab) {
    std::unordered_map<std::uint32_t, std::uint64_t> hist;
    std::uint64_t total = 0;
    for (const auto& text : sample) {
        for (std::uint32_t id : bpe_encode(text, vocab).ids) {
            ++hist[id];
            ++total;
        }
    }
    if (total == 0) return 0.0;
    double h = 0;
    for (const auto& [id, c] : hist) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double unk_rate(const std::vector<std::string>& sample, const BpeVocab& vocab) {
    std::uint64_t unk = 0, total = 0;
    for (const auto& text : sample) {
        for (std::uint32_t id : bpe_encode(text, vocab).ids) {
            if (id == kUnkId) ++unk;
            ++total;
        }
    }
    if (total == 0) return 0.0;
    return static_cast<double>(unk) / static_cast<double>(total);
}

}  // namespace patcorp
