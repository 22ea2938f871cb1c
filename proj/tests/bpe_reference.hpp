#pragma once

// Quadratic reference BPE trainer used as the oracle for the production
// trainer. It implements the same documented contract with none of the
// production machinery: full pair recount each iteration, linear-scan
// selection, symbol strings instead of interned ids.
//
// Contract under test (shared definition, independent code):
//   words      whitespace split of nfkc_lower(doc); unique words keep their
//              first-appearance rank and a count
//   alphabet   distinct single code points in code-point order, after specials
//   pair count sum over words of adjacent (overlapping) occurrences x count
//   selection  max count, then smallest sticky first-seen stamp
//              (step, word_rank, offset), then lexicographic (left, right);
//              stops when the best count < min_freq or the vocab is full
//   merge      greedy left-to-right rewrite in every word
//   first-seen a pair is stamped when first observed: step 0 on the initial
//              scan, otherwise the 1-based index of the merge that created
//              it; the stamp survives the count dropping to zero

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "patcorp/bpe.hpp"
#include "patcorp/errors.hpp"
#include "patcorp/unicode.hpp"

namespace bpe_ref {

using Stamp = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;
using StrPair = std::pair<std::string, std::string>;

struct RefWord {
    std::vector<std::string> syms;
    std::uint64_t count = 0;
};

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    auto ws = [](char c) { return c == ' ' || (c >= 0x09 && c <= 0x0d); };
    while (i < s.size()) {
        while (i < s.size() && ws(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !ws(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

inline std::vector<std::string> to_cps(const std::string& word) {
    std::vector<std::string> out;
    for (char32_t cp : patcorp::uni::utf8_decode(word)) {
        std::string s;
        patcorp::uni::append_utf8(s, cp);
        out.push_back(s);
    }
    return out;
}

inline patcorp::BpeVocab train(const std::vector<std::string>& docs,
                               const patcorp::BpeTrainOptions& opt) {
    // unique words in first-appearance order
    std::vector<RefWord> words;
    std::map<std::string, std::size_t> index;
    for (const auto& doc : docs) {
        for (const auto& w : split_ws(patcorp::bpe_normalize(doc))) {
            auto it = index.find(w);
            if (it == index.end()) {
                index.emplace(w, words.size());
                words.push_back({to_cps(w), 1});
            } else {
                ++words[it->second].count;
            }
        }
    }
    if (words.empty()) throw patcorp::DataError("reference: empty corpus");

    std::vector<std::string> alphabet;
    for (const auto& w : words) {
        for (const auto& s : w.syms) {
            if (std::find(alphabet.begin(), alphabet.end(), s) == alphabet.end())
                alphabet.push_back(s);
        }
    }
    std::sort(alphabet.begin(), alphabet.end(), [](const std::string& a, const std::string& b) {
        return patcorp::uni::utf8_decode(a)[0] < patcorp::uni::utf8_decode(b)[0];
    });

    patcorp::BpeVocab vocab;
    for (const char* s : patcorp::kSpecialNames) vocab.tokens.emplace_back(s);
    if (opt.vocab_size < patcorp::kNumSpecials + alphabet.size())
        throw patcorp::ConfigError("reference: vocab_size too small");
    for (const auto& s : alphabet) vocab.tokens.push_back(s);

    std::map<StrPair, Stamp> registry;
    std::uint32_t step = 0;
    while (vocab.tokens.size() < opt.vocab_size) {
        // full recount; register unseen pairs in scan order
        std::map<StrPair, std::uint64_t> counts;
        for (std::uint32_t w = 0; w < words.size(); ++w) {
            const auto& syms = words[w].syms;
            for (std::uint32_t i = 0; i + 1 < syms.size(); ++i) {
                const StrPair p{syms[i], syms[i + 1]};
                counts[p] += words[w].count;
                registry.emplace(p, Stamp{step, w, i});
            }
        }
        // linear-scan selection
        bool have = false;
        StrPair best;
        std::uint64_t best_count = 0;
        Stamp best_stamp{};
        for (const auto& [p, c] : counts) {
            if (c < opt.min_freq) continue;
            const Stamp& st = registry.at(p);
            const bool better = !have || c > best_count ||
                                (c == best_count && st < best_stamp) ||
                                (c == best_count && st == best_stamp && p < best);
            if (better) {
                have = true;
                best = p;
                best_count = c;
                best_stamp = st;
            }
        }
        if (!have) break;

        ++step;
        vocab.merges.push_back(best);
        vocab.tokens.push_back(best.first + best.second);
        for (auto& w : words) {
            std::vector<std::string> out;
            out.reserve(w.syms.size());
            std::size_t i = 0;
            while (i < w.syms.size()) {
                if (i + 1 < w.syms.size() && w.syms[i] == best.first &&
                    w.syms[i + 1] == best.second) {
                    out.push_back(best.first + best.second);
                    i += 2;
                } else {
                    out.push_back(w.syms[i]);
                    ++i;
                }
            }
            w.syms = std::move(out);
        }
    }

    vocab.rebuild_index();
    return vocab;
}

}  // namespace bpe_ref
