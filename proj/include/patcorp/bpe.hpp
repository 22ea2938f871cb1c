#pragma once

// From-scratch BPE tokenizer: NFKC+lowercase normalization, whitespace
// pre-tokenization, greedy pair-merge training with a deterministic tie
// rule, JSON serialization, encode/decode and evaluation metrics.
//
// Tie rule (training): highest pair count, then earliest first-seen pair,
// then lexicographically smallest (left, right). "First seen" is sticky: a
// pair is stamped (step, word_rank, offset) when it first enters the count
// table — step 0 during the initial scan in word-first-appearance order, or
// the merge step that first created it — and keeps that stamp even if its
// count later drops to zero. tests/bpe_reference.hpp implements the same
// contract independently.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patcorp/corpus.hpp"

namespace patcorp {

inline constexpr std::uint32_t kUnkId = 0;
inline constexpr std::uint32_t kPadId = 1;
inline constexpr std::uint32_t kClsId = 2;
inline constexpr std::uint32_t kSepId = 3;
inline constexpr std::uint32_t kMaskId = 4;
inline constexpr std::uint32_t kNumSpecials = 5;
inline constexpr const char* kSpecialNames[kNumSpecials] = {"[UNK]", "[PAD]", "[CLS]", "[SEP]",
                                                            "[MASK]"};

// NFKC form, then lowercased; idempotent.
std::string bpe_normalize(std::string_view text);

struct BpeVocab {
    std::vector<std::string> tokens;  // id -> string; ids 0..4 are specials
    std::vector<std::pair<std::string, std::string>> merges;

    // derived (rebuild_index)
    std::unordered_map<std::string, std::uint32_t> token_to_id;
    std::unordered_map<char32_t, std::uint32_t> alphabet;
    // (left_id << 32 | right_id) -> (rank, merged_id)
    std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> merge_ranks;

    std::size_t size() const { return tokens.size(); }
    void rebuild_index();  // throws DataError if the vocab is not closed

    json to_json() const;
    static BpeVocab from_json(const json& j);
    void save(const std::string& path) const;
    static BpeVocab load(const std::string& path);
};

struct BpeTrainOptions {
    std::uint32_t vocab_size = 49152;  // includes the 5 specials
    std::uint32_t min_freq = 2;
};

// Trains from a line stream (each line is one document). Throws ConfigError
// when vocab_size cannot hold the specials plus alphabet, DataError on an
// empty corpus.
BpeVocab bpe_train(const std::function<bool(std::string&)>& next_line,
                   const BpeTrainOptions& opt);
BpeVocab bpe_train_texts(const std::vector<std::string>& docs, const BpeTrainOptions& opt);
BpeVocab bpe_train_file(const std::string& path, const BpeTrainOptions& opt,
                        const std::string& text_key = "text");

struct Encoding {
    std::vector<std::uint32_t> ids;
    // per-token byte span into the normalized text
    std::vector<std::pair<std::uint32_t, std::uint32_t>> offsets;
};

// normalize -> whitespace split -> per-word merges in learned order.
// Maximal runs of out-of-alphabet characters map to one [UNK].
Encoding bpe_encode(std::string_view text, const BpeVocab& vocab);

// Concatenates token strings; word boundaries are not represented in a bare
// id list, so multi-word fidelity needs the Encoding overload below.
// Specials render as their bracket names unless skipped.
std::string bpe_decode(const std::vector<std::uint32_t>& ids, const BpeVocab& vocab,
                       bool skip_specials = false);

// Reconstructs the normalized text (modulo whitespace collapsing) using the
// offsets to restore word boundaries.
std::string bpe_decode_text(const Encoding& enc, const BpeVocab& vocab,
                            bool skip_specials = false);

std::size_t count_tokens_vocab(std::string_view text, const BpeVocab& vocab);

// Shannon entropy (bits/token) of the empirical token distribution of the
// encoded sample.
double token_entropy(const std::vector<std::string>& sample, const BpeVocab& vocab);

// Fraction of emitted ids that are [UNK].
double unk_rate(const std::vector<std::string>& sample, const BpeVocab& vocab);

}  // namespace patcorp
