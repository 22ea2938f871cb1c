#pragma once

// Character n-gram language identification. The built-in model is trained at
// startup from the embedded seed corpus (src/langid_data.cpp); external
// models can be loaded from JSON through the same interface.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace patcorp {

struct LangScore {
    std::string language;    // best language tag, e.g. "en"
    double confidence = 0;   // softmax probability in [0,1]
};

class LangIdModel {
public:
    // samples: language tag -> training texts
    static LangIdModel train(
        const std::vector<std::pair<std::string, std::vector<std::string>>>& samples);

    // Embedded-seed model; trained once, then shared (thread-safe after init).
    static const LangIdModel& builtin();

    static LangIdModel load_json(const std::string& path);
    void save_json(const std::string& path) const;

    // Deterministic for a fixed model. Empty (after trimming) input yields
    // an empty language tag with confidence 0.
    LangScore classify(std::string_view text) const;

    const std::vector<std::string>& languages() const { return langs_; }

private:
    using Trigram = std::uint32_t;  // 3 bytes packed little-endian

    std::vector<std::string> langs_;
    // per-language: trigram -> count, plus totals; scoring uses add-alpha
    // smoothing over the union vocabulary
    std::vector<std::unordered_map<Trigram, std::uint32_t>> counts_;
    std::vector<double> totals_;
    double alpha_ = 0.1;
    std::size_t vocab_size_ = 0;

    static std::vector<Trigram> trigrams(std::string_view text);
};

}  // namespace patcorp
