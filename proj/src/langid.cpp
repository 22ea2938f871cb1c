#include "patcorp/langid.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "langid_data.hpp"
#include "patcorp/errors.hpp"
#include "patcorp/unicode.hpp"

namespace patcorp {

using json = nlohmann::json;

std::vector<LangIdModel::Trigram> LangIdModel::trigrams(std::string_view text) {
    // NFKC+lowercase, then squash whitespace so formatting doesn't leak into
    // the features; trigrams are over UTF-8 bytes with padding spaces.
    std::string norm = uni::nfkc_lower(text);
    std::string squashed;
    squashed.reserve(norm.size() + 2);
    squashed.push_back(' ');
    bool prev_space = true;
    for (char c : norm) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (ws) {
            if (!prev_space) squashed.push_back(' ');
            prev_space = true;
        } else {
            squashed.push_back(c);
            prev_space = false;
        }
    }
    if (!prev_space) squashed.push_back(' ');

    std::vector<Trigram> out;
    if (squashed.size() < 3) return out;
    out.reserve(squashed.size() - 2);
    for (std::size_t i = 0; i + 3 <= squashed.size(); ++i) {
        const auto b0 = static_cast<std::uint32_t>(static_cast<unsigned char>(squashed[i]));
        const auto b1 = static_cast<std::uint32_t>(static_cast<unsigned char>(squashed[i + 1]));
        const auto b2 = static_cast<std::uint32_t>(static_cast<unsigned char>(squashed[i + 2]));
        out.push_back(b0 | (b1 << 8) | (b2 << 16));
    }
    return out;
}

LangIdModel LangIdModel::train(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& samples) {
    LangIdModel m;
    std::unordered_set<Trigram> vocab;
    for (const auto& [lang, texts] : samples) {
        m.langs_.push_back(lang);
        auto& table = m.counts_.emplace_back();
        double total = 0;
        for (const auto& t : texts) {
            for (Trigram g : trigrams(t)) {
                ++table[g];
                ++total;
                vocab.insert(g);
            }
        }
        m.totals_.push_back(total);
    }
    m.vocab_size_ = vocab.size() + 1;  // +1 for the unseen bucket
    return m;
}

const LangIdModel& LangIdModel::builtin() {
    static const LangIdModel model = [] {
        std::vector<std::pair<std::string, std::vector<std::string>>> samples;
        for (std::size_t i = 0; i < kLangSeedCount; ++i) {
            samples.push_back({kLangSeeds[i].lang, {kLangSeeds[i].text}});
        }
        return train(samples);
    }();
    return model;
}

LangScore LangIdModel::classify(std::string_view text) const {
    const std::vector<Trigram> grams = trigrams(text);
    if (grams.empty() || langs_.empty()) return {};

    std::vector<double> loglik(langs_.size(), 0.0);
    for (std::size_t li = 0; li < langs_.size(); ++li) {
        const auto& table = counts_[li];
        const double denom = totals_[li] + alpha_ * static_cast<double>(vocab_size_);
        double ll = 0;
        for (Trigram g : grams) {
            auto it = table.find(g);
            const double c = it == table.end() ? 0.0 : static_cast<double>(it->second);
            ll += std::log((c + alpha_) / denom);
        }
        loglik[li] = ll;
    }
    std::size_t best = 0;
    for (std::size_t li = 1; li < langs_.size(); ++li) {
        if (loglik[li] > loglik[best]) best = li;
    }
    // softmax over total log-likelihoods: long unambiguous text saturates
    // toward 1, short text stays uncertain
    double z = 0;
    for (double ll : loglik) z += std::exp(ll - loglik[best]);
    return {langs_[best], 1.0 / z};
}

void LangIdModel::save_json(const std::string& path) const {
    json langs = json::array();
    for (std::size_t li = 0; li < langs_.size(); ++li) {
        json table = json::object();
        for (const auto& [g, c] : counts_[li]) table[std::to_string(g)] = c;
        langs.push_back(json{{"lang", langs_[li]}, {"total", totals_[li]}, {"counts", table}});
    }
    json j{{"version", 1}, {"alpha", alpha_}, {"vocab_size", vocab_size_}, {"languages", langs}};
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot write langid model: " + path);
    out << j.dump(1) << "\n";
}

LangIdModel LangIdModel::load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open langid model: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("languages"))
        throw DataError("malformed langid model: " + path);
    LangIdModel m;
    m.alpha_ = j.value("alpha", 0.1);
    m.vocab_size_ = j.value("vocab_size", std::size_t{1});
    for (const auto& lj : j["languages"]) {
        m.langs_.push_back(lj.at("lang").get<std::string>());
        m.totals_.push_back(lj.at("total").get<double>());
        auto& table = m.counts_.emplace_back();
        for (const auto& [k, v] : lj.at("counts").items()) {
            table[static_cast<Trigram>(std::stoul(k))] = v.get<std::uint32_t>();
        }
    }
    return m;
}

}  // namespace patcorp
