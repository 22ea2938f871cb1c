#include "patcorp/trainprep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "patcorp/bpe.hpp"
#include "patcorp/errors.hpp"
#include "patcorp/filters.hpp"
#include "patcorp/hash64.hpp"

namespace patcorp {

namespace {

// Hand-rolled splitmix64 generator: distribution code in <random> is not
// pinned across standard libraries, and shard bytes must be reproducible.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() { return splitmix64_next(state); }
    // uniform in [0,1) with 53 bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // uniform in [0, n); modulo bias is < 2^-53 for our n and irrelevant here,
    // but determinism is exact
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }
};

bool is_special_id(std::uint32_t id) { return id < kNumSpecials; }

}  // namespace

MaskedExample mask_sequence(std::span<const std::uint32_t> ids, double mask_rate,
                            const MlmVocabInfo& vocab, std::uint64_t seed,
                            CorruptionStrategy strategy) {
    if (!(mask_rate >= 0.0 && mask_rate <= 1.0))
        throw DomainError("mask_sequence: mask_rate outside [0,1]");
    MaskedExample ex;
    ex.input_ids.assign(ids.begin(), ids.end());
    ex.labels.assign(ids.size(), kIgnoreLabel);
    ex.seq_len = static_cast<std::uint32_t>(ids.size());

    Rng rng(seed);
    const std::uint32_t non_special = vocab.vocab_size > kNumSpecials
                                          ? vocab.vocab_size - kNumSpecials
                                          : 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (is_special_id(ids[i])) continue;
        if (rng.next_unit() >= mask_rate) continue;
        ex.labels[i] = ids[i];
        if (strategy == CorruptionStrategy::kAllMask) {
            ex.input_ids[i] = kMaskId;
            continue;
        }
        const double roll = rng.next_unit();
        if (roll < 0.8) {
            ex.input_ids[i] = kMaskId;
        } else if (roll < 0.9 && non_special > 0) {
            ex.input_ids[i] =
                kNumSpecials + static_cast<std::uint32_t>(rng.next_below(non_special));
        }
        // else: keep the original token, label still supervised
    }
    return ex;
}

std::vector<std::uint32_t> pack_or_truncate(std::span<const std::uint32_t> body,
                                            std::size_t max_len, bool pad_to_max) {
    if (max_len < 3) throw DomainError("pack_or_truncate: max_len < 3");
    const std::size_t body_len = std::min(body.size(), max_len - 2);
    std::vector<std::uint32_t> out;
    out.reserve(pad_to_max ? max_len : body_len + 2);
    out.push_back(kClsId);
    out.insert(out.end(), body.begin(), body.begin() + static_cast<std::ptrdiff_t>(body_len));
    out.push_back(kSepId);
    if (pad_to_max) out.resize(max_len, kPadId);
    return out;
}

namespace {

// Snap to 15 significant decimal digits: schedule endpoints are specified as
// decimal quantities (3e-4, 2%), and the decay must land on the stated rate
// exactly rather than one ulp off.
double decimal_product(double a, double b) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.15g", a * b);
    return std::strtod(buf, nullptr);
}

}  // namespace

LrSchedule LrSchedule::make(double peak, std::uint64_t total_steps, ScheduleShape shape,
                            double warmup_frac, double end_frac, double plateau_frac) {
    if (!(warmup_frac > 0.0 && warmup_frac < 1.0))
        throw DomainError("LrSchedule: warmup_frac outside (0,1)");
    if (total_steps == 0) throw DomainError("LrSchedule: total_steps == 0");
    LrSchedule s;
    s.peak = peak;
    s.warmup_frac = warmup_frac;
    s.end_frac = end_frac;
    s.total_steps = total_steps;
    s.shape = shape;
    s.plateau_frac = plateau_frac;
    s.end_lr = decimal_product(peak, end_frac);
    return s;
}

double lr_at_step(const LrSchedule& sched, std::uint64_t step) {
    if (step > sched.total_steps) throw DomainError("lr_at_step: step beyond total_steps");
    const double total = static_cast<double>(sched.total_steps);
    const std::uint64_t warmup_steps =
        static_cast<std::uint64_t>(std::llround(sched.warmup_frac * total));
    if (step <= warmup_steps) {
        if (warmup_steps == 0) return sched.peak;
        return sched.peak * (static_cast<double>(step) / static_cast<double>(warmup_steps));
    }
    if (sched.shape == ScheduleShape::kTrapezoidal) {
        const std::uint64_t plateau_steps =
            static_cast<std::uint64_t>(std::llround(sched.plateau_frac * total));
        const std::uint64_t plateau_end = std::min(sched.total_steps, warmup_steps + plateau_steps);
        if (step <= plateau_end) return sched.peak;
        const double t = static_cast<double>(step - plateau_end) /
                         static_cast<double>(sched.total_steps - plateau_end);
        return sched.end_lr * t + sched.peak * (1.0 - t);
    }
    const double t = static_cast<double>(step - warmup_steps) /
                     static_cast<double>(sched.total_steps - warmup_steps);
    // convex form lands exactly on end_lr at t == 1
    return sched.end_lr * t + sched.peak * (1.0 - t);
}

void PresetConfig::validate() const {
    if (!(mask_rate > 0.0 && mask_rate < 1.0))
        throw ConfigError("preset " + model + ": mask_rate outside (0,1)");
    if (!(peak_lr > 0.0)) throw ConfigError("preset " + model + ": peak_lr must be positive");
    if (!(warmup_frac > 0.0 && warmup_frac < 1.0))
        throw ConfigError("preset " + model + ": warmup_frac outside (0,1)");
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
        throw ConfigError("preset " + model + ": betas outside (0,1)");
    if (!(epsilon > 0.0)) throw ConfigError("preset " + model + ": epsilon must be positive");
    if (global_batch == 0 || micro_batch == 0 || global_batch % micro_batch != 0)
        throw ConfigError("preset " + model + ": micro batch must divide global batch");
    if (max_seq_len < 3) throw ConfigError("preset " + model + ": max_seq_len too small");
}

json PresetConfig::to_json() const {
    return json{{"model", model},
                {"optimizer", optimizer},
                {"peak_lr", peak_lr},
                {"betas", json::array({beta1, beta2})},
                {"epsilon", epsilon},
                {"warmup_frac", warmup_frac},
                {"mask_rate", mask_rate},
                {"global_batch", global_batch},
                {"micro_batch", micro_batch},
                {"max_seq_len", max_seq_len},
                {"schedule", schedule == ScheduleShape::kTrapezoidal ? "trapezoidal"
                                                                     : "warmup-linear-decay"}};
}

LrSchedule PresetConfig::schedule_for(std::uint64_t total_steps) const {
    return LrSchedule::make(peak_lr, total_steps, schedule, warmup_frac);
}

PresetConfig preset(std::string_view name) {
    PresetConfig p;
    p.optimizer = "StableAdamW";
    p.beta1 = 0.90;
    p.beta2 = 0.98;
    p.epsilon = 1e-06;
    p.warmup_frac = 0.06;
    p.mask_rate = 0.30;
    p.global_batch = 4096;
    p.micro_batch = 128;
    if (name == "modernbert-base-pt") {
        p.model = "modernbert-base-pt";
        p.peak_lr = 3e-4;
        p.max_seq_len = 1024;
    } else if (name == "modernbert-base-vx") {
        p.model = "modernbert-base-vx";
        p.peak_lr = 3e-4;
        p.max_seq_len = 1024;
    } else if (name == "mosaicbert-large") {
        p.model = "mosaicbert-large";
        p.peak_lr = 2e-4;
        p.max_seq_len = 8192;
        p.schedule = ScheduleShape::kTrapezoidal;
    } else {
        std::string valid;
        for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + std::string(name) + "'; valid presets: " + valid);
    }
    p.validate();
    return p;
}

std::vector<std::string> preset_names() {
    return {"modernbert-base-pt", "modernbert-base-vx", "mosaicbert-large"};
}

bool batch_geometry_ok(std::uint32_t global, std::uint32_t micro, std::uint32_t workers) {
    if (global == 0 || micro == 0 || workers == 0) return false;
    const std::uint64_t per_step = static_cast<std::uint64_t>(micro) * workers;
    return global % per_step == 0;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kShardMagic[8] = {'P', 'C', 'P', 'M', 'L', 'M', '0', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

class ShardWriter {
public:
    ShardWriter(std::string prefix, std::uint32_t max_len, std::uint64_t base_seed,
                std::uint64_t shard_size)
        : prefix_(std::move(prefix)), max_len_(max_len), base_seed_(base_seed),
          shard_size_(shard_size) {}

    void add(const MaskedExample& ex) {
        if (!out_.is_open()) open_next();
        put_u32(out_, ex.seq_len);
        for (std::uint32_t v : ex.input_ids) put_u32(out_, v);
        for (std::uint32_t v : ex.labels) put_u32(out_, v);
        ++count_;
        ++total_;
        if (count_ >= shard_size_) close_current();
    }

    std::vector<std::string> finish() {
        if (out_.is_open()) close_current();
        return files_;
    }

    std::uint64_t total() const { return total_; }

private:
    void open_next() {
        char name[32];
        std::snprintf(name, sizeof(name), "-%05zu.bin", files_.size());
        current_ = prefix_ + name;
        out_.open(current_ + ".tmp", std::ios::binary);
        if (!out_.is_open()) throw DataError("cannot write shard: " + current_);
        out_.write(kShardMagic, 8);
        put_u32(out_, 1);
        put_u32(out_, max_len_);
        put_u64(out_, 0);  // count patched on close
        put_u64(out_, base_seed_);
        count_ = 0;
    }

    void close_current() {
        out_.seekp(16);
        put_u64(out_, count_);
        out_.flush();
        if (!out_.good()) throw DataError("write failed: " + current_);
        out_.close();
        std::filesystem::rename(current_ + ".tmp", current_);
        files_.push_back(current_);
    }

    std::string prefix_;
    std::uint32_t max_len_;
    std::uint64_t base_seed_;
    std::uint64_t shard_size_;
    std::ofstream out_;
    std::string current_;
    std::vector<std::string> files_;
    std::uint64_t count_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace

MlmStageResult run_mlm_stage(const std::string& in_path, const std::string& out_prefix,
                             const MlmStageOptions& opt) {
    MlmStageResult res;
    StageStats& st = res.stats;
    BpeVocab vocab = BpeVocab::load(opt.vocab_path);
    const MlmVocabInfo vinfo{static_cast<std::uint32_t>(vocab.size())};

    ShardWriter writer(out_prefix, static_cast<std::uint32_t>(opt.max_len), opt.seed,
                       opt.shard_size);
    std::uint64_t example_index = 0;

    auto emit = [&](const std::vector<std::uint32_t>& body) {
        const auto packed = pack_or_truncate(body, opt.max_len, /*pad_to_max=*/true);
        // per-example seed: reproducible and independent of worker sharding
        const std::uint64_t seed = mix64(opt.seed ^ example_index);
        MaskedExample ex = mask_sequence(packed, opt.mask_rate, vinfo, seed, opt.strategy);
        ex.seq_len = static_cast<std::uint32_t>(std::min<std::size_t>(
            opt.max_len, 2 + std::min(body.size(), opt.max_len - 2)));
        writer.add(ex);
        ++example_index;
        st.tokens_out += ex.seq_len;
        ++st.docs_out;
    };

    JsonlReader reader(in_path);
    std::string line;
    while (reader.next(line)) {
        ++st.docs_in;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++st.docs_rejected;
            continue;
        }
        if (auto doc = field_doc_from_json(j)) {
            st.tokens_in += count_tokens_ws(doc->text);
            emit(bpe_encode(doc->text, vocab).ids);
            continue;
        }
        if (auto rec = clean_record_from_json(j)) {
            const auto docs = explode_record(*rec);
            if (docs.empty()) {
                ++st.docs_filtered;
                continue;
            }
            for (const auto& d : docs) st.tokens_in += count_tokens_ws(d.text);
            if (opt.concat_fields) {
                std::vector<std::uint32_t> body;
                for (std::size_t k = 0; k < docs.size(); ++k) {
                    if (k > 0) body.push_back(kSepId);
                    const auto ids = bpe_encode(docs[k].text, vocab).ids;
                    body.insert(body.end(), ids.begin(), ids.end());
                }
                emit(body);
            } else {
                for (const auto& d : docs) emit(bpe_encode(d.text, vocab).ids);
            }
            continue;
        }
        // generic {"text": ...} input
        if (j.contains("text") && j["text"].is_string()) {
            const std::string text = j["text"].get<std::string>();
            st.tokens_in += count_tokens_ws(text);
            emit(bpe_encode(text, vocab).ids);
            continue;
        }
        ++st.docs_rejected;
    }

    res.shard_files = writer.finish();

    json manifest{{"version", 1},
                  {"max_len", opt.max_len},
                  {"mask_rate", opt.mask_rate},
                  {"seed", opt.seed},
                  {"strategy", opt.strategy == CorruptionStrategy::kBert ? "bert-80-10-10"
                                                                         : "all-mask"},
                  {"ignore_label", kIgnoreLabel},
                  {"examples", writer.total()},
                  {"concat_fields", opt.concat_fields}};
    json shards = json::array();
    for (const auto& f : res.shard_files) {
        std::ifstream sf(f, std::ios::binary);
        Hash64Stream h;
        char buf[1 << 16];
        while (sf.read(buf, sizeof(buf)) || sf.gcount() > 0) {
            h.update(buf, static_cast<std::size_t>(sf.gcount()));
            if (!sf.good()) break;
        }
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(h.finish()));
        shards.push_back(json{{"file", std::filesystem::path(f).filename().string()},
                              {"digest", hex}});
    }
    manifest["shards"] = shards;
    std::ofstream mf(out_prefix + ".manifest.json", std::ios::binary);
    if (!mf.is_open()) throw DataError("cannot write shard manifest");
    mf << manifest.dump(1) << "\n";
    return res;
}

std::vector<MaskedExample> read_example_shard(const std::string& path,
                                              std::uint32_t* max_len_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open shard: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in.good() || std::memcmp(magic, kShardMagic, 8) != 0)
        throw DataError("shard: bad magic in " + path);
    const std::uint32_t version = get_u32(in);
    if (version != 1) throw DataError("shard: unsupported version");
    const std::uint32_t max_len = get_u32(in);
    const std::uint64_t count = get_u64(in);
    get_u64(in);  // base seed
    if (max_len_out) *max_len_out = max_len;
    std::vector<MaskedExample> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        MaskedExample ex;
        ex.seq_len = get_u32(in);
        ex.input_ids.resize(max_len);
        ex.labels.resize(max_len);
        for (auto& v : ex.input_ids) v = get_u32(in);
        for (auto& v : ex.labels) v = get_u32(in);
        if (!in.good()) throw DataError("shard: truncated at example " + std::to_string(i));
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace patcorp
