#pragma once

// MLM example generation (dynamic masking, sequence packing) and
// training-schedule utilities: warmup/decay learning-rate evaluation and
// validated hyperparameter presets.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patcorp/corpus.hpp"

namespace patcorp {

// Label value at unsupervised positions; reserved outside any vocab id range.
inline constexpr std::uint32_t kIgnoreLabel = 0xFFFFFFFFu;

struct MlmVocabInfo {
    std::uint32_t vocab_size = 0;  // ids are 0..vocab_size-1; 0..4 are specials
};

struct MaskedExample {
    std::vector<std::uint32_t> input_ids;
    std::vector<std::uint32_t> labels;  // original id at corrupted positions
    std::uint32_t seq_len = 0;          // content length incl. [CLS]/[SEP]
};

enum class CorruptionStrategy {
    kBert,     // 80% [MASK], 10% random non-special id, 10% unchanged
    kAllMask,  // every selected position becomes [MASK]
};

// Each maskable (non-special) position is selected independently with
// probability mask_rate and corrupted per the strategy. Deterministic for a
// fixed (ids, seed). Throws DomainError when mask_rate is outside [0,1].
MaskedExample mask_sequence(std::span<const std::uint32_t> ids, double mask_rate,
                            const MlmVocabInfo& vocab, std::uint64_t seed,
                            CorruptionStrategy strategy = CorruptionStrategy::kBert);

// [CLS] body [SEP], body truncated to max_len-2; padded with [PAD] to
// max_len when pad_to_max. Throws DomainError when max_len < 3.
std::vector<std::uint32_t> pack_or_truncate(std::span<const std::uint32_t> body,
                                            std::size_t max_len, bool pad_to_max);

enum class ScheduleShape { kWarmupLinearDecay, kTrapezoidal };

struct LrSchedule {
    double peak = 0;
    double warmup_frac = 0.06;
    double end_frac = 0.02;
    std::uint64_t total_steps = 0;
    ScheduleShape shape = ScheduleShape::kWarmupLinearDecay;
    double plateau_frac = 0.70;  // trapezoidal only

    // materialized at construction so the stated decimal end rate is hit
    // bit-exactly at step == total_steps
    double end_lr = 0;

    static LrSchedule make(double peak, std::uint64_t total_steps,
                           ScheduleShape shape = ScheduleShape::kWarmupLinearDecay,
                           double warmup_frac = 0.06, double end_frac = 0.02,
                           double plateau_frac = 0.70);
};

// Piecewise-linear rate at an integer step; lr(0) = 0, lr(warmup end) = peak,
// lr(total) = end_lr. Throws DomainError when step > total_steps.
double lr_at_step(const LrSchedule& sched, std::uint64_t step);

struct PresetConfig {
    std::string model;
    std::string optimizer;
    double peak_lr = 0;
    double beta1 = 0, beta2 = 0;
    double epsilon = 0;
    double warmup_frac = 0;
    double mask_rate = 0;
    std::uint32_t global_batch = 0;
    std::uint32_t micro_batch = 0;
    std::uint32_t max_seq_len = 0;
    ScheduleShape schedule = ScheduleShape::kWarmupLinearDecay;

    void validate() const;  // throws ConfigError on out-of-range values
    json to_json() const;
    LrSchedule schedule_for(std::uint64_t total_steps) const;
};

// Known presets: modernbert-base-pt, modernbert-base-vx, mosaicbert-large.
// Throws ConfigError naming the valid presets for unknown names.
PresetConfig preset(std::string_view name);
std::vector<std::string> preset_names();

// global = micro * accumulation * workers with integral accumulation
bool batch_geometry_ok(std::uint32_t global, std::uint32_t micro, std::uint32_t workers);

// ---------------------------------------------------------------------------
// Example shards

struct MlmStageOptions {
    std::string vocab_path;
    double mask_rate = 0.30;
    std::size_t max_len = 1024;
    std::uint64_t seed = 1;
    CorruptionStrategy strategy = CorruptionStrategy::kBert;
    bool concat_fields = false;  // join one record's fields with [SEP]
    std::uint64_t shard_size = 1u << 20;  // examples per output shard file
};

struct MlmStageResult {
    StageStats stats;
    std::vector<std::string> shard_files;
};

// Encodes input docs (FieldDoc JSONL or CleanRecord JSONL), packs, masks
// with per-example seeds derived from the base seed and example ordinal,
// and writes binary shards plus a JSON sidecar manifest.
MlmStageResult run_mlm_stage(const std::string& in_path, const std::string& out_prefix,
                             const MlmStageOptions& opt);

// Binary shard layout (little-endian): magic "PCPMLM01", u32 version,
// u32 max_len, u64 count, u64 base_seed, then per example
// {u32 seq_len, max_len u32 input ids, max_len u32 labels}.
std::vector<MaskedExample> read_example_shard(const std::string& path, std::uint32_t* max_len_out);

}  // namespace patcorp
