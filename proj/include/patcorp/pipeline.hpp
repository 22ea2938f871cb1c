#pragma once

// Stage orchestration: one config file, per-stage digests in a run manifest,
// resume with digest verification, and the before/after reduction report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patcorp/bpe.hpp"
#include "patcorp/clean.hpp"
#include "patcorp/corpus.hpp"
#include "patcorp/filters.hpp"
#include "patcorp/minhash.hpp"
#include "patcorp/trainprep.hpp"

namespace patcorp {

inline constexpr const char* kStageNames[] = {"phase1", "filter", "dedup", "tok", "mlm"};
inline constexpr std::size_t kNumStages = 5;

// Streaming digest of a file's bytes, hex-encoded. Not cryptographic; used
// for change detection between runs.
std::string file_digest_hex(const std::string& path);

struct PipelineConfig {
    std::string input_path;
    std::string work_dir = "run";
    unsigned workers = 1;  // intra-stage parallelism; never changes outputs

    RecordSchema schema;
    std::string boilerplate_path;  // optional prefix list
    FilterConfig filter;
    std::uint64_t dedup_seed = 0x70617463726f7270ULL;
    ShingleOptions shingle;
    BpeTrainOptions tok;
    MlmStageOptions mlm;  // vocab_path is derived from work_dir when empty

    static PipelineConfig load(const std::string& path);  // throws ConfigError with key path
    json to_json() const;
    std::string digest() const;
};

struct StageRecord {
    bool complete = false;
    std::string input_digest;
    std::vector<std::pair<std::string, std::string>> outputs;  // (path, digest)
    StageStats stats;
};

struct RunManifest {
    std::string run_id;       // derived from config digest + input digest
    std::string config_digest;
    std::uint64_t dedup_seed = 0;
    std::vector<std::pair<std::string, StageRecord>> stages;  // in execution order

    StageRecord* find(const std::string& name);
    const StageRecord* find(const std::string& name) const;

    json to_json() const;
    static RunManifest from_json(const json& j);
    // written atomically at stage boundaries; wall-times go to a sidecar so
    // the manifest stays byte-reproducible across runs
    void save(const std::string& path) const;
    static std::optional<RunManifest> load(const std::string& path);
};

struct RunOptions {
    std::vector<std::string> stages;  // empty = all, in dependency order
    bool resume = false;
    bool force = false;  // re-run on digest mismatch instead of failing
};

// Executes the requested stages in dependency order. On resume, a stage is
// skipped only when its recorded input and output digests still match; a
// mismatch throws DigestMismatchError unless force is set.
RunManifest run_pipeline(const PipelineConfig& cfg, const RunOptions& opt);

struct ReductionReport {
    std::uint64_t phase1_docs_before = 0;
    std::uint64_t phase1_docs_after = 0;
    double phase1_reduction_pct = 0;
    std::uint64_t phase2_tokens_before = 0;
    std::uint64_t phase2_tokens_after = 0;
    double phase2_reduction_pct = 0;

    json to_json() const;
    std::string to_table() const;  // aligned text form
};

// Builds the two-row report from stage stats. Throws DataError naming the
// stage when the needed stats are missing.
ReductionReport report_from_stats(const json& stats);
ReductionReport report_from_manifest(const RunManifest& manifest);

}  // namespace patcorp
