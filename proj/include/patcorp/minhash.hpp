#pragma once

// Fuzzy deduplication: word 5-gram shingles, 112-way 64-bit MinHash
// signatures in a 14-band x 8-row layout, LSH bucketing, union-find
// clustering and one-representative-per-cluster filtering.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "patcorp/corpus.hpp"

namespace patcorp {

inline constexpr std::size_t kNumBands = 14;
inline constexpr std::size_t kRowsPerBand = 8;
inline constexpr std::size_t kNumHashes = kNumBands * kRowsPerBand;  // 112

struct MinhashSeeds {
    std::uint64_t master = 0;
    std::array<std::uint64_t, kNumHashes> seeds{};

    static MinhashSeeds from_master(std::uint64_t master);
    std::uint64_t fingerprint() const;

    json to_json() const;
    static MinhashSeeds from_json(const json& j);  // throws DataError
    void save(const std::string& path) const;
    static MinhashSeeds load(const std::string& path);
};

struct ShingleOptions {
    unsigned n = 5;
    bool char_level = false;  // word-level is the default convention
};

struct ShingleSet {
    std::string doc_id;
    std::vector<std::uint64_t> shingles;  // sorted, unique
};

// Sliding n-gram shingles hashed to 64 bits. Texts shorter than n units
// yield exactly one whole-text shingle so short docs still dedupe on exact
// match. Empty text throws DataError (filters guarantee non-empty input).
ShingleSet shingle(std::string_view doc_id, std::string_view text,
                   const ShingleOptions& opt = {});

struct MinHashSignature {
    std::string doc_id;
    std::uint64_t seed_fingerprint = 0;
    std::array<std::uint64_t, kNumHashes> values{};
};

// values[i] = min over shingles of mix64(shingle ^ seeds[i]); SIMD-dispatched.
// Throws DataError on an empty shingle set.
MinHashSignature signature(const ShingleSet& set, const MinhashSeeds& seeds);

// Fraction of agreeing positions. Throws DataError on seed mismatch.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Band keys; two docs collide iff all 8 rows of some band agree. The band
// index participates in the key so bands never alias each other.
std::array<std::uint64_t, kNumBands> lsh_buckets(const MinHashSignature& sig);

class UnionFind {
public:
    explicit UnionFind(std::size_t n);
    std::size_t find(std::size_t x);
    void unite(std::size_t a, std::size_t b);

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint32_t> rank_;
};

struct DuplicateCluster {
    std::vector<std::string> member_ids;  // sorted
    std::string representative;           // lexicographically smallest member
};

// Connected components over the collision pairs; output sorted by
// representative. Invariant under any permutation of the input pairs.
std::vector<DuplicateCluster> cluster(
    const std::vector<std::pair<std::string, std::string>>& collisions);

struct DedupManifestEntry {
    std::string removed_id;
    std::string representative_id;
    std::uint32_t band_hits = 0;  // bands where the doc shared a bucket
};

struct DedupResult {
    std::vector<std::size_t> survivor_indices;  // into the input docs, ascending
    std::vector<DedupManifestEntry> manifest;
    std::vector<DuplicateCluster> clusters;
};

enum class RepresentativeRule { kSmallestDocId, kLongestText };

struct DedupOptions {
    ShingleOptions shingle;
    RepresentativeRule representative = RepresentativeRule::kSmallestDocId;
    unsigned workers = 1;
};

// Dedup within one field partition. Survivors = unclustered docs plus one
// representative per cluster; idempotent on its own output.
DedupResult dedupe_field(const std::vector<FieldDoc>& docs, const MinhashSeeds& seeds,
                         const DedupOptions& opt = {});

// Binary signature file (little-endian): header {magic, version, num_hashes,
// master seed, seed list, doc count}, then {id_len u32, id bytes, values}.
void write_signature_file(const std::string& path, const MinhashSeeds& seeds,
                          const std::vector<MinHashSignature>& sigs);
std::vector<MinHashSignature> read_signature_file(const std::string& path, MinhashSeeds* seeds);

struct DedupStageOptions {
    DedupOptions dedup;
    std::string seeds_path;       // optional seeds JSON to load/persist
    std::string signatures_path;  // optional binary signature dump
    std::string records_path;     // optional reassembled-record output
    std::uint64_t master_seed = 0x70617463726f7270ULL;
};

// Reads FieldDoc JSONL, partitions by field kind, dedupes per field, writes
// survivors (input order), a duplicate manifest and optional reassembled
// records (records with zero surviving fields are dropped).
StageStats run_dedup_stage(const std::string& in_path, const std::string& out_path,
                           const std::string& manifest_path, const DedupStageOptions& opt);

}  // namespace patcorp
