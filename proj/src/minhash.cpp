#include "patcorp/minhash.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <thread>
#include <unordered_map>

#include "patcorp/errors.hpp"
#include "patcorp/hash64.hpp"
#include "patcorp/simd_kernels.hpp"

namespace patcorp {

MinhashSeeds MinhashSeeds::from_master(std::uint64_t master) {
    MinhashSeeds s;
    s.master = master;
    std::uint64_t state = master;
    for (auto& seed : s.seeds) seed = splitmix64_next(state);
    return s;
}

std::uint64_t MinhashSeeds::fingerprint() const {
    return hash_bytes(seeds.data(), seeds.size() * sizeof(std::uint64_t), master);
}

json MinhashSeeds::to_json() const {
    json arr = json::array();
    for (std::uint64_t s : seeds) arr.push_back(s);
    return json{{"master", master}, {"num_hashes", kNumHashes}, {"seeds", arr}};
}

MinhashSeeds MinhashSeeds::from_json(const json& j) {
    if (!j.is_object() || !j.contains("seeds") || !j["seeds"].is_array() ||
        j["seeds"].size() != kNumHashes)
        throw DataError("seeds json: expected 'seeds' array of 112 values");
    MinhashSeeds s;
    s.master = j.value("master", 0ULL);
    for (std::size_t i = 0; i < kNumHashes; ++i) s.seeds[i] = j["seeds"][i].get<std::uint64_t>();
    return s;
}

void MinhashSeeds::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot write seeds: " + path);
    out << to_json().dump(1) << "\n";
}

MinhashSeeds MinhashSeeds::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open seeds: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("seeds json: parse error in " + path);
    return from_json(j);
}

namespace {

std::vector<std::string_view> ws_split(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_ws = [](char c) {
        return c == ' ' || (c >= 0x09 && c <= 0x0d);
    };
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_ws(text[i])) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

}  // namespace

ShingleSet shingle(std::string_view doc_id, std::string_view text, const ShingleOptions& opt) {
    if (text.empty()) throw DataError("shingle: empty text for doc " + std::string(doc_id));
    ShingleSet set;
    set.doc_id = std::string(doc_id);
    const unsigned n = opt.n == 0 ? 1 : opt.n;

    if (opt.char_level) {
        if (text.size() < n) {
            set.shingles.push_back(hash_bytes(text));
        } else {
            for (std::size_t i = 0; i + n <= text.size(); ++i)
                set.shingles.push_back(hash_bytes(text.substr(i, n)));
        }
    } else {
        const auto words = ws_split(text);
        if (words.empty()) throw DataError("shingle: blank text for doc " + std::string(doc_id));
        if (words.size() < n) {
            // single whole-text shingle
            Hash64Stream h;
            for (std::size_t k = 0; k < words.size(); ++k) {
                if (k > 0) h.update("\x1f", 1);
                h.update(words[k]);
            }
            set.shingles.push_back(h.finish());
        } else {
            for (std::size_t i = 0; i + n <= words.size(); ++i) {
                Hash64Stream h;
                for (unsigned k = 0; k < n; ++k) {
                    if (k > 0) h.update("\x1f", 1);
                    h.update(words[i + k]);
                }
                set.shingles.push_back(h.finish());
            }
        }
    }
    std::sort(set.shingles.begin(), set.shingles.end());
    set.shingles.erase(std::unique(set.shingles.begin(), set.shingles.end()),
                       set.shingles.end());
    return set;
}

MinHashSignature signature(const ShingleSet& set, const MinhashSeeds& seeds) {
    if (set.shingles.empty())
        throw DataError("signature: empty shingle set for doc " + set.doc_id);
    MinHashSignature sig;
    sig.doc_id = set.doc_id;
    sig.seed_fingerprint = seeds.fingerprint();
    sig.values.fill(UINT64_MAX);
    static const simd::MinhashFoldFn fold = simd::minhash_fold();
    fold(set.shingles.data(), set.shingles.size(), seeds.seeds.data(), kNumHashes,
         sig.values.data());
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.seed_fingerprint != b.seed_fingerprint)
        throw DataError("estimate_jaccard: signatures use different seed sets");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < kNumHashes; ++i) {
        if (a.values[i] == b.values[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(kNumHashes);
}

std::array<std::uint64_t, kNumBands> lsh_buckets(const MinHashSignature& sig) {
    std::array<std::uint64_t, kNumBands> keys{};
    for (std::size_t b = 0; b < kNumBands; ++b) {
        keys[b] = hash_bytes(sig.values.data() + b * kRowsPerBand,
                             kRowsPerBand * sizeof(std::uint64_t), b);
    }
    return keys;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
}

std::size_t UnionFind::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];  // path halving
        x = parent_[x];
    }
    return x;
}

void UnionFind::unite(std::size_t a, std::size_t b) {
    std::size_t ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
}

std::vector<DuplicateCluster> cluster(
    const std::vector<std::pair<std::string, std::string>>& collisions) {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> ids;
    auto intern = [&](const std::string& id) {
        auto [it, inserted] = index.emplace(id, ids.size());
        if (inserted) ids.push_back(id);
        return it->second;
    };
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(collisions.size());
    for (const auto& [a, b] : collisions) edges.emplace_back(intern(a), intern(b));

    UnionFind uf(ids.size());
    for (const auto& [a, b] : edges) uf.unite(a, b);

    std::unordered_map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) groups[uf.find(i)].push_back(ids[i]);

    std::vector<DuplicateCluster> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        DuplicateCluster c;
        c.representative = members.front();
        c.member_ids = std::move(members);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const DuplicateCluster& a, const DuplicateCluster& b) {
        return a.representative < b.representative;
    });
    return out;
}

DedupResult dedupe_field(const std::vector<FieldDoc>& docs, const MinhashSeeds& seeds,
                         const DedupOptions& opt) {
    DedupResult res;
    const std::size_t n = docs.size();
    if (n == 0) return res;

    std::vector<MinHashSignature> sigs(n);
    const unsigned workers = std::max(1u, opt.workers);
    if (workers == 1 || n < 128) {
        for (std::size_t i = 0; i < n; ++i)
            sigs[i] = signature(shingle(docs[i].doc_id, docs[i].text, opt.shingle), seeds);
    } else {
        // order-preserving chunked map: worker count never changes results
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(64);
                    if (i >= n) return;
                    const std::size_t end = std::min(n, i + 64);
                    for (std::size_t k = i; k < end; ++k)
                        sigs[k] = signature(shingle(docs[k].doc_id, docs[k].text, opt.shingle),
                                            seeds);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // sort-by-(band, key) group scan; adjacency to the group head is enough
    // for connected components
    struct BandEntry {
        std::uint64_t key;
        std::uint32_t band;
        std::uint32_t doc;
    };
    std::vector<BandEntry> entries;
    entries.reserve(n * kNumBands);
    for (std::size_t i = 0; i < n; ++i) {
        const auto keys = lsh_buckets(sigs[i]);
        for (std::size_t b = 0; b < kNumBands; ++b)
            entries.push_back({keys[b], static_cast<std::uint32_t>(b),
                               static_cast<std::uint32_t>(i)});
    }
    std::sort(entries.begin(), entries.end(), [](const BandEntry& a, const BandEntry& b) {
        if (a.band != b.band) return a.band < b.band;
        if (a.key != b.key) return a.key < b.key;
        return a.doc < b.doc;
    });

    UnionFind uf(n);
    std::vector<std::uint32_t> band_hits(n, 0);
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i + 1;
        while (j < entries.size() && entries[j].band == entries[i].band &&
               entries[j].key == entries[i].key)
            ++j;
        if (j - i >= 2) {
            for (std::size_t k = i; k < j; ++k) ++band_hits[entries[k].doc];
            for (std::size_t k = i + 1; k < j; ++k) uf.unite(entries[i].doc, entries[k].doc);
        }
        i = j;
    }

    // pick representatives within union-find components
    std::unordered_map<std::size_t, std::vector<std::size_t>> comps;
    for (std::size_t d = 0; d < n; ++d) comps[uf.find(d)].push_back(d);

    std::vector<bool> survives(n, false);
    std::vector<std::size_t> rep_of(n, 0);
    for (auto& [root, members] : comps) {
        std::size_t rep = members.front();
        for (std::size_t m : members) {
            const bool better =
                opt.representative == RepresentativeRule::kLongestText
                    ? (docs[m].text.size() > docs[rep].text.size() ||
                       (docs[m].text.size() == docs[rep].text.size() &&
                        docs[m].doc_id < docs[rep].doc_id))
                    : docs[m].doc_id < docs[rep].doc_id;
            if (better) rep = m;
        }
        for (std::size_t m : members) {
            survives[m] = (m == rep);
            rep_of[m] = rep;
        }
        if (members.size() > 1) {
            DuplicateCluster c;
            for (std::size_t m : members) c.member_ids.push_back(docs[m].doc_id);
            std::sort(c.member_ids.begin(), c.member_ids.end());
            c.representative = docs[rep].doc_id;
            res.clusters.push_back(std::move(c));
        }
    }
    std::sort(res.clusters.begin(), res.clusters.end(),
              [](const DuplicateCluster& a, const DuplicateCluster& b) {
                  return a.representative < b.representative;
              });

    for (std::size_t d = 0; d < n; ++d) {
        if (survives[d]) {
            res.survivor_indices.push_back(d);
        } else {
            res.manifest.push_back({docs[d].doc_id, docs[rep_of[d]].doc_id, band_hits[d]});
        }
    }
    return res;
}

namespace {

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

constexpr char kSigMagic[8] = {'P', 'C', 'P', 'S', 'I', 'G', '0', '1'};

}  // namespace

void write_signature_file(const std::string& path, const MinhashSeeds& seeds,
                          const std::vector<MinHashSignature>& sigs) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot write signatures: " + path);
    out.write(kSigMagic, 8);
    put_u32(out, 1);  // version
    put_u32(out, kNumHashes);
    put_u64(out, seeds.master);
    for (std::uint64_t s : seeds.seeds) put_u64(out, s);
    put_u64(out, sigs.size());
    for (const auto& sig : sigs) {
        put_u32(out, static_cast<std::uint32_t>(sig.doc_id.size()));
        out.write(sig.doc_id.data(), static_cast<std::streamsize>(sig.doc_id.size()));
        for (std::uint64_t v : sig.values) put_u64(out, v);
    }
    if (!out.good()) throw DataError("write failed: " + path);
}

std::vector<MinHashSignature> read_signature_file(const std::string& path, MinhashSeeds* seeds) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open signatures: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in.good() || std::memcmp(magic, kSigMagic, 8) != 0)
        throw DataError("signature file: bad magic in " + path);
    const std::uint32_t version = get_u32(in);
    if (version != 1) throw DataError("signature file: unsupported version");
    const std::uint32_t num_hashes = get_u32(in);
    if (num_hashes != kNumHashes) throw DataError("signature file: unexpected hash count");
    MinhashSeeds s;
    s.master = get_u64(in);
    for (auto& seed : s.seeds) seed = get_u64(in);
    if (seeds) *seeds = s;
    const std::uint64_t count = get_u64(in);
    std::vector<MinHashSignature> sigs;
    sigs.reserve(count);
    const std::uint64_t fp = s.fingerprint();
    for (std::uint64_t i = 0; i < count; ++i) {
        MinHashSignature sig;
        const std::uint32_t id_len = get_u32(in);
        sig.doc_id.resize(id_len);
        in.read(sig.doc_id.data(), id_len);
        for (auto& v : sig.values) v = get_u64(in);
        sig.seed_fingerprint = fp;
        if (!in.good()) throw DataError("signature file: truncated at doc " + std::to_string(i));
        sigs.push_back(std::move(sig));
    }
    return sigs;
}

StageStats run_dedup_stage(const std::string& in_path, const std::string& out_path,
                           const std::string& manifest_path, const DedupStageOptions& opt) {
    StageStats st;

    std::vector<FieldDoc> docs;
    {
        JsonlReader reader(in_path);
        std::string line;
        while (reader.next(line)) {
            ++st.docs_in;
            json j = json::parse(line, nullptr, false);
            std::optional<FieldDoc> doc;
            if (!j.is_discarded()) doc = field_doc_from_json(j);
            if (!doc) {
                ++st.docs_rejected;
                continue;
            }
            st.tokens_in += count_tokens_ws(doc->text);
            docs.push_back(std::move(*doc));
        }
    }

    MinhashSeeds seeds = MinhashSeeds::from_master(opt.master_seed);
    if (!opt.seeds_path.empty() && std::ifstream(opt.seeds_path).good())
        seeds = MinhashSeeds::load(opt.seeds_path);

    // per-field partitions (indices into docs, input order preserved)
    std::array<std::vector<std::size_t>, 3> partitions;
    for (std::size_t i = 0; i < docs.size(); ++i)
        partitions[static_cast<int>(docs[i].field_kind)].push_back(i);

    std::vector<bool> survives(docs.size(), false);
    std::vector<DedupManifestEntry> manifest;
    std::vector<MinHashSignature> all_sigs;
    for (const auto& part : partitions) {
        if (part.empty()) continue;
        std::vector<FieldDoc> subset;
        subset.reserve(part.size());
        for (std::size_t idx : part) subset.push_back(docs[idx]);
        DedupResult r = dedupe_field(subset, seeds, opt.dedup);
        for (std::size_t s : r.survivor_indices) survives[part[s]] = true;
        for (auto& m : r.manifest) manifest.push_back(std::move(m));
        if (!opt.signatures_path.empty()) {
            for (const auto& d : subset)
                all_sigs.push_back(signature(shingle(d.doc_id, d.text, opt.dedup.shingle), seeds));
        }
    }

    AtomicJsonlWriter out(out_path);
    AtomicJsonlWriter mf(manifest_path);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (!survives[i]) continue;
        ++st.docs_out;
        st.tokens_out += count_tokens_ws(docs[i].text);
        out.write_json(field_doc_to_json(docs[i]));
    }
    st.docs_filtered = st.docs_in - st.docs_out - st.docs_rejected;
    std::sort(manifest.begin(), manifest.end(),
              [](const DedupManifestEntry& a, const DedupManifestEntry& b) {
                  return a.removed_id < b.removed_id;
              });
    for (const auto& m : manifest) {
        mf.write_json(json{{"removed_id", m.removed_id},
                           {"representative_id", m.representative_id},
                           {"band_hits", m.band_hits}});
    }
    out.commit();
    mf.commit();

    if (!opt.seeds_path.empty()) seeds.save(opt.seeds_path);
    if (!opt.signatures_path.empty()) write_signature_file(opt.signatures_path, seeds, all_sigs);

    if (!opt.records_path.empty()) {
        // re-assemble surviving fields at the record level
        std::map<std::string, CleanRecord> records;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (!survives[i]) continue;
            const FieldDoc& d = docs[i];
            const std::size_t hash_pos = d.doc_id.rfind('#');
            const std::string pub_no = d.doc_id.substr(0, hash_pos);
            CleanRecord& r = records[pub_no];
            r.pub_no = pub_no;
            switch (d.field_kind) {
                case FieldKind::kAbstract: r.abstract = d.text; break;
                case FieldKind::kFirstClaim: r.first_ind_claim = d.text; break;
                case FieldKind::kDwpi: r.dwpi = d.text; break;
            }
        }
        AtomicJsonlWriter rec_out(opt.records_path);
        for (const auto& [pub_no, r] : records) rec_out.write_json(clean_record_to_json(r));
        rec_out.commit();
    }
    return st;
}

}  // namespace patcorp
