#include "patcorp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "patcorp/bpe.hpp"
#include "patcorp/errors.hpp"
#include "patcorp/hash64.hpp"

namespace patcorp {

namespace fs = std::filesystem;

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open file for digest: " + path);
    Hash64Stream h;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h.update(buf, static_cast<std::size_t>(in.gcount()));
        if (in.eof()) break;
    }
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h.finish()));
    return hex;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void check_keys(const json& j, const std::vector<std::string>& known,
                const std::string& section) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config: unknown key '" +
                              (section.empty() ? key : section + "." + key) + "'");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& section) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + section + "." + key + "'");
    }
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw ConfigError("cannot open config: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("config: parse error in " + path);

    check_keys(j, {"input", "work_dir", "workers", "schema", "phase1", "filter", "dedup",
                   "tok", "mlm"},
               "");
    PipelineConfig cfg;
    if (!j.contains("input") || !j["input"].is_string())
        throw ConfigError("config: missing required key 'input'");
    cfg.input_path = j["input"].get<std::string>();
    cfg.work_dir = get_or<std::string>(j, "work_dir", cfg.work_dir, "");
    cfg.workers = get_or<unsigned>(j, "workers", cfg.workers, "");
    if (cfg.workers == 0) throw ConfigError("config: workers must be >= 1");

    if (j.contains("schema")) {
        const json& s = j["schema"];
        check_keys(s, {"pub_no", "family_id", "pub_date", "abstract", "claims", "dwpi"},
                   "schema");
        cfg.schema.pub_no = get_or<std::string>(s, "pub_no", cfg.schema.pub_no, "schema");
        cfg.schema.family_id =
            get_or<std::string>(s, "family_id", cfg.schema.family_id, "schema");
        cfg.schema.pub_date = get_or<std::string>(s, "pub_date", cfg.schema.pub_date, "schema");
        cfg.schema.abstract = get_or<std::string>(s, "abstract", cfg.schema.abstract, "schema");
        cfg.schema.claims = get_or<std::string>(s, "claims", cfg.schema.claims, "schema");
        cfg.schema.dwpi = get_or<std::string>(s, "dwpi", cfg.schema.dwpi, "schema");
    }
    if (j.contains("phase1")) {
        const json& p = j["phase1"];
        check_keys(p, {"boilerplate"}, "phase1");
        cfg.boilerplate_path = get_or<std::string>(p, "boilerplate", "", "phase1");
    }
    if (j.contains("filter")) cfg.filter = FilterConfig::from_json(j["filter"]);
    if (j.contains("dedup")) {
        const json& d = j["dedup"];
        check_keys(d, {"seed", "shingle_n", "char_level"}, "dedup");
        cfg.dedup_seed = get_or<std::uint64_t>(d, "seed", cfg.dedup_seed, "dedup");
        cfg.shingle.n = get_or<unsigned>(d, "shingle_n", cfg.shingle.n, "dedup");
        cfg.shingle.char_level = get_or<bool>(d, "char_level", cfg.shingle.char_level, "dedup");
    }
    if (j.contains("tok")) {
        const json& t = j["tok"];
        check_keys(t, {"vocab_size", "min_freq"}, "tok");
        cfg.tok.vocab_size = get_or<std::uint32_t>(t, "vocab_size", cfg.tok.vocab_size, "tok");
        cfg.tok.min_freq = get_or<std::uint32_t>(t, "min_freq", cfg.tok.min_freq, "tok");
    }
    if (j.contains("mlm")) {
        const json& m = j["mlm"];
        check_keys(m, {"mask_rate", "max_len", "seed", "strategy", "concat_fields",
                       "shard_size"},
                   "mlm");
        cfg.mlm.mask_rate = get_or<double>(m, "mask_rate", cfg.mlm.mask_rate, "mlm");
        cfg.mlm.max_len = get_or<std::size_t>(m, "max_len", cfg.mlm.max_len, "mlm");
        cfg.mlm.seed = get_or<std::uint64_t>(m, "seed", cfg.mlm.seed, "mlm");
        cfg.mlm.concat_fields =
            get_or<bool>(m, "concat_fields", cfg.mlm.concat_fields, "mlm");
        cfg.mlm.shard_size = get_or<std::uint64_t>(m, "shard_size", cfg.mlm.shard_size, "mlm");
        const std::string strat = get_or<std::string>(m, "strategy", "bert-80-10-10", "mlm");
        if (strat == "bert-80-10-10") cfg.mlm.strategy = CorruptionStrategy::kBert;
        else if (strat == "all-mask") cfg.mlm.strategy = CorruptionStrategy::kAllMask;
        else throw ConfigError("config: mlm.strategy must be 'bert-80-10-10' or 'all-mask'");
        if (!(cfg.mlm.mask_rate >= 0.0 && cfg.mlm.mask_rate <= 1.0))
            throw ConfigError("config: mlm.mask_rate outside [0,1]");
    }
    return cfg;
}

json PipelineConfig::to_json() const {
    return json{{"input", input_path},
                {"work_dir", work_dir},
                {"workers", workers},
                {"schema",
                 json{{"pub_no", schema.pub_no},
                      {"family_id", schema.family_id},
                      {"pub_date", schema.pub_date},
                      {"abstract", schema.abstract},
                      {"claims", schema.claims},
                      {"dwpi", schema.dwpi}}},
                {"phase1", json{{"boilerplate", boilerplate_path}}},
                {"filter", filter.to_json()},
                {"dedup", json{{"seed", dedup_seed},
                               {"shingle_n", shingle.n},
                               {"char_level", shingle.char_level}}},
                {"tok", json{{"vocab_size", tok.vocab_size}, {"min_freq", tok.min_freq}}},
                {"mlm", json{{"mask_rate", mlm.mask_rate},
                             {"max_len", mlm.max_len},
                             {"seed", mlm.seed},
                             {"concat_fields", mlm.concat_fields},
                             {"shard_size", mlm.shard_size}}}};
}

std::string PipelineConfig::digest() const {
    const std::string dump = to_json().dump();
    return hex64(hash_bytes(dump));
}

StageRecord* RunManifest::find(const std::string& name) {
    for (auto& [n, rec] : stages) {
        if (n == name) return &rec;
    }
    return nullptr;
}

const StageRecord* RunManifest::find(const std::string& name) const {
    for (const auto& [n, rec] : stages) {
        if (n == name) return &rec;
    }
    return nullptr;
}

json RunManifest::to_json() const {
    json stages_j = json::array();
    for (const auto& [name, rec] : stages) {
        json outs = json::array();
        for (const auto& [p, d] : rec.outputs) outs.push_back(json{{"path", p}, {"digest", d}});
        stages_j.push_back(json{{"name", name},
                                {"complete", rec.complete},
                                {"input_digest", rec.input_digest},
                                {"outputs", outs},
                                {"stats", rec.stats.to_json()}});
    }
    return json{{"run_id", run_id},
                {"config_digest", config_digest},
                {"dedup_seed", dedup_seed},
                {"stages", stages_j}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.run_id = j.value("run_id", "");
    m.config_digest = j.value("config_digest", "");
    m.dedup_seed = j.value("dedup_seed", 0ULL);
    if (j.contains("stages")) {
        for (const auto& sj : j["stages"]) {
            StageRecord rec;
            rec.complete = sj.value("complete", false);
            rec.input_digest = sj.value("input_digest", "");
            if (sj.contains("outputs")) {
                for (const auto& oj : sj["outputs"])
                    rec.outputs.emplace_back(oj.value("path", ""), oj.value("digest", ""));
            }
            if (sj.contains("stats")) rec.stats = StageStats::from_json(sj["stats"]);
            m.stages.emplace_back(sj.value("name", ""), std::move(rec));
        }
    }
    return m;
}

void RunManifest::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out.is_open()) throw DataError("cannot write manifest: " + path);
        out << to_json().dump(1) << "\n";
        out.flush();
        if (!out.good()) throw DataError("manifest write failed: " + path);
    }
    fs::rename(tmp, path);
}

std::optional<RunManifest> RunManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return from_json(j);
}

namespace {

struct StagePlan {
    std::string name;
    std::string input;                 // digest source
    std::vector<std::string> outputs;  // produced files
};

}  // namespace

RunManifest run_pipeline(const PipelineConfig& cfg, const RunOptions& opt) {
    fs::create_directories(cfg.work_dir);
    const std::string manifest_path = cfg.work_dir + "/manifest.json";
    const std::string timings_path = cfg.work_dir + "/timings.json";

    const std::string clean_path = cfg.work_dir + "/clean.jsonl";
    const std::string kept_path = cfg.work_dir + "/kept.jsonl";
    const std::string dropped_path = cfg.work_dir + "/dropped.jsonl";
    const std::string unique_path = cfg.work_dir + "/unique.jsonl";
    const std::string dups_path = cfg.work_dir + "/dups.jsonl";
    const std::string records_path = cfg.work_dir + "/records.jsonl";
    const std::string seeds_path = cfg.work_dir + "/seeds.json";
    const std::string vocab_path = cfg.work_dir + "/vocab.json";
    const std::string shard_prefix = cfg.work_dir + "/examples";

    const std::vector<StagePlan> plans = {
        {"phase1", cfg.input_path, {clean_path}},
        {"filter", clean_path, {kept_path, dropped_path}},
        {"dedup", kept_path, {unique_path, dups_path, records_path, seeds_path}},
        {"tok", unique_path, {vocab_path}},
        {"mlm", unique_path, {}},  // shard list discovered after the stage
    };

    std::vector<std::string> wanted = opt.stages;
    if (wanted.empty()) {
        for (const auto& p : plans) wanted.push_back(p.name);
    }
    for (const auto& w : wanted) {
        bool known = false;
        for (const auto& p : plans) known = known || p.name == w;
        if (!known) throw ConfigError("unknown stage '" + w + "'");
    }

    RunManifest manifest;
    const std::string config_digest = cfg.digest();
    if (opt.resume) {
        if (auto prev = RunManifest::load(manifest_path)) {
            if (prev->config_digest == config_digest) manifest = std::move(*prev);
        }
    }
    manifest.config_digest = config_digest;
    manifest.dedup_seed = cfg.dedup_seed;

    json timings = json::object();

    for (const auto& plan : plans) {
        if (std::find(wanted.begin(), wanted.end(), plan.name) == wanted.end()) continue;

        const std::string input_digest = file_digest_hex(plan.input);
        if (opt.resume) {
            if (const StageRecord* prev = manifest.find(plan.name); prev && prev->complete) {
                bool ok = prev->input_digest == input_digest;
                std::string mismatch = ok ? "" : "input";
                if (ok) {
                    for (const auto& [path, digest] : prev->outputs) {
                        if (!fs::exists(path) || file_digest_hex(path) != digest) {
                            ok = false;
                            mismatch = path;
                            break;
                        }
                    }
                }
                if (ok) continue;  // digests verified; skip the stage
                if (!opt.force)
                    throw DigestMismatchError("resume: stage '" + plan.name +
                                              "' digest mismatch (" + mismatch +
                                              "); re-run with --force to rebuild");
            }
        }

        const auto t0 = std::chrono::steady_clock::now();
        StageRecord rec;
        rec.input_digest = input_digest;
        std::vector<std::string> outputs = plan.outputs;

        if (plan.name == "phase1") {
            Phase1Options popt;
            popt.schema = cfg.schema;
            if (!cfg.boilerplate_path.empty())
                popt.boilerplate = BoilerplateConfig::load(cfg.boilerplate_path);
            popt.reject_path = cfg.work_dir + "/phase1.rejects.jsonl";
            rec.stats = run_phase1(cfg.input_path, clean_path, popt).stats;
        } else if (plan.name == "filter") {
            rec.stats = run_filter_stage(clean_path, kept_path, dropped_path, cfg.filter,
                                         LangIdModel::builtin(), cfg.workers)
                            .stats;
        } else if (plan.name == "dedup") {
            DedupStageOptions dopt;
            dopt.dedup.shingle = cfg.shingle;
            dopt.dedup.workers = cfg.workers;
            dopt.master_seed = cfg.dedup_seed;
            dopt.seeds_path = seeds_path;
            dopt.records_path = records_path;
            rec.stats = run_dedup_stage(kept_path, unique_path, dups_path, dopt);
        } else if (plan.name == "tok") {
            BpeVocab vocab = bpe_train_file(unique_path, cfg.tok);
            vocab.save(vocab_path);
            StageStats st;
            JsonlReader lines(unique_path);
            std::string l;
            while (lines.next(l)) ++st.docs_in;
            st.docs_out = st.docs_in;  // model-producing stage consumes all docs
            rec.stats = st;
        } else if (plan.name == "mlm") {
            MlmStageOptions mopt = cfg.mlm;
            if (mopt.vocab_path.empty()) mopt.vocab_path = vocab_path;
            MlmStageResult r = run_mlm_stage(unique_path, shard_prefix, mopt);
            rec.stats = r.stats;
            outputs = r.shard_files;
            outputs.push_back(shard_prefix + ".manifest.json");
        }

        for (const auto& out : outputs) rec.outputs.emplace_back(out, file_digest_hex(out));
        rec.complete = true;

        // replace or append the stage record, then persist atomically
        if (StageRecord* slot = manifest.find(plan.name)) {
            *slot = std::move(rec);
        } else {
            manifest.stages.emplace_back(plan.name, std::move(rec));
        }
        if (manifest.run_id.empty() && manifest.find("phase1"))
            manifest.run_id = config_digest.substr(0, 8) + "-" +
                              manifest.find("phase1")->input_digest.substr(0, 8);
        manifest.save(manifest_path);

        const auto t1 = std::chrono::steady_clock::now();
        timings[plan.name] =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        std::ofstream tf(timings_path, std::ios::binary);
        tf << timings.dump(1) << "\n";
    }

    if (manifest.run_id.empty()) manifest.run_id = config_digest.substr(0, 16);
    manifest.save(manifest_path);
    return manifest;
}

json ReductionReport::to_json() const {
    return json{{"phase1",
                 json{{"before", phase1_docs_before},
                      {"after", phase1_docs_after},
                      {"reduction_pct", phase1_reduction_pct}}},
                {"phase2",
                 json{{"before", phase2_tokens_before},
                      {"after", phase2_tokens_after},
                      {"reduction_pct", phase2_reduction_pct}}}};
}

std::string ReductionReport::to_table() const {
    char buf[256];
    std::string out;
    out += "phase              before            after       reduction\n";
    std::snprintf(buf, sizeof(buf), "%-15s %15llu %15llu %10.2f%%\n", "phase1 (docs)",
                  static_cast<unsigned long long>(phase1_docs_before),
                  static_cast<unsigned long long>(phase1_docs_after), phase1_reduction_pct);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-15s %15llu %15llu %10.2f%%\n", "phase2 (tokens)",
                  static_cast<unsigned long long>(phase2_tokens_before),
                  static_cast<unsigned long long>(phase2_tokens_after), phase2_reduction_pct);
    out += buf;
    return out;
}

ReductionReport report_from_stats(const json& stats) {
    if (!stats.contains("phase1")) throw DataError("report: missing stats for stage 'phase1'");
    if (!stats.contains("dedup")) throw DataError("report: missing stats for stage 'dedup'");
    const StageStats p1 = StageStats::from_json(stats["phase1"]);
    const StageStats dd = StageStats::from_json(stats["dedup"]);
    ReductionReport r;
    r.phase1_docs_before = p1.docs_in;
    r.phase1_docs_after = p1.docs_out;
    r.phase1_reduction_pct = compute_reduction(p1.docs_in, p1.docs_out);
    r.phase2_tokens_before = dd.tokens_in;
    r.phase2_tokens_after = dd.tokens_out;
    r.phase2_reduction_pct = compute_reduction(dd.tokens_in, dd.tokens_out);
    return r;
}

ReductionReport report_from_manifest(const RunManifest& manifest) {
    json stats = json::object();
    if (const StageRecord* p1 = manifest.find("phase1")) stats["phase1"] = p1->stats.to_json();
    if (const StageRecord* dd = manifest.find("dedup")) stats["dedup"] = dd->stats.to_json();
    return report_from_stats(stats);
}

}  // namespace patcorp
