// patcorp — patent-corpus preprocessing CLI.
//
// Subcommands: phase1, filter, dedup, tok (train/encode/stats), mlm-prep,
// run, report, lr. Exit codes: 0 success, 2 config error, 3 data error,
// 4 resume-digest mismatch.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "patcorp/bpe.hpp"
#include "patcorp/clean.hpp"
#include "patcorp/errors.hpp"
#include "patcorp/filters.hpp"
#include "patcorp/minhash.hpp"
#include "patcorp/pipeline.hpp"
#include "patcorp/simd_kernels.hpp"
#include "patcorp/trainprep.hpp"

using namespace patcorp;

namespace {

void write_stats_file(const std::string& path, const std::string& stage,
                      const StageStats& stats) {
    if (path.empty()) return;
    json j = json::object();
    {
        std::ifstream in(path, std::ios::binary);
        if (in.is_open()) {
            json prev = json::parse(in, nullptr, false);
            if (!prev.is_discarded() && prev.is_object()) j = prev;
        }
    }
    j[stage] = stats.to_json();
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot write stats file: " + path);
    out << j.dump(1) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patent corpus preprocessing toolkit"};
    app.require_subcommand(1);

    // ---- phase1
    auto* phase1 = app.add_subcommand("phase1", "extract, clean and family-deduplicate");
    std::string p1_in, p1_out, p1_boiler, p1_stats, p1_rejects;
    phase1->add_option("--in", p1_in, "raw records JSONL")->required();
    phase1->add_option("--out", p1_out, "clean records JSONL")->required();
    phase1->add_option("--boilerplate", p1_boiler, "prefix list, one per line");
    phase1->add_option("--stats", p1_stats, "stats JSON (per-stage ledger)");
    phase1->add_option("--rejects", p1_rejects, "reject JSONL path");

    // ---- filter
    auto* filter = app.add_subcommand("filter", "per-field quality filtering");
    std::string f_in, f_out, f_dropped, f_config, f_stats;
    unsigned f_workers = 1;
    filter->add_option("--in", f_in, "FieldDoc or CleanRecord JSONL")->required();
    filter->add_option("--out", f_out, "kept FieldDoc JSONL")->required();
    filter->add_option("--dropped", f_dropped, "dropped-doc JSONL")->required();
    filter->add_option("--config", f_config, "filter config JSON");
    filter->add_option("--stats", f_stats, "stats JSON");
    filter->add_option("--workers", f_workers, "scoring threads (never changes output)");

    // ---- dedup
    auto* dedup = app.add_subcommand("dedup", "MinHash LSH near-duplicate removal");
    std::string d_in, d_out, d_manifest, d_seeds, d_sigs, d_records, d_stats;
    std::uint64_t d_seed = 0x70617463726f7270ULL;
    unsigned d_workers = 1;
    dedup->add_option("--in", d_in, "kept FieldDoc JSONL")->required();
    dedup->add_option("--out", d_out, "unique FieldDoc JSONL")->required();
    dedup->add_option("--manifest", d_manifest, "duplicate manifest JSONL")->required();
    dedup->add_option("--seeds", d_seeds, "seeds JSON (loaded when present, else written)");
    dedup->add_option("--signatures", d_sigs, "binary signature dump");
    dedup->add_option("--records", d_records, "reassembled clean-record JSONL");
    dedup->add_option("--seed", d_seed, "master seed when no seeds file is given");
    dedup->add_option("--stats", d_stats, "stats JSON");
    dedup->add_option("--workers", d_workers, "signature threads (never changes output)");

    // ---- tok
    auto* tok = app.add_subcommand("tok", "BPE tokenizer");
    tok->require_subcommand(1);
    auto* tok_train = tok->add_subcommand("train", "train a vocabulary");
    std::string tt_in, tt_out;
    std::uint32_t tt_vocab = 49152, tt_minfreq = 2;
    tok_train->add_option("--in", tt_in, "corpus JSONL ('text' field) or plain text")
        ->required();
    tok_train->add_option("--out", tt_out, "vocab JSON")->required();
    tok_train->add_option("--vocab-size", tt_vocab, "target size incl. specials");
    tok_train->add_option("--min-freq", tt_minfreq, "minimum pair frequency");

    auto* tok_encode = tok->add_subcommand("encode", "encode text lines to ids");
    std::string te_vocab, te_in, te_out;
    tok_encode->add_option("--vocab", te_vocab, "vocab JSON")->required();
    tok_encode->add_option("--in", te_in, "JSONL with 'text' (default: stdin plain lines)");
    tok_encode->add_option("--out", te_out, "output JSONL (default: stdout)");

    auto* tok_stats = tok->add_subcommand("stats", "token entropy and UNK rate of a sample");
    std::string ts_vocab, ts_sample;
    tok_stats->add_option("--vocab", ts_vocab, "vocab JSON")->required();
    tok_stats->add_option("--sample", ts_sample, "sample JSONL with 'text'")->required();

    // ---- mlm-prep
    auto* mlm = app.add_subcommand("mlm-prep", "emit masked training examples");
    std::string m_in, m_vocab, m_out = "examples", m_strategy = "bert-80-10-10", m_stats;
    double m_mask = 0.30;
    std::size_t m_maxlen = 1024;
    std::uint64_t m_seed = 1, m_shard = 1u << 20;
    bool m_concat = false;
    mlm->add_option("--in", m_in, "FieldDoc/CleanRecord JSONL")->required();
    mlm->add_option("--vocab", m_vocab, "vocab JSON")->required();
    mlm->add_option("--out", m_out, "output shard prefix");
    mlm->add_option("--mask", m_mask, "masking probability");
    mlm->add_option("--max-len", m_maxlen, "max sequence length");
    mlm->add_option("--seed", m_seed, "base RNG seed");
    mlm->add_option("--strategy", m_strategy, "bert-80-10-10 | all-mask");
    mlm->add_option("--shard-size", m_shard, "examples per shard file");
    mlm->add_flag("--concat-fields", m_concat, "join one record's fields with [SEP]");
    mlm->add_option("--stats", m_stats, "stats JSON");

    // ---- run
    auto* run = app.add_subcommand("run", "execute pipeline stages from a config");
    std::string r_config;
    std::vector<std::string> r_stages;
    bool r_resume = false, r_force = false;
    run->add_option("--config", r_config, "pipeline config JSON")->required();
    run->add_option("--stages", r_stages, "subset of stages (default: all)");
    run->add_flag("--resume", r_resume, "skip stages whose digests match");
    run->add_flag("--force", r_force, "rebuild stages on digest mismatch");

    // ---- report
    auto* report = app.add_subcommand("report", "before/after reduction table");
    std::string rp_manifest, rp_stats;
    bool rp_json = false;
    report->add_option("--manifest", rp_manifest, "run manifest JSON");
    report->add_option("--stats", rp_stats, "stats JSON with phase1/dedup ledgers");
    report->add_flag("--json", rp_json, "emit JSON instead of the text table");

    // ---- lr
    auto* lr = app.add_subcommand("lr", "evaluate the learning-rate schedule");
    std::string lr_preset = "modernbert-base-pt";
    std::uint64_t lr_total = 10000, lr_step = 0;
    lr->add_option("--preset", lr_preset, "preset name");
    lr->add_option("--total-steps", lr_total, "total training steps");
    lr->add_option("--step", lr_step, "step to evaluate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*phase1) {
            Phase1Options opt;
            if (!p1_boiler.empty()) opt.boilerplate = BoilerplateConfig::load(p1_boiler);
            if (!p1_rejects.empty()) opt.reject_path = p1_rejects;
            Phase1Result res = run_phase1(p1_in, p1_out, opt);
            write_stats_file(p1_stats, "phase1", res.stats);
            std::cerr << "phase1: " << res.stats.docs_in << " in, " << res.stats.docs_out
                      << " out, " << res.stats.docs_rejected << " rejected, "
                      << res.stats.docs_filtered << " filtered\n";
        } else if (*filter) {
            FilterConfig cfg;
            if (!f_config.empty()) {
                std::ifstream in(f_config, std::ios::binary);
                if (!in.is_open()) throw ConfigError("cannot open filter config: " + f_config);
                json j = json::parse(in, nullptr, false);
                if (j.is_discarded()) throw ConfigError("filter config: parse error");
                cfg = FilterConfig::from_json(j);
            }
            FilterStageResult res = run_filter_stage(f_in, f_out, f_dropped, cfg,
                                                     LangIdModel::builtin(), f_workers);
            write_stats_file(f_stats, "filter", res.stats);
            std::cerr << "filter: " << res.stats.docs_in << " in, " << res.stats.docs_out
                      << " kept, " << res.stats.docs_filtered << " dropped\n";
        } else if (*dedup) {
            DedupStageOptions opt;
            opt.master_seed = d_seed;
            opt.seeds_path = d_seeds;
            opt.signatures_path = d_sigs;
            opt.records_path = d_records;
            opt.dedup.workers = d_workers;
            StageStats st = run_dedup_stage(d_in, d_out, d_manifest, opt);
            write_stats_file(d_stats, "dedup", st);
            std::cerr << "dedup: " << st.docs_in << " in, " << st.docs_out << " unique, "
                      << st.docs_filtered << " near-duplicates (isa: "
                      << simd::isa_name(simd::active_isa()) << ")\n";
        } else if (*tok_train) {
            BpeTrainOptions opt;
            opt.vocab_size = tt_vocab;
            opt.min_freq = tt_minfreq;
            BpeVocab vocab = bpe_train_file(tt_in, opt);
            vocab.save(tt_out);
            std::cerr << "tok train: " << vocab.size() << " tokens, " << vocab.merges.size()
                      << " merges\n";
        } else if (*tok_encode) {
            BpeVocab vocab = BpeVocab::load(te_vocab);
            std::ostream* out = &std::cout;
            std::ofstream out_file;
            if (!te_out.empty()) {
                out_file.open(te_out, std::ios::binary);
                if (!out_file.is_open()) throw DataError("cannot write: " + te_out);
                out = &out_file;
            }
            auto emit = [&](const std::string& id, const std::string& text) {
                Encoding enc = bpe_encode(text, vocab);
                json j;
                if (!id.empty()) j["doc_id"] = id;
                j["ids"] = enc.ids;
                *out << j.dump() << "\n";
            };
            if (te_in.empty()) {
                std::string line;
                while (std::getline(std::cin, line)) emit("", line);
            } else {
                JsonlReader reader(te_in);
                std::string line;
                while (reader.next(line)) {
                    json j = json::parse(line, nullptr, false);
                    if (j.is_discarded() || !j.is_object() || !j.contains("text"))
                        emit("", line);
                    else
                        emit(j.value("doc_id", ""), j["text"].get<std::string>());
                }
            }
        } else if (*tok_stats) {
            BpeVocab vocab = BpeVocab::load(ts_vocab);
            std::vector<std::string> sample;
            JsonlReader reader(ts_sample);
            std::string line;
            while (reader.next(line)) {
                json j = json::parse(line, nullptr, false);
                if (!j.is_discarded() && j.is_object() && j.contains("text"))
                    sample.push_back(j["text"].get<std::string>());
                else
                    sample.push_back(line);
            }
            if (sample.empty()) throw DataError("tok stats: empty sample");
            std::uint64_t total = 0;
            for (const auto& t : sample) total += count_tokens_vocab(t, vocab);
            json j{{"token_entropy_bits", token_entropy(sample, vocab)},
                   {"unk_rate", unk_rate(sample, vocab)},
                   {"tokens", total},
                   {"docs", sample.size()}};
            std::cout << j.dump(1) << "\n";
        } else if (*mlm) {
            MlmStageOptions opt;
            opt.vocab_path = m_vocab;
            opt.mask_rate = m_mask;
            opt.max_len = m_maxlen;
            opt.seed = m_seed;
            opt.shard_size = m_shard;
            opt.concat_fields = m_concat;
            if (m_strategy == "bert-80-10-10") opt.strategy = CorruptionStrategy::kBert;
            else if (m_strategy == "all-mask") opt.strategy = CorruptionStrategy::kAllMask;
            else throw ConfigError("mlm-prep: unknown strategy '" + m_strategy + "'");
            MlmStageResult res = run_mlm_stage(m_in, m_out, opt);
            write_stats_file(m_stats, "mlm", res.stats);
            std::cerr << "mlm-prep: " << res.stats.docs_out << " examples in "
                      << res.shard_files.size() << " shard(s)\n";
        } else if (*run) {
            PipelineConfig cfg = PipelineConfig::load(r_config);
            RunOptions opt;
            opt.stages = r_stages;
            opt.resume = r_resume;
            opt.force = r_force;
            RunManifest manifest = run_pipeline(cfg, opt);
            std::cerr << "run " << manifest.run_id << ": " << manifest.stages.size()
                      << " stage(s) in manifest\n";
        } else if (*report) {
            ReductionReport rep;
            if (!rp_manifest.empty()) {
                auto m = RunManifest::load(rp_manifest);
                if (!m) throw DataError("cannot read manifest: " + rp_manifest);
                rep = report_from_manifest(*m);
            } else if (!rp_stats.empty()) {
                std::ifstream in(rp_stats, std::ios::binary);
                if (!in.is_open()) throw DataError("cannot open stats: " + rp_stats);
                json j = json::parse(in, nullptr, false);
                if (j.is_discarded()) throw DataError("stats: parse error in " + rp_stats);
                rep = report_from_stats(j);
            } else {
                throw ConfigError("report: provide --manifest or --stats");
            }
            if (rp_json) std::cout << rep.to_json().dump(1) << "\n";
            else std::cout << rep.to_table();
        } else if (*lr) {
            PresetConfig p = preset(lr_preset);
            LrSchedule sched = p.schedule_for(lr_total);
            json j{{"preset", p.to_json()}, {"step", lr_step},
                   {"lr", lr_at_step(sched, lr_step)}};
            std::cout << j.dump(1) << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DigestMismatchError& e) {
        std::cerr << "resume error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
