#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stylelab/checkpoint.hpp"
#include "stylelab/config.hpp"
#include "stylelab/metrics/evaluate.hpp"
#include "stylelab/trainer.hpp"

namespace stylelab {

// Exit codes shared by all commands: 0 success, 2 usage/config error,
// 1 runtime failure.
enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

namespace cmd_detail {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline std::string cache_dir() {
    if (const char* env = std::getenv("STYLELAB_CACHE_DIR")) return env;
    return (std::filesystem::temp_directory_path() / "stylelab_cache").string();
}

inline uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a64(bytes);
}

}  // namespace cmd_detail

// Evaluation artifacts trained from a TSV corpus, cached on disk keyed by
// the corpus content hash.
struct EvalArtifacts {
    NGramClassifier classifier;
    KneserNeyLM lm;
    EmbeddingTable embeddings;

    static EvalArtifacts build(const std::string& corpus_tsv, const AttributeSchema& schema,
                               bool use_cache = true) {
        namespace fs = std::filesystem;
        std::string cache_path;
        if (use_cache) {
            uint64_t key = cmd_detail::file_hash(corpus_tsv);
            for (const auto& a : schema.attributes) {
                key = hash_combine(key, fnv1a64(a.name));
                for (const auto& v : a.values) key = hash_combine(key, fnv1a64(v));
            }
            fs::create_directories(cmd_detail::cache_dir());
            char name[64];
            std::snprintf(name, sizeof(name), "artifacts_%016llx.bin",
                          static_cast<unsigned long long>(key));
            cache_path = (fs::path(cmd_detail::cache_dir()) / name).string();
            if (fs::exists(cache_path)) {
                std::ifstream is(cache_path, std::ios::binary);
                EvalArtifacts art{NGramClassifier::load(is), KneserNeyLM::load(is),
                                  EmbeddingTable::load(is)};
                if (art.classifier.schema() == schema) return art;
            }
        }
        std::vector<Example> corpus = load_tsv(corpus_tsv, schema);
        require(!corpus.empty(), "evaluate: empty artifact corpus");
        std::vector<TokenSeq> tokens;
        tokens.reserve(corpus.size());
        for (const auto& ex : corpus) tokens.push_back(tokenize(ex.text));

        EvalArtifacts art{NGramClassifier::train(corpus, schema), train_lm(tokens, 5, 2),
                          train_embeddings(tokens, eval_w2v_config())};
        if (use_cache) {
            std::ofstream os(cache_path, std::ios::binary);
            if (os) {
                art.classifier.save(os);
                art.lm.save(os);
                art.embeddings.save(os);
            }
        }
        return art;
    }

    static Word2VecConfig eval_w2v_config() {
        Word2VecConfig cfg;
        cfg.dim = 100;
        cfg.window = 4;
        cfg.negatives = 5;
        cfg.epochs = 5;
        cfg.seed = 11;
        return cfg;
    }
};

// ---- train ----

inline int cmd_train(const std::string& config_path) {
    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::from_file(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsageError;
    }
    try {
        Trainer trainer(std::move(cfg));
        std::string final_path = trainer.run();
        std::cout << "final checkpoint: " << final_path << "\n";
        std::cout << "training log: " << trainer.log_path() << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "training failed: " << e.what() << "\n";
        return kRuntimeError;
    }
}

// ---- transfer ----

inline int cmd_transfer(const std::string& ckpt_path, const std::string& inputs_path,
                        const std::string& styles_path, const std::string& out_path) {
    try {
        Checkpoint ckpt = load_checkpoint(ckpt_path);
        std::vector<std::string> inputs = cmd_detail::read_lines(inputs_path);
        std::vector<std::string> style_lines = cmd_detail::read_lines(styles_path);
        if (inputs.size() != style_lines.size()) {
            std::cerr << "transfer: " << inputs_path << " has " << inputs.size() << " lines but "
                      << styles_path << " has " << style_lines.size() << "\n";
            return kUsageError;
        }
        std::vector<StyleVector> styles;
        for (size_t i = 0; i < style_lines.size(); ++i) {
            try {
                styles.push_back(parse_style(style_lines[i], ckpt.schema));
            } catch (const InputError& e) {
                std::cerr << "transfer: " << styles_path << ":" << (i + 1) << ": " << e.what()
                          << "\n";
                return kUsageError;
            }
        }
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw InputError("cannot open " + out_path + " for writing");
        if (!inputs.empty()) {
            std::vector<std::string> outputs =
                transfer_texts(inputs, styles, ckpt.generator, ckpt.vocab);
            for (const auto& line : outputs) out << line << '\n';
        }
        return kOk;
    } catch (const InputError& e) {
        std::cerr << "transfer: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "transfer failed: " << e.what() << "\n";
        return kRuntimeError;
    }
}

// ---- evaluate ----

struct EvaluateArgs {
    std::string inputs_path;
    std::string predictions_path;
    std::string styles_path;
    std::string references_path;  // optional
    std::string corpus_path;      // TSV used to train/cache metric artifacts
    std::string ckpt_dir;         // optional: checkpoint-series mode
    std::string out_dir;
    bool use_cache = true;
};

namespace cmd_detail {

inline std::vector<std::pair<int64_t, std::string>> list_checkpoints(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::pair<int64_t, std::string>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("ckpt_", 0) == 0 && name.size() > 9 &&
            name.substr(name.size() - 4) == ".bin") {
            int64_t step = std::atoll(name.substr(5, name.size() - 9).c_str());
            out.emplace_back(step, entry.path().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cmd_detail

// Reads the style column of a TSV and reconstructs the attribute schema
// from the observed attribute=value pairs (values sorted for stability).
inline AttributeSchema infer_schema_from_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::map<std::string, std::set<std::string>> seen;
    std::vector<std::string> order;
    std::string line;
    while (std::getline(in, line)) {
        size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string style = line.substr(tab + 1);
        if (!style.empty() && style.back() == '\r') style.pop_back();
        size_t pos = 0;
        while (pos < style.size()) {
            size_t end = style.find(';', pos);
            if (end == std::string::npos) end = style.size();
            std::string part = style.substr(pos, end - pos);
            size_t eq = part.find('=');
            if (eq != std::string::npos) {
                std::string attr = IniFile::trim(part.substr(0, eq));
                std::string value = IniFile::trim(part.substr(eq + 1));
                if (!seen.count(attr)) order.push_back(attr);
                seen[attr].insert(value);
            }
            pos = end + 1;
        }
    }
    AttributeSchema schema;
    for (const auto& name : order) {
        AttributeSchema::Attribute a;
        a.name = name;
        a.values.assign(seen[name].begin(), seen[name].end());
        schema.attributes.push_back(std::move(a));
    }
    schema.validate();
    return schema;
}

inline int cmd_evaluate(const EvaluateArgs& args) {
    namespace fs = std::filesystem;
    try {
        std::vector<std::string> inputs = cmd_detail::read_lines(args.inputs_path);
        std::vector<std::string> preds = cmd_detail::read_lines(args.predictions_path);
        std::vector<std::string> style_lines = cmd_detail::read_lines(args.styles_path);
        if (inputs.size() != preds.size() || inputs.size() != style_lines.size()) {
            std::cerr << "evaluate: misaligned files: " << inputs.size() << " inputs, "
                      << preds.size() << " predictions, " << style_lines.size() << " styles\n";
            return kUsageError;
        }
        std::optional<std::vector<std::string>> refs;
        if (!args.references_path.empty()) {
            refs = cmd_detail::read_lines(args.references_path);
            if (refs->size() != inputs.size()) {
                std::cerr << "evaluate: reference file misaligned (" << refs->size() << " vs "
                          << inputs.size() << ")\n";
                return kUsageError;
            }
        }
        if (args.corpus_path.empty()) {
            std::cerr << "evaluate: --corpus TSV is required to build metric artifacts\n";
            return kUsageError;
        }

        // the artifact corpus defines the schema via its style column
        // when no checkpoint is given; otherwise the checkpoint's schema wins
        AttributeSchema schema;
        std::vector<std::pair<int64_t, std::string>> series;
        if (!args.ckpt_dir.empty()) {
            series = cmd_detail::list_checkpoints(args.ckpt_dir);
            if (series.empty()) {
                std::cerr << "evaluate: no ckpt_*.bin files in " << args.ckpt_dir << "\n";
                return kUsageError;
            }
            schema = load_checkpoint(series.front().second).schema;
        } else {
            schema = infer_schema_from_tsv(args.corpus_path);
        }

        EvalArtifacts art = EvalArtifacts::build(args.corpus_path, schema, args.use_cache);
        std::vector<StyleVector> styles;
        for (size_t i = 0; i < style_lines.size(); ++i) {
            try {
                styles.push_back(parse_style(style_lines[i], schema));
            } catch (const InputError& e) {
                std::cerr << "evaluate: " << args.styles_path << ":" << (i + 1) << ": " << e.what()
                          << "\n";
                return kUsageError;
            }
        }

        fs::create_directories(args.out_dir);
        EvalReport rep = evaluate_corpus(inputs, preds, styles, refs ? &*refs : nullptr,
                                         art.classifier, art.lm, art.embeddings);
        {
            std::ofstream txt(fs::path(args.out_dir) / "report.txt");
            txt << format_report(rep);
            std::ofstream csv(fs::path(args.out_dir) / "report.csv", std::ios::binary);
            csv << report_csv_header() << "\n" << report_csv_row(rep) << "\n";
        }
        std::cout << format_report(rep);

        if (!series.empty()) {
            std::ofstream tradeoff(fs::path(args.out_dir) / "tradeoff.csv", std::ios::binary);
            tradeoff << "step,acc,sbleu\n";
            std::ofstream msecsv(fs::path(args.out_dir) / "content_mse.csv", std::ios::binary);
            msecsv << "step,content_mse\n";
            for (const auto& [step, ckpt_file] : series) {
                Checkpoint ckpt = load_checkpoint(ckpt_file);
                std::vector<std::string> outputs =
                    transfer_texts(inputs, styles, ckpt.generator, ckpt.vocab);
                double acc = accuracy(outputs, styles, art.classifier);
                std::vector<TokenSeq> in_toks, out_toks;
                for (const auto& s : inputs) in_toks.push_back(tokenize(s));
                for (const auto& s : outputs) out_toks.push_back(tokenize(s));
                double sb = bleu(out_toks, in_toks);
                tradeoff << step << ',' << format_double(acc) << ',' << format_double(sb) << '\n';

                // content MSE against the backtranslated text; original
                // styles are taken from the classifier's argmax on the input
                std::vector<StyleVector> orig;
                for (const auto& toks : in_toks) {
                    StyleDistribution d = art.classifier.classify_tokens(toks);
                    StyleVector s;
                    for (const auto& p : d.probs) s.values.push_back(NGramClassifier::argmax(p));
                    orig.push_back(std::move(s));
                }
                std::vector<std::string> back =
                    transfer_texts(outputs, orig, ckpt.generator, ckpt.vocab);
                double mse = 0;
                for (size_t i = 0; i < inputs.size(); ++i) {
                    std::vector<int> a = code(in_toks[i], ckpt.vocab);
                    std::vector<int> b = code(tokenize(back[i]), ckpt.vocab);
                    if (a.empty()) a = {UNK_ID};
                    if (b.empty()) b = {UNK_ID};
                    mse += content_mse(pooled_content(encode(a, ckpt.generator)),
                                       pooled_content(encode(b, ckpt.generator)));
                }
                msecsv << step << ',' << format_double(mse / static_cast<double>(inputs.size()))
                       << '\n';
            }
        }
        return kOk;
    } catch (const InputError& e) {
        std::cerr << "evaluate: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "evaluate failed: " << e.what() << "\n";
        return kRuntimeError;
    }
}


// ---- synth (utility: materialize a synthetic corpus as TSV files) ----

inline int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    try {
        IniFile ini = IniFile::parse_file(config_path);
        ExperimentConfig cfg = ExperimentConfig::from_ini(ini);
        if (cfg.data.kind != "synthetic") {
            std::cerr << "synth: config [data] kind must be synthetic\n";
            return kUsageError;
        }
        Dataset ds = generate_synthetic(cfg.data.synthetic);
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        write_tsv((fs::path(out_dir) / "train.tsv").string(), ds.train, ds.schema);
        write_tsv((fs::path(out_dir) / "dev.tsv").string(), ds.dev, ds.schema);
        write_tsv((fs::path(out_dir) / "test.tsv").string(), ds.test, ds.schema);
        std::cout << format_summary(summarize(ds.train, ds.schema), ds.schema);
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "synth failed: " << e.what() << "\n";
        return kRuntimeError;
    }
}

}  // namespace stylelab
