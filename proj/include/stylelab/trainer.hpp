#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stylelab/checkpoint.hpp"
#include "stylelab/config.hpp"
#include "stylelab/metrics/bleu.hpp"
#include "stylelab/metrics/classifier.hpp"
#include "stylelab/supervision.hpp"

namespace stylelab {

struct DevEval {
    double acc = 0;
    double sbleu = 0;
    double content_mse = 0;
};

// Batched greedy transfer on token strings.
inline std::vector<std::string> transfer_texts(const std::vector<std::string>& texts,
                                               const std::vector<StyleVector>& styles,
                                               GeneratorParams& P, const Vocab& vocab,
                                               int batch_size = 64) {
    require(texts.size() == styles.size(), "transfer: inputs/styles misaligned");
    std::vector<std::string> out(texts.size());
    for (size_t start = 0; start < texts.size(); start += static_cast<size_t>(batch_size)) {
        size_t end = std::min(texts.size(), start + static_cast<size_t>(batch_size));
        std::vector<std::vector<int>> ids;
        std::vector<StyleVector> st;
        for (size_t i = start; i < end; ++i) {
            std::vector<int> coded = code(tokenize(texts[i]), vocab);
            if (coded.empty()) coded = {UNK_ID};
            ids.push_back(std::move(coded));
            st.push_back(styles[i]);
        }
        Tape t;
        EncodedBatch enc = encode_batch(t, ids, P, false, nullptr, false);
        DecodeResult dec = decode_batch(t, enc, st, P, DecodeMode::Greedy, P.cfg.max_len);
        for (size_t i = start; i < end; ++i)
            out[i] = join_tokens(decode_ids(dec.ids[i - start], vocab));
    }
    return out;
}

// The experiment driver: owns the dataset, vocabulary, models, optimizer
// state and the training-log CSV.
class Trainer {
public:
    explicit Trainer(ExperimentConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg_.out_dir);

        if (cfg_.data.kind == "synthetic") {
            dataset_ = generate_synthetic(cfg_.data.synthetic);
            write_tsv(path("train.tsv"), dataset_.train, dataset_.schema);
            write_tsv(path("dev.tsv"), dataset_.dev, dataset_.schema);
            write_tsv(path("test.tsv"), dataset_.test, dataset_.schema);
        } else {
            dataset_.schema = cfg_.data.synthetic.schema;
            dataset_.train = load_tsv(cfg_.data.train_path, dataset_.schema);
            dataset_.dev = load_tsv(cfg_.data.dev_path, dataset_.schema);
            if (!cfg_.data.test_path.empty())
                dataset_.test = load_tsv(cfg_.data.test_path, dataset_.schema);
            dataset_.provenance = cfg_.data.train_path;
        }
        require(!dataset_.train.empty(), "trainer: empty training split");
        require(!dataset_.dev.empty(), "trainer: empty dev split");

        std::vector<TokenSeq> train_tokens;
        train_tokens.reserve(dataset_.train.size());
        for (const auto& ex : dataset_.train) train_tokens.push_back(tokenize(ex.text));
        vocab_ = Vocab::build(train_tokens, cfg_.data.vocab_min_count);

        GeneratorConfig gcfg = cfg_.model;
        gcfg.vocab_size = vocab_.size();
        Rng init_rng = rng_.fork(1);
        gen_.init(dataset_.schema, gcfg, init_rng);

        AdamConfig acfg;
        acfg.lr = cfg_.train.lr;
        acfg.beta1 = cfg_.train.beta1;
        acfg.beta2 = cfg_.train.beta2;
        gen_opt_ = Adam(acfg);

        if (regime_has_adv(cfg_.regime)) {
            DiscriminatorConfig dcfg = cfg_.disc;
            dcfg.vocab_size = vocab_.size();
            disc_.init(dataset_.schema, dcfg, init_rng);
            AdamConfig dadam = acfg;
            dadam.lr = cfg_.train.disc_lr;
            disc_opt_ = Adam(dadam);
        }

        classifier_ = prepare_classifier();

        // fixed dev transfer targets so intervals are comparable
        Rng dev_rng = rng_.fork(2);
        size_t cap = std::min<size_t>(dataset_.dev.size(),
                                      static_cast<size_t>(cfg_.train.dev_eval_cap));
        for (size_t i = 0; i < cap; ++i) {
            dev_inputs_.push_back(dataset_.dev[i].text);
            dev_orig_styles_.push_back(dataset_.dev[i].style);
            dev_targets_.push_back(perturb_style(dataset_.dev[i].style, dataset_.schema, dev_rng));
        }
    }

    const Vocab& vocab() const { return vocab_; }
    GeneratorParams& generator() { return gen_; }
    const Dataset& dataset() const { return dataset_; }
    const NGramClassifier& classifier() const { return classifier_; }
    const std::string& log_path() const { return log_path_; }

    // Runs the whole schedule; returns the path of the final checkpoint.
    std::string run() {
        int64_t batches_per_epoch =
            (static_cast<int64_t>(dataset_.train.size()) + cfg_.train.batch_size - 1) /
            cfg_.train.batch_size;
        int64_t total_steps = cfg_.train.epochs * batches_per_epoch;
        int64_t lambda_steps = cfg_.train.lambda_steps > 0 ? cfg_.train.lambda_steps : total_steps;
        int64_t eval_every = cfg_.train.eval_every > 0 ? cfg_.train.eval_every : batches_per_epoch;
        int64_t ckpt_every = cfg_.train.checkpoint_every > 0 ? cfg_.train.checkpoint_every : eval_every;

        log_path_ = path("train_log.csv");
        std::ofstream log(log_path_, std::ios::binary);
        log << "step,lambda_ae,lambda_bt,loss_ae,loss_bt,loss_adv,loss_mrt,loss_total,disc_loss,"
               "dev_acc,dev_sbleu,content_mse\n";

        TrainStepConfig scfg;
        scfg.regime = cfg_.regime;
        scfg.noise = cfg_.noise;
        scfg.mrt = cfg_.mrt;
        scfg.clip_norm = cfg_.train.clip_norm;

        DevEval dev = evaluate_dev();
        write_row(log, 0, lambda_schedule(0, lambda_steps, cfg_.regime), {}, 0, dev);
        save_checkpoint(ckpt_path(0), vocab_, gen_,
                        regime_has_adv(cfg_.regime) ? &disc_ : nullptr);

        Rng epoch_rng = rng_.fork(3);
        Rng step_rng = rng_.fork(4);
        std::vector<size_t> order(dataset_.train.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;

        int64_t step = 0;
        StepRecord mean_rec;
        int64_t mean_count = 0;
        auto flush_interval = [&](int64_t at_step) {
            StepRecord avg = mean_rec;
            if (mean_count > 0) {
                avg.l_ae /= static_cast<double>(mean_count);
                avg.l_bt /= static_cast<double>(mean_count);
                avg.l_adv /= static_cast<double>(mean_count);
                avg.l_mrt /= static_cast<double>(mean_count);
                avg.total /= static_cast<double>(mean_count);
                avg.disc_loss /= static_cast<double>(mean_count);
            }
            DevEval d = evaluate_dev();
            write_row(log, at_step, lambda_schedule(at_step, lambda_steps, cfg_.regime), avg,
                      mean_count, d);
            mean_rec = StepRecord{};
            mean_count = 0;
        };

        for (int64_t epoch = 0; epoch < cfg_.train.epochs; ++epoch) {
            epoch_rng.shuffle(order);
            for (int64_t b = 0; b < batches_per_epoch; ++b) {
                Batch batch;
                for (int64_t i = b * cfg_.train.batch_size;
                     i < std::min<int64_t>((b + 1) * cfg_.train.batch_size,
                                           static_cast<int64_t>(order.size()));
                     ++i) {
                    const Example& ex = dataset_.train[order[static_cast<size_t>(i)]];
                    std::vector<int> coded = code(tokenize(ex.text), vocab_);
                    if (coded.empty()) coded = {UNK_ID};
                    batch.ids.push_back(std::move(coded));
                    batch.styles.push_back(ex.style);
                }
                StepRecord rec = train_step(batch, scfg, gen_, gen_opt_,
                                            regime_has_adv(cfg_.regime) ? &disc_ : nullptr,
                                            regime_has_adv(cfg_.regime) ? &disc_opt_ : nullptr,
                                            &classifier_, &vocab_, step, lambda_steps, step_rng);
                if (!is_finite(rec.total))
                    throw Error("training diverged: non-finite loss at step " +
                                std::to_string(step) + " (ae=" + format_double(rec.l_ae) +
                                " bt=" + format_double(rec.l_bt) + " adv=" +
                                format_double(rec.l_adv) + " mrt=" + format_double(rec.l_mrt) + ")");
                mean_rec.l_ae += rec.l_ae;
                mean_rec.l_bt += rec.l_bt;
                mean_rec.l_adv += rec.l_adv;
                mean_rec.l_mrt += rec.l_mrt;
                mean_rec.total += rec.total;
                mean_rec.disc_loss += rec.disc_loss;
                mean_count += 1;
                step += 1;
                if (step < total_steps && step % eval_every == 0) flush_interval(step);
                if (step < total_steps && step % ckpt_every == 0)
                    save_checkpoint(ckpt_path(step), vocab_, gen_,
                                    regime_has_adv(cfg_.regime) ? &disc_ : nullptr);
            }
        }
        flush_interval(total_steps);
        save_checkpoint(ckpt_path(total_steps), vocab_, gen_,
                        regime_has_adv(cfg_.regime) ? &disc_ : nullptr);
        std::string final_path = path("model.bin");
        save_checkpoint(final_path, vocab_, gen_, regime_has_adv(cfg_.regime) ? &disc_ : nullptr);
        return final_path;
    }

    DevEval evaluate_dev() {
        DevEval d;
        std::vector<std::string> outputs = transfer_texts(dev_inputs_, dev_targets_, gen_, vocab_);
        d.acc = accuracy(outputs, dev_targets_, classifier_);
        std::vector<TokenSeq> in_toks, out_toks;
        for (const auto& s : dev_inputs_) in_toks.push_back(tokenize(s));
        for (const auto& s : outputs) out_toks.push_back(tokenize(s));
        d.sbleu = bleu(out_toks, in_toks);
        // content diagnostic: pooled-encoder MSE between x and its
        // backtranslation x* = d(e(x_hat), s)
        std::vector<std::string> back = transfer_texts(outputs, dev_orig_styles_, gen_, vocab_);
        double mse = 0;
        for (size_t i = 0; i < dev_inputs_.size(); ++i) {
            std::vector<int> a = code(in_toks[i], vocab_);
            std::vector<int> b = code(tokenize(back[i]), vocab_);
            if (a.empty()) a = {UNK_ID};
            if (b.empty()) b = {UNK_ID};
            mse += content_mse(pooled_content(encode(a, gen_)), pooled_content(encode(b, gen_)));
        }
        d.content_mse = mse / static_cast<double>(dev_inputs_.size());
        return d;
    }

private:
    ExperimentConfig cfg_;
    Rng rng_;
    Dataset dataset_;
    Vocab vocab_;
    GeneratorParams gen_;
    DiscriminatorParams disc_;
    Adam gen_opt_;
    Adam disc_opt_;
    NGramClassifier classifier_;
    std::vector<std::string> dev_inputs_;
    std::vector<StyleVector> dev_orig_styles_;
    std::vector<StyleVector> dev_targets_;
    std::string log_path_;

    std::string path(const std::string& name) const {
        return (std::filesystem::path(cfg_.out_dir) / name).string();
    }

    std::string ckpt_path(int64_t step) const {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "ckpt_%08lld.bin", static_cast<long long>(step));
        return path(buf);
    }

    NGramClassifier prepare_classifier() {
        std::string p = regime_has_mrt(cfg_.regime) ? cfg_.mrt_classifier_path
                                                    : cfg_.eval_classifier_path;
        if (!p.empty() && std::filesystem::exists(p)) {
            std::ifstream is(p, std::ios::binary);
            NGramClassifier clf = NGramClassifier::load(is);
            require(clf.schema() == dataset_.schema, "classifier: schema mismatch with dataset");
            return clf;
        }
        ClassifierConfig ccfg;
        ccfg.seed = cfg_.seed ^ 0x5f5f5f5fULL;
        NGramClassifier clf = NGramClassifier::train(dataset_.train, dataset_.schema, ccfg);
        if (!p.empty()) {
            std::ofstream os(p, std::ios::binary);
            if (!os) throw ConfigError("classifier: cannot write " + p);
            clf.save(os);
        }
        return clf;
    }

    void write_row(std::ofstream& log, int64_t step, const LossWeights& w, const StepRecord& rec,
                   int64_t count, const DevEval& dev) {
        (void)count;
        log << step << ',' << format_double(w.ae) << ',' << format_double(w.bt) << ','
            << format_double(rec.l_ae) << ','
            << format_double(rec.l_bt) << ',' << format_double(rec.l_adv) << ','
            << format_double(rec.l_mrt) << ',' << format_double(rec.total) << ','
            << format_double(rec.disc_loss) << ',' << format_double(dev.acc) << ','
            << format_double(dev.sbleu) << ',' << format_double(dev.content_mse) << '\n';
        log.flush();
    }
};

}  // namespace stylelab
