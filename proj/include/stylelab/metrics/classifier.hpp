#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stylelab/data.hpp"
#include "stylelab/schema_io.hpp"
#include "stylelab/style.hpp"
#include "stylelab/tensor.hpp"

namespace stylelab {

struct ClassifierConfig {
    int buckets = 1 << 16;  // hashing space for 1-2 gram features
    int dim = 32;
    int epochs = 8;
    double lr = 0.1;
    uint64_t seed = 1;
};

// fasttext-style linear classifier: hashed word 1-2 grams, averaged bucket
// embeddings, one softmax head per attribute.
class NGramClassifier {
public:
    static NGramClassifier train(const std::vector<Example>& data, const AttributeSchema& schema,
                                 const ClassifierConfig& cfg = {}) {
        schema.validate();
        require(!data.empty(), "classifier: empty training data");
        // every attribute must show at least two distinct values
        for (int k = 0; k < schema.num_attributes(); ++k) {
            std::vector<char> seen(static_cast<size_t>(schema.num_values(k)), 0);
            for (const Example& ex : data) seen[static_cast<size_t>(ex.style.values[static_cast<size_t>(k)])] = 1;
            int distinct = 0;
            for (char c : seen) distinct += c;
            if (distinct < 2)
                throw ConfigError("classifier: attribute \"" +
                                  schema.attributes[static_cast<size_t>(k)].name +
                                  "\" has a single observed value");
        }

        NGramClassifier clf;
        clf.schema_ = schema;
        clf.cfg_ = cfg;
        Rng rng(cfg.seed);
        clf.emb_ = Tensor({cfg.buckets, cfg.dim});
        for (int64_t i = 0; i < clf.emb_.numel(); ++i)
            clf.emb_.at(i) = static_cast<real>(rng.uniform(-0.5, 0.5) / cfg.dim);
        for (int k = 0; k < schema.num_attributes(); ++k) {
            clf.head_w_.emplace_back(std::vector<int>{cfg.dim, schema.num_values(k)});
            clf.head_b_.emplace_back(std::vector<int>{1, schema.num_values(k)});
        }

        std::vector<std::vector<int>> feats(data.size());
        for (size_t i = 0; i < data.size(); ++i) feats[i] = clf.features(data[i].text);

        std::vector<size_t> idx(data.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        int64_t step = 0;
        int64_t total_steps = static_cast<int64_t>(cfg.epochs) * static_cast<int64_t>(data.size());
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            rng.shuffle(idx);
            for (size_t i : idx) {
                double lr = cfg.lr * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
                clf.sgd_example(feats[i], data[i].style, lr);
                ++step;
            }
        }
        return clf;
    }

    const AttributeSchema& schema() const { return schema_; }

    StyleDistribution classify(const std::string& text) const {
        return classify_tokens(tokenize(text));
    }

    StyleDistribution classify_tokens(const TokenSeq& toks) const {
        std::vector<int> f = features_from_tokens(toks);
        std::vector<double> h = hidden(f);
        StyleDistribution dist;
        for (int k = 0; k < schema_.num_attributes(); ++k) {
            std::vector<double> logits = head_logits(k, h);
            double mx = logits[0];
            for (double v : logits) mx = std::max(mx, v);
            double z = 0;
            for (double& v : logits) {
                v = std::exp(v - mx);
                z += v;
            }
            for (double& v : logits) v /= z;
            dist.probs.push_back(std::move(logits));
        }
        return dist;
    }

    // argmax with ties broken toward the lowest class index
    static int argmax(const std::vector<double>& probs) {
        int best = 0;
        for (size_t i = 1; i < probs.size(); ++i)
            if (probs[i] > probs[best]) best = static_cast<int>(i);
        return best;
    }

    double mean_train_loss(const std::vector<Example>& data) const {
        double loss = 0;
        for (const Example& ex : data) {
            StyleDistribution d = classify(ex.text);
            for (int k = 0; k < schema_.num_attributes(); ++k)
                loss -= std::log(std::max(
                    d.probs[static_cast<size_t>(k)][static_cast<size_t>(ex.style.values[static_cast<size_t>(k)])],
                    1e-300));
        }
        return loss / static_cast<double>(data.size());
    }

    const Tensor& head_weights(int attr) const { return head_w_[static_cast<size_t>(attr)]; }

    void save(std::ostream& os) const {
        schema_io::write(os, schema_);
        binio::write_i64(os, cfg_.buckets);
        binio::write_i64(os, cfg_.dim);
        binio::write_tensor(os, emb_);
        for (size_t k = 0; k < head_w_.size(); ++k) {
            binio::write_tensor(os, head_w_[k]);
            binio::write_tensor(os, head_b_[k]);
        }
    }

    static NGramClassifier load(std::istream& is) {
        NGramClassifier clf;
        clf.schema_ = schema_io::read(is);
        clf.schema_.validate();
        clf.cfg_.buckets = static_cast<int>(binio::read_i64(is));
        clf.cfg_.dim = static_cast<int>(binio::read_i64(is));
        clf.emb_ = binio::read_tensor(is);
        for (int k = 0; k < clf.schema_.num_attributes(); ++k) {
            clf.head_w_.push_back(binio::read_tensor(is));
            clf.head_b_.push_back(binio::read_tensor(is));
        }
        return clf;
    }

private:
    AttributeSchema schema_;
    ClassifierConfig cfg_;
    Tensor emb_;
    std::vector<Tensor> head_w_;
    std::vector<Tensor> head_b_;

    std::vector<int> features(const std::string& text) const {
        return features_from_tokens(tokenize(text));
    }

    std::vector<int> features_from_tokens(const TokenSeq& toks) const {
        std::vector<int> f;
        f.reserve(toks.size() * 2);
        for (size_t i = 0; i < toks.size(); ++i) {
            f.push_back(static_cast<int>(fnv1a64(toks[i]) % static_cast<uint64_t>(cfg_.buckets)));
            if (i + 1 < toks.size()) {
                std::string bigram = toks[i] + '\x1f' + toks[i + 1];
                f.push_back(static_cast<int>(fnv1a64(bigram) % static_cast<uint64_t>(cfg_.buckets)));
            }
        }
        return f;
    }

    std::vector<double> hidden(const std::vector<int>& feats) const {
        std::vector<double> h(static_cast<size_t>(cfg_.dim), 0.0);
        if (feats.empty()) return h;
        for (int f : feats) {
            const real* row = emb_.data() + static_cast<size_t>(f) * static_cast<size_t>(cfg_.dim);
            for (int d = 0; d < cfg_.dim; ++d) h[static_cast<size_t>(d)] += row[d];
        }
        for (double& v : h) v /= static_cast<double>(feats.size());
        return h;
    }

    std::vector<double> head_logits(int k, const std::vector<double>& h) const {
        const Tensor& w = head_w_[static_cast<size_t>(k)];
        const Tensor& b = head_b_[static_cast<size_t>(k)];
        int nc = w.cols();
        std::vector<double> logits(static_cast<size_t>(nc));
        for (int c = 0; c < nc; ++c) {
            double acc = b(0, c);
            for (int d = 0; d < cfg_.dim; ++d) acc += h[static_cast<size_t>(d)] * w(d, c);
            logits[static_cast<size_t>(c)] = acc;
        }
        return logits;
    }

    void sgd_example(const std::vector<int>& feats, const StyleVector& style, double lr) {
        std::vector<double> h = hidden(feats);
        std::vector<double> dh(static_cast<size_t>(cfg_.dim), 0.0);
        for (int k = 0; k < schema_.num_attributes(); ++k) {
            std::vector<double> p = head_logits(k, h);
            double mx = p[0];
            for (double v : p) mx = std::max(mx, v);
            double z = 0;
            for (double& v : p) {
                v = std::exp(v - mx);
                z += v;
            }
            for (double& v : p) v /= z;
            int target = style.values[static_cast<size_t>(k)];
            Tensor& w = head_w_[static_cast<size_t>(k)];
            Tensor& b = head_b_[static_cast<size_t>(k)];
            for (int c = 0; c < w.cols(); ++c) {
                double g = p[static_cast<size_t>(c)] - (c == target ? 1.0 : 0.0);
                b(0, c) -= static_cast<real>(lr * g);
                for (int d = 0; d < cfg_.dim; ++d) {
                    dh[static_cast<size_t>(d)] += g * w(d, c);
                    w(d, c) -= static_cast<real>(lr * g * h[static_cast<size_t>(d)]);
                }
            }
        }
        if (feats.empty()) return;
        double scale = lr / static_cast<double>(feats.size());
        for (int f : feats) {
            real* row = emb_.data() + static_cast<size_t>(f) * static_cast<size_t>(cfg_.dim);
            for (int d = 0; d < cfg_.dim; ++d) row[d] -= static_cast<real>(scale * dh[static_cast<size_t>(d)]);
        }
    }
};

// Mean per-attribute argmax accuracy, as a percentage.
inline double accuracy(const std::vector<std::string>& predicted_texts,
                       const std::vector<StyleVector>& target_styles, const NGramClassifier& clf) {
    if (predicted_texts.empty()) throw ContractError("accuracy: empty input");
    if (predicted_texts.size() != target_styles.size())
        throw ContractError("accuracy: length mismatch");
    int m = clf.schema().num_attributes();
    std::vector<int64_t> correct(static_cast<size_t>(m), 0);
    for (size_t i = 0; i < predicted_texts.size(); ++i) {
        StyleDistribution d = clf.classify(predicted_texts[i]);
        for (int k = 0; k < m; ++k)
            if (NGramClassifier::argmax(d.probs[static_cast<size_t>(k)]) ==
                target_styles[i].values[static_cast<size_t>(k)])
                correct[static_cast<size_t>(k)] += 1;
    }
    double acc = 0;
    for (int k = 0; k < m; ++k)
        acc += static_cast<double>(correct[static_cast<size_t>(k)]) /
               static_cast<double>(predicted_texts.size());
    return 100.0 * acc / static_cast<double>(m);
}

}  // namespace stylelab
