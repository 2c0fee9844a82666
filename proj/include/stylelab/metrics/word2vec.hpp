#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylelab/binio.hpp"
#include "stylelab/tensor.hpp"
#include "stylelab/text.hpp"

namespace stylelab {

struct Word2VecConfig {
    int dim = 100;
    int window = 4;
    int negatives = 5;
    int epochs = 5;
    double lr = 0.05;
    int64_t min_count = 1;
    uint64_t seed = 1;
};

struct EmbeddingTable {
    std::unordered_map<std::string, int> index;
    Tensor vectors;  // [V x dim]

    int dim() const { return vectors.cols(); }

    const real* vec(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? nullptr
                                 : vectors.data() + static_cast<size_t>(it->second) *
                                                        static_cast<size_t>(vectors.cols());
    }

    bool contains(const std::string& token) const { return index.count(token) > 0; }

    void save(std::ostream& os) const {
        binio::write_u32(os, static_cast<uint32_t>(index.size()));
        std::vector<std::string> by_id(index.size());
        for (const auto& [tok, id] : index) by_id[static_cast<size_t>(id)] = tok;
        for (const auto& tok : by_id) binio::write_str(os, tok);
        binio::write_tensor(os, vectors);
    }

    static EmbeddingTable load(std::istream& is) {
        EmbeddingTable t;
        uint32_t n = binio::read_u32(is);
        for (uint32_t i = 0; i < n; ++i) t.index.emplace(binio::read_str(is), static_cast<int>(i));
        t.vectors = binio::read_tensor(is);
        require(t.vectors.rows() == static_cast<int>(n), "embeddings: corrupt table");
        return t;
    }
};

inline double cosine(const real* a, const real* b, int dim) {
    double dot = 0, na = 0, nb = 0;
    for (int i = 0; i < dim; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Skip-gram with negative sampling, single-threaded and fully seeded so
// retraining is bit-identical. Negatives are drawn from the unigram^0.75
// table; the dynamic window follows the usual b ~ U{1..window} scheme.
inline EmbeddingTable train_embeddings(const std::vector<TokenSeq>& corpus,
                                       const Word2VecConfig& cfg = {}) {
    require(!corpus.empty(), "train_embeddings: empty corpus");
    require(cfg.dim >= 1 && cfg.window >= 1 && cfg.negatives >= 1 && cfg.epochs >= 1,
            "train_embeddings: bad config");

    std::unordered_map<std::string, int64_t> freq;
    for (const auto& sent : corpus)
        for (const auto& tok : sent) freq[tok] += 1;
    std::vector<std::pair<std::string, int64_t>> items;
    for (const auto& kv : freq)
        if (kv.second >= cfg.min_count) items.push_back(kv);
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    require(!items.empty(), "train_embeddings: no token meets min_count");

    EmbeddingTable table;
    int vsize = static_cast<int>(items.size());
    for (int i = 0; i < vsize; ++i) table.index.emplace(items[static_cast<size_t>(i)].first, i);

    Rng rng(cfg.seed);
    Tensor w_in({vsize, cfg.dim});
    Tensor w_out({vsize, cfg.dim});
    for (int64_t i = 0; i < w_in.numel(); ++i)
        w_in.at(i) = static_cast<real>((rng.uniform() - 0.5) / cfg.dim);

    // cumulative unigram^0.75 sampling table
    std::vector<double> cum(static_cast<size_t>(vsize));
    double z = 0;
    for (int i = 0; i < vsize; ++i) {
        z += std::pow(static_cast<double>(items[static_cast<size_t>(i)].second), 0.75);
        cum[static_cast<size_t>(i)] = z;
    }
    auto sample_negative = [&]() {
        double r = rng.uniform() * z;
        auto it = std::lower_bound(cum.begin(), cum.end(), r);
        return static_cast<int>(it - cum.begin());
    };

    std::vector<std::vector<int>> coded;
    int64_t total_tokens = 0;
    for (const auto& sent : corpus) {
        std::vector<int> ids;
        for (const auto& tok : sent) {
            auto it = table.index.find(tok);
            if (it != table.index.end()) ids.push_back(it->second);
        }
        total_tokens += static_cast<int64_t>(ids.size());
        if (!ids.empty()) coded.push_back(std::move(ids));
    }
    require(total_tokens > 0, "train_embeddings: empty coded corpus");

    std::vector<double> grad_center(static_cast<size_t>(cfg.dim));
    int64_t processed = 0;
    int64_t total_work = static_cast<int64_t>(cfg.epochs) * total_tokens;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const auto& ids : coded) {
            for (size_t pos = 0; pos < ids.size(); ++pos) {
                double lr = cfg.lr * std::max(1.0 - static_cast<double>(processed) /
                                                        static_cast<double>(total_work),
                                              1e-4);
                ++processed;
                int center = ids[pos];
                int b = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cfg.window)));
                for (int off = -b; off <= b; ++off) {
                    if (off == 0) continue;
                    int64_t cpos = static_cast<int64_t>(pos) + off;
                    if (cpos < 0 || cpos >= static_cast<int64_t>(ids.size())) continue;
                    int context = ids[static_cast<size_t>(cpos)];
                    std::fill(grad_center.begin(), grad_center.end(), 0.0);
                    real* vc = w_in.data() + static_cast<size_t>(center) * static_cast<size_t>(cfg.dim);
                    for (int neg = 0; neg <= cfg.negatives; ++neg) {
                        int target;
                        double label;
                        if (neg == 0) {
                            target = context;
                            label = 1.0;
                        } else {
                            target = sample_negative();
                            if (target == context) continue;
                            label = 0.0;
                        }
                        real* vt = w_out.data() + static_cast<size_t>(target) * static_cast<size_t>(cfg.dim);
                        double dot = 0;
                        for (int d = 0; d < cfg.dim; ++d) dot += vc[d] * vt[d];
                        double sig = 1.0 / (1.0 + std::exp(-dot));
                        double g = (sig - label) * lr;
                        for (int d = 0; d < cfg.dim; ++d) {
                            grad_center[static_cast<size_t>(d)] += g * vt[d];
                            vt[d] -= static_cast<real>(g * vc[d]);
                        }
                    }
                    for (int d = 0; d < cfg.dim; ++d)
                        vc[d] -= static_cast<real>(grad_center[static_cast<size_t>(d)]);
                }
            }
        }
    }
    table.vectors = std::move(w_in);
    return table;
}

}  // namespace stylelab
