#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "stylelab/metrics/emd.hpp"
#include "stylelab/metrics/word2vec.hpp"

namespace stylelab {

namespace detail {
struct Bag {
    std::vector<std::string> tokens;  // unique, sorted
    std::vector<double> weights;      // normalized counts
};

inline Bag nbow(const TokenSeq& doc, const EmbeddingTable& emb) {
    std::map<std::string, int> counts;
    for (const auto& tok : doc)
        if (emb.contains(tok)) counts[tok] += 1;  // OOV tokens are skipped
    Bag bag;
    double total = 0;
    for (const auto& [tok, c] : counts) total += c;
    for (const auto& [tok, c] : counts) {
        bag.tokens.push_back(tok);
        bag.weights.push_back(static_cast<double>(c) / total);
    }
    return bag;
}
}  // namespace detail

// Word Mover's Distance: exact transport between normalized bag-of-words
// mass with Euclidean ground distances between word vectors. Documents
// with no in-vocabulary token cannot be scored.
inline double wmd(const TokenSeq& doc_a, const TokenSeq& doc_b, const EmbeddingTable& emb) {
    detail::Bag a = detail::nbow(doc_a, emb);
    detail::Bag b = detail::nbow(doc_b, emb);
    if (a.tokens.empty() || b.tokens.empty())
        throw MetricUndefinedError("wmd: document has no in-vocabulary token");
    if (a.tokens == b.tokens && a.weights == b.weights) return 0.0;
    size_t m = a.tokens.size(), n = b.tokens.size();
    std::vector<double> cost(m * n);
    int dim = emb.dim();
    for (size_t i = 0; i < m; ++i) {
        const real* va = emb.vec(a.tokens[i]);
        for (size_t j = 0; j < n; ++j) {
            const real* vb = emb.vec(b.tokens[j]);
            double sq = 0;
            for (int d = 0; d < dim; ++d) {
                double diff = va[d] - vb[d];
                sq += diff * diff;
            }
            cost[i * n + j] = std::sqrt(sq);
        }
    }
    return TransportSolver::solve(a.weights, b.weights, cost);
}

inline double wmd(const std::string& a, const std::string& b, const EmbeddingTable& emb) {
    return wmd(tokenize(a), tokenize(b), emb);
}

// Word Mover's Similarity: 1 / (1 + WMD), in (0, 1].
inline double wms(const TokenSeq& a, const TokenSeq& b, const EmbeddingTable& emb) {
    return 1.0 / (1.0 + wmd(a, b, emb));
}

inline double wms(const std::string& a, const std::string& b, const EmbeddingTable& emb) {
    return 1.0 / (1.0 + wmd(a, b, emb));
}

}  // namespace stylelab
