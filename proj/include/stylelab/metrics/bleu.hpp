#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylelab/text.hpp"

namespace stylelab {

namespace detail {
// n-gram key: tokens joined with a separator that cannot occur inside one
inline std::string ngram_key(const TokenSeq& toks, size_t start, int n) {
    std::string key;
    for (int k = 0; k < n; ++k) {
        if (k) key += '\x1f';
        key += toks[start + static_cast<size_t>(k)];
    }
    return key;
}
}  // namespace detail

// Corpus-level BLEU, one reference per candidate: clipped modified n-gram
// precisions pooled over the corpus for n = 1..max_n, geometric mean,
// multiplicative brevity penalty. No smoothing: any zero pooled precision
// (or an order with no candidate n-grams at all) gives a score of 0.
inline double bleu(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references,
                   int max_n = 4) {
    require(max_n >= 1, "bleu: max_n >= 1");
    if (candidates.empty()) throw ContractError("bleu: empty candidate set");
    if (candidates.size() != references.size())
        throw ContractError("bleu: candidate/reference counts differ");

    std::vector<int64_t> matched(static_cast<size_t>(max_n), 0);
    std::vector<int64_t> total(static_cast<size_t>(max_n), 0);
    int64_t cand_len = 0, ref_len = 0;

    for (size_t s = 0; s < candidates.size(); ++s) {
        const TokenSeq& cand = candidates[s];
        const TokenSeq& ref = references[s];
        cand_len += static_cast<int64_t>(cand.size());
        ref_len += static_cast<int64_t>(ref.size());
        for (int n = 1; n <= max_n; ++n) {
            if (cand.size() < static_cast<size_t>(n)) continue;
            std::unordered_map<std::string, int64_t> ref_counts;
            if (ref.size() >= static_cast<size_t>(n))
                for (size_t i = 0; i + static_cast<size_t>(n) <= ref.size(); ++i)
                    ref_counts[detail::ngram_key(ref, i, n)] += 1;
            std::unordered_map<std::string, int64_t> cand_counts;
            for (size_t i = 0; i + static_cast<size_t>(n) <= cand.size(); ++i)
                cand_counts[detail::ngram_key(cand, i, n)] += 1;
            for (const auto& [key, cnt] : cand_counts) {
                auto it = ref_counts.find(key);
                int64_t clip = it == ref_counts.end() ? 0 : it->second;
                matched[static_cast<size_t>(n - 1)] += std::min(cnt, clip);
            }
            total[static_cast<size_t>(n - 1)] += static_cast<int64_t>(cand.size()) - n + 1;
        }
    }

    double log_prec_sum = 0;
    for (int n = 0; n < max_n; ++n) {
        if (total[static_cast<size_t>(n)] == 0 || matched[static_cast<size_t>(n)] == 0) return 0.0;
        log_prec_sum += std::log(static_cast<double>(matched[static_cast<size_t>(n)]) /
                                 static_cast<double>(total[static_cast<size_t>(n)]));
    }
    double bp = 1.0;
    if (cand_len < ref_len) {
        if (cand_len == 0) return 0.0;
        bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
    }
    return 100.0 * bp * std::exp(log_prec_sum / max_n);
}

inline double bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references, int max_n = 4) {
    std::vector<TokenSeq> c, r;
    c.reserve(candidates.size());
    r.reserve(references.size());
    for (const auto& s : candidates) c.push_back(tokenize(s));
    for (const auto& s : references) r.push_back(tokenize(s));
    return bleu(c, r, max_n);
}

// Self-BLEU: content-preservation proxy scoring outputs against the inputs.
inline double sbleu(const std::vector<TokenSeq>& outputs, const std::vector<TokenSeq>& inputs,
                    int max_n = 4) {
    return bleu(outputs, inputs, max_n);
}

}  // namespace stylelab
