#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylelab/binio.hpp"
#include "stylelab/text.hpp"

namespace stylelab {

// Interpolated modified Kneser-Ney n-gram language model.
//
// Counting follows the usual scheme: raw counts at the top order,
// left-extension type counts ("continuation counts") below, except that
// n-grams starting with <s> keep raw counts since nothing can precede
// them. Three discounts per order are estimated from the count-of-counts
// (D_k = k - (k+1) Y n_{k+1}/n_k, Y = n_1/(n_1+2 n_2)), falling back to
// 0.75 whenever the statistics are insufficient, and clamped into [0, k]
// so that every context distribution sums to exactly one. The unigram
// level interpolates with the uniform distribution over the predicted
// vocabulary (words + </s> + <unk>; <s> is context only).
//
// Tokens rarer than min_count are replaced by <unk> before counting, so
// <unk> receives real probability mass whenever the corpus has rare words.
class KneserNeyLM {
public:
    static constexpr int kUnk = 0;
    static constexpr int kEos = 1;
    static constexpr int kBos = 2;

    static KneserNeyLM train(const std::vector<TokenSeq>& corpus, int order,
                             int64_t min_count = 2) {
        if (order < 1) throw ConfigError("KneserNeyLM: order must be >= 1");
        if (corpus.empty()) throw InputError("KneserNeyLM: empty corpus");
        require(min_count >= 1, "KneserNeyLM: min_count >= 1");

        KneserNeyLM lm;
        lm.order_ = order;

        std::unordered_map<std::string, int64_t> raw_freq;
        for (const auto& sent : corpus)
            for (const auto& tok : sent) raw_freq[tok] += 1;
        lm.word_ids_["<unk>"] = kUnk;
        lm.word_ids_["</s>"] = kEos;
        lm.word_ids_["<s>"] = kBos;
        std::vector<std::string> kept;
        for (const auto& [tok, cnt] : raw_freq)
            if (cnt >= min_count && tok != "<unk>" && tok != "</s>" && tok != "<s>") kept.push_back(tok);
        std::sort(kept.begin(), kept.end());
        for (const auto& tok : kept) lm.word_ids_.emplace(tok, static_cast<int>(lm.word_ids_.size()));
        lm.predicted_vocab_ = static_cast<int>(lm.word_ids_.size()) - 1;  // everything except <s>

        // raw n-gram counts at every order 1..N over <s>-padded sentences
        std::vector<std::unordered_map<std::string, int64_t>> raw(static_cast<size_t>(order + 1));
        for (const auto& sent : corpus) {
            std::vector<int> ids(static_cast<size_t>(order - 1), kBos);
            for (const auto& tok : sent) ids.push_back(lm.lookup(tok));
            ids.push_back(kEos);
            int start_first = order - 1;  // first predicted position
            for (size_t pos = static_cast<size_t>(start_first); pos < ids.size(); ++pos)
                for (int k = 1; k <= order; ++k) {
                    if (pos + 1 < static_cast<size_t>(k)) continue;
                    raw[static_cast<size_t>(k)][pack(ids, pos + 1 - static_cast<size_t>(k), k)] += 1;
                }
        }

        // adjusted counts: top order raw; below, distinct-left-extension
        // counts except for <s>-initial grams which stay raw
        lm.counts_.assign(static_cast<size_t>(order + 1), {});
        lm.counts_[static_cast<size_t>(order)] = raw[static_cast<size_t>(order)];
        for (int k = order - 1; k >= 1; --k) {
            auto& level = lm.counts_[static_cast<size_t>(k)];
            for (const auto& [key, cnt] : lm.counts_[static_cast<size_t>(k + 1)]) {
                (void)cnt;
                level[suffix(key, k)] += 1;
            }
            for (const auto& [key, cnt] : raw[static_cast<size_t>(k)])
                if (first_id(key) == kBos) level[key] = cnt;
        }

        // per-context totals and discount-class type counts
        lm.ctx_.assign(static_cast<size_t>(order + 1), {});
        for (int k = 1; k <= order; ++k) {
            for (const auto& [key, cnt] : lm.counts_[static_cast<size_t>(k)]) {
                ContextStats& cs = lm.ctx_[static_cast<size_t>(k)][context_of(key)];
                cs.total += cnt;
                if (cnt == 1) cs.n1 += 1;
                else if (cnt == 2) cs.n2 += 1;
                else cs.n3p += 1;
            }
        }

        // discounts from count-of-counts over each level's adjusted counts
        lm.discounts_.assign(static_cast<size_t>(order + 1), {0.0, 0.0, 0.0});
        for (int k = 1; k <= order; ++k) {
            int64_t n1 = 0, n2 = 0, n3 = 0, n4 = 0;
            for (const auto& [key, cnt] : lm.counts_[static_cast<size_t>(k)]) {
                (void)key;
                if (cnt == 1) ++n1;
                else if (cnt == 2) ++n2;
                else if (cnt == 3) ++n3;
                else if (cnt == 4) ++n4;
            }
            auto& d = lm.discounts_[static_cast<size_t>(k)];
            double y = (n1 + 2 * n2) > 0 ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2) : -1;
            d[0] = pick_discount(1, n1 > 0 && y >= 0 ? 1.0 - 2.0 * y * static_cast<double>(n2) / static_cast<double>(n1) : -1);
            d[1] = pick_discount(2, n2 > 0 && y >= 0 ? 2.0 - 3.0 * y * static_cast<double>(n3) / static_cast<double>(n2) : -1);
            d[2] = pick_discount(3, n3 > 0 && y >= 0 ? 3.0 - 4.0 * y * static_cast<double>(n4) / static_cast<double>(n3) : -1);
        }
        return lm;
    }

    int order() const { return order_; }
    int predicted_vocab_size() const { return predicted_vocab_; }

    // P(word | context); context/word given as strings, OOV -> <unk>.
    double prob(const std::vector<std::string>& context, const std::string& word) const {
        std::vector<int> ctx;
        for (const auto& tok : context) ctx.push_back(lookup(tok));
        return prob_ids(ctx, lookup_predicted(word));
    }

    double sentence_log_prob(const TokenSeq& sentence) const {
        std::vector<int> ids(static_cast<size_t>(order_ - 1), kBos);
        for (const auto& tok : sentence) ids.push_back(lookup(tok));
        ids.push_back(kEos);
        double lp = 0;
        for (size_t pos = static_cast<size_t>(order_ - 1); pos < ids.size(); ++pos) {
            std::vector<int> ctx(ids.begin() + static_cast<int64_t>(pos) - (order_ - 1),
                                 ids.begin() + static_cast<int64_t>(pos));
            lp += std::log(prob_ids(ctx, ids[pos]));
        }
        return lp;
    }

    // exp of the mean negative token log-likelihood, EOS included
    double sentence_perplexity(const TokenSeq& sentence) const {
        double lp = sentence_log_prob(sentence);
        double tokens = static_cast<double>(sentence.size() + 1);
        return std::exp(-lp / tokens);
    }

    // corpus value: mean of the per-sentence perplexities
    double corpus_perplexity(const std::vector<TokenSeq>& sentences) const {
        require(!sentences.empty(), "corpus_perplexity: no sentences");
        double s = 0;
        for (const auto& sent : sentences) s += sentence_perplexity(sent);
        return s / static_cast<double>(sentences.size());
    }

    // Sums P(w | context) over the whole predicted vocabulary; should be 1.
    double context_prob_sum(const std::vector<std::string>& context) const {
        std::vector<int> ctx;
        for (const auto& tok : context) ctx.push_back(lookup(tok));
        double s = 0;
        for (const auto& [tok, id] : word_ids_)
            if (id != kBos) s += prob_ids(ctx, id);
        return s;
    }

    void save(std::ostream& os) const {
        binio::write_i64(os, order_);
        binio::write_i64(os, predicted_vocab_);
        binio::write_u32(os, static_cast<uint32_t>(word_ids_.size()));
        for (const auto& [tok, id] : word_ids_) {
            binio::write_str(os, tok);
            binio::write_i64(os, id);
        }
        for (int k = 1; k <= order_; ++k) {
            const auto& level = counts_[static_cast<size_t>(k)];
            binio::write_u32(os, static_cast<uint32_t>(level.size()));
            for (const auto& [key, cnt] : level) {
                binio::write_str(os, key);
                binio::write_i64(os, cnt);
            }
            const auto& d = discounts_[static_cast<size_t>(k)];
            binio::write_f64(os, d[0]);
            binio::write_f64(os, d[1]);
            binio::write_f64(os, d[2]);
        }
    }

    static KneserNeyLM load(std::istream& is) {
        KneserNeyLM lm;
        lm.order_ = static_cast<int>(binio::read_i64(is));
        lm.predicted_vocab_ = static_cast<int>(binio::read_i64(is));
        uint32_t n_words = binio::read_u32(is);
        for (uint32_t i = 0; i < n_words; ++i) {
            std::string tok = binio::read_str(is);
            lm.word_ids_[tok] = static_cast<int>(binio::read_i64(is));
        }
        lm.counts_.assign(static_cast<size_t>(lm.order_ + 1), {});
        lm.ctx_.assign(static_cast<size_t>(lm.order_ + 1), {});
        lm.discounts_.assign(static_cast<size_t>(lm.order_ + 1), {0.0, 0.0, 0.0});
        for (int k = 1; k <= lm.order_; ++k) {
            uint32_t n = binio::read_u32(is);
            auto& level = lm.counts_[static_cast<size_t>(k)];
            for (uint32_t i = 0; i < n; ++i) {
                std::string key = binio::read_str(is);
                level[key] = binio::read_i64(is);
            }
            auto& d = lm.discounts_[static_cast<size_t>(k)];
            d[0] = binio::read_f64(is);
            d[1] = binio::read_f64(is);
            d[2] = binio::read_f64(is);
            for (const auto& [key, cnt] : level) {
                ContextStats& cs = lm.ctx_[static_cast<size_t>(k)][context_of(key)];
                cs.total += cnt;
                if (cnt == 1) cs.n1 += 1;
                else if (cnt == 2) cs.n2 += 1;
                else cs.n3p += 1;
            }
        }
        return lm;
    }

private:
    struct ContextStats {
        int64_t total = 0;
        int64_t n1 = 0;
        int64_t n2 = 0;
        int64_t n3p = 0;
    };

    int order_ = 0;
    int predicted_vocab_ = 0;
    std::unordered_map<std::string, int> word_ids_;
    std::vector<std::unordered_map<std::string, int64_t>> counts_;            // [k] gram -> adjusted count
    std::vector<std::unordered_map<std::string, ContextStats>> ctx_;          // [k] context -> stats
    std::vector<std::array<double, 3>> discounts_;                            // [k] D1, D2, D3+

    static double pick_discount(int k, double estimated) {
        if (!std::isfinite(estimated) || estimated < 0 || estimated > static_cast<double>(k))
            return std::min(0.75, static_cast<double>(k));
        return estimated;
    }

    static std::string pack(const std::vector<int>& ids, size_t start, int k) {
        std::string key;
        key.reserve(static_cast<size_t>(k) * 4);
        for (int i = 0; i < k; ++i) {
            int v = ids[start + static_cast<size_t>(i)];
            key.append(reinterpret_cast<const char*>(&v), 4);
        }
        return key;
    }

    static std::string suffix(const std::string& key, int k) {
        return key.substr(key.size() - static_cast<size_t>(k) * 4);
    }

    static std::string context_of(const std::string& key) { return key.substr(0, key.size() - 4); }

    static int first_id(const std::string& key) {
        int v;
        std::memcpy(&v, key.data(), 4);
        return v;
    }

    int lookup(const std::string& tok) const {
        auto it = word_ids_.find(tok);
        return it == word_ids_.end() ? kUnk : it->second;
    }

    int lookup_predicted(const std::string& tok) const {
        int id = lookup(tok);
        require(id != kBos, "KneserNeyLM: <s> is never predicted");
        return id;
    }

    double prob_ids(const std::vector<int>& context, int word) const {
        return prob_level(order_, context, word);
    }

    double prob_level(int k, const std::vector<int>& context, int word) const {
        if (k == 0) return 1.0 / static_cast<double>(predicted_vocab_);
        std::vector<int> ctx(context.end() - (k - 1), context.end());
        std::string ctx_key = pack(ctx, 0, k - 1);
        auto cit = ctx_[static_cast<size_t>(k)].find(ctx_key);
        if (cit == ctx_[static_cast<size_t>(k)].end() || cit->second.total == 0)
            return prob_level(k - 1, context, word);  // unseen context: pure backoff
        const ContextStats& cs = cit->second;
        std::vector<int> gram = ctx;
        gram.push_back(word);
        auto git = counts_[static_cast<size_t>(k)].find(pack(gram, 0, k));
        int64_t c = git == counts_[static_cast<size_t>(k)].end() ? 0 : git->second;
        const auto& d = discounts_[static_cast<size_t>(k)];
        double disc = c == 0 ? 0.0 : (c == 1 ? d[0] : (c == 2 ? d[1] : d[2]));
        double total = static_cast<double>(cs.total);
        double gamma = (d[0] * static_cast<double>(cs.n1) + d[1] * static_cast<double>(cs.n2) +
                        d[2] * static_cast<double>(cs.n3p)) /
                       total;
        double base = std::max(static_cast<double>(c) - disc, 0.0) / total;
        return base + gamma * prob_level(k - 1, context, word);
    }
};

// Trains the 5-gram (by default) model the evaluation suite uses.
inline KneserNeyLM train_lm(const std::vector<TokenSeq>& corpus, int order = 5,
                            int64_t min_count = 2) {
    return KneserNeyLM::train(corpus, order, min_count);
}

}  // namespace stylelab
