#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

using TokenSeq = std::vector<std::string>;

// Reserved vocabulary slots.
enum SpecialId : int { PAD_ID = 0, BOS_ID = 1, EOS_ID = 2, UNK_ID = 3 };

inline const char* special_token(int id) {
    switch (id) {
        case PAD_ID: return "<pad>";
        case BOS_ID: return "<s>";
        case EOS_ID: return "</s>";
        case UNK_ID: return "<unk>";
        default: return nullptr;
    }
}

inline bool valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        int extra;
        if (c < 0x80) extra = 0;
        else if ((c >> 5) == 0x6) extra = 1;
        else if ((c >> 4) == 0xe) extra = 2;
        else if ((c >> 3) == 0x1e) extra = 3;
        else return false;
        if (i + static_cast<size_t>(extra) >= s.size()) return false;
        for (int k = 1; k <= extra; ++k)
            if ((static_cast<unsigned char>(s[i + static_cast<size_t>(k)]) >> 6) != 0x2) return false;
        i += static_cast<size_t>(extra) + 1;
    }
    return true;
}

// Lower-cases (ASCII) and splits on whitespace runs.
inline TokenSeq tokenize(const std::string& text) {
    if (!valid_utf8(text)) throw InputError("tokenize: invalid UTF-8 input");
    TokenSeq out;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string join_tokens(const TokenSeq& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += ' ';
        s += toks[i];
    }
    return s;
}

// Token/id bijection with the four reserved symbols. Ids 4.. are assigned
// by descending frequency, ties broken lexicographically, so vocabularies
// are reproducible across runs.
class Vocab {
public:
    Vocab() {
        for (int i = 0; i < 4; ++i) {
            id_to_token_.push_back(special_token(i));
            token_to_id_.emplace(special_token(i), i);
            freq_.push_back(0);
        }
    }

    template <class Iterable>
    static Vocab build(const Iterable& corpus, int64_t min_count = 1) {
        require(min_count >= 1, "Vocab::build: min_count >= 1");
        std::unordered_map<std::string, int64_t> counts;
        bool any = false;
        for (const TokenSeq& seq : corpus) {
            any = true;
            for (const std::string& tok : seq) counts[tok] += 1;
        }
        if (!any) throw InputError("Vocab::build: empty corpus");
        std::vector<std::pair<std::string, int64_t>> items;
        items.reserve(counts.size());
        for (auto& kv : counts)
            if (kv.second >= min_count) items.emplace_back(kv.first, kv.second);
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        Vocab v;
        for (auto& [tok, cnt] : items) v.add(tok, cnt);
        return v;
    }

    int add(const std::string& token, int64_t freq = 0) {
        auto it = token_to_id_.find(token);
        if (it != token_to_id_.end()) return it->second;
        int id = static_cast<int>(id_to_token_.size());
        id_to_token_.push_back(token);
        token_to_id_.emplace(token, id);
        freq_.push_back(freq);
        return id;
    }

    int size() const { return static_cast<int>(id_to_token_.size()); }

    int id(const std::string& token) const {
        auto it = token_to_id_.find(token);
        return it == token_to_id_.end() ? UNK_ID : it->second;
    }

    bool contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

    const std::string& token(int id) const {
        if (id < 0 || id >= size()) throw IndexError("Vocab::token: id out of range");
        return id_to_token_[static_cast<size_t>(id)];
    }

    int64_t freq(int id) const { return freq_[static_cast<size_t>(id)]; }

private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
    std::vector<int64_t> freq_;
};

// BOS/EOS framing is the caller's concern; unknown tokens map to UNK.
inline std::vector<int> code(const TokenSeq& seq, const Vocab& vocab) {
    std::vector<int> ids;
    ids.reserve(seq.size());
    for (const std::string& tok : seq) ids.push_back(vocab.id(tok));
    return ids;
}

inline TokenSeq decode_ids(const std::vector<int>& ids, const Vocab& vocab) {
    TokenSeq out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(vocab.token(id));
    return out;
}

struct NoiseSpec {
    double p_drop = 0.1;
    int shuffle_k = 3;
    uint64_t seed = 0;
};

// Word-drop plus local shuffle. Every surviving token is displaced by at
// most shuffle_k positions (sort keys index + U[0, k)). If every token
// would be dropped, the first token is kept so the encoder input stays
// non-empty. Works on any element type (tokens or vocabulary ids).
template <class T>
std::vector<T> noise(const std::vector<T>& seq, double p_drop, int shuffle_k, Rng& rng) {
    require(p_drop >= 0 && p_drop <= 1, "noise: p_drop must be a probability");
    require(shuffle_k >= 0, "noise: shuffle window must be >= 0");
    if (seq.empty()) return {};
    std::vector<size_t> kept;
    for (size_t i = 0; i < seq.size(); ++i)
        if (rng.uniform() >= p_drop) kept.push_back(i);
    if (kept.empty()) kept.push_back(0);
    if (shuffle_k > 0 && kept.size() > 1) {
        std::vector<std::pair<double, size_t>> keyed(kept.size());
        for (size_t i = 0; i < kept.size(); ++i)
            keyed[i] = {static_cast<double>(i) + rng.uniform(0.0, static_cast<double>(shuffle_k)), kept[i]};
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < kept.size(); ++i) kept[i] = keyed[i].second;
    }
    std::vector<T> out;
    out.reserve(kept.size());
    for (size_t i : kept) out.push_back(seq[i]);
    return out;
}

inline TokenSeq noise(const TokenSeq& seq, const NoiseSpec& spec) {
    Rng rng(spec.seed);
    return noise(seq, spec.p_drop, spec.shuffle_k, rng);
}

}  // namespace stylelab
