#include <doctest.h>

#include <cmath>

#include "stylelab/common.hpp"
#include "stylelab/metrics/bleu.hpp"
#include "support/bleu_oracle.hpp"

using namespace stylelab;

namespace {

std::vector<TokenSeq> random_corpus(int n_sents, int vocab, int min_len, int max_len, Rng& rng) {
    std::vector<TokenSeq> out;
    for (int s = 0; s < n_sents; ++s) {
        int len = min_len + static_cast<int>(rng.below(static_cast<uint64_t>(max_len - min_len + 1)));
        TokenSeq sent;
        for (int i = 0; i < len; ++i) sent.push_back("w" + std::to_string(rng.below(static_cast<uint64_t>(vocab))));
        out.push_back(std::move(sent));
    }
    return out;
}

}  // namespace

TEST_CASE("identity gives exactly 100") {
    std::vector<TokenSeq> corpus = {{"the", "food", "was", "great", "today"},
                                    {"i", "did", "not", "like", "it", "at", "all"}};
    CHECK(bleu(corpus, corpus) == 100.0);
}

TEST_CASE("no shared 4-gram gives exactly 0 without smoothing") {
    std::vector<TokenSeq> cand = {{"a", "b", "c", "d", "e"}};
    std::vector<TokenSeq> ref = {{"a", "b", "x", "c", "d"}};  // shares up to 2-grams only
    CHECK(bleu(cand, ref) == 0.0);
}

TEST_CASE("worked example: one insertion in the reference") {
    std::vector<TokenSeq> cand = {{"a", "b", "c", "d", "e"}};
    std::vector<TokenSeq> ref = {{"a", "b", "c", "d", "f", "e"}};
    // oracle: p = (1, 3/4, 2/3, 1/2), BP = exp(1 - 6/5)
    double expected =
        100.0 * std::exp(1.0 - 6.0 / 5.0) *
        std::pow(1.0 * (3.0 / 4.0) * (2.0 / 3.0) * (1.0 / 2.0), 0.25);
    CHECK(bleu(cand, ref) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(bleu(cand, ref) == doctest::Approx(57.89).epsilon(1e-3));
}

TEST_CASE("contracts") {
    CHECK_THROWS_AS(bleu(std::vector<TokenSeq>{}, std::vector<TokenSeq>{}), ContractError);
    CHECK_THROWS_AS(bleu(std::vector<TokenSeq>{{"a"}}, std::vector<TokenSeq>{}), ContractError);
}

TEST_CASE("matches independent oracle exactly on random corpora") {
    Rng rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.below(6));
        auto refs = random_corpus(n, 8, 4, 10, rng);
        // candidates: perturbed copies of the references
        auto cands = refs;
        for (auto& sent : cands)
            for (auto& tok : sent)
                if (rng.uniform() < 0.25) tok = "w" + std::to_string(rng.below(8));
        double mine = bleu(cands, refs);
        double oracle = bleu_oracle::corpus_bleu(cands, refs);
        CHECK(mine == oracle);  // exact: same counts, same arithmetic
    }
}

TEST_CASE("invariant under reordering of sentence pairs") {
    Rng rng(808);
    auto refs = random_corpus(6, 6, 4, 9, rng);
    auto cands = refs;
    for (auto& sent : cands)
        for (auto& tok : sent)
            if (rng.uniform() < 0.3) tok = "w" + std::to_string(rng.below(6));
    double base = bleu(cands, refs);
    std::vector<size_t> perm = {3, 0, 5, 1, 4, 2};
    std::vector<TokenSeq> c2, r2;
    for (size_t i : perm) {
        c2.push_back(cands[i]);
        r2.push_back(refs[i]);
    }
    CHECK(bleu(c2, r2) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("sbleu is bleu against the inputs") {
    std::vector<TokenSeq> inputs = {{"the", "soup", "was", "cold", "today"}};
    std::vector<TokenSeq> outputs = {{"the", "soup", "was", "hot", "today"}};
    CHECK(sbleu(outputs, inputs) == bleu(outputs, inputs));
    CHECK(sbleu(inputs, inputs) == 100.0);
}
