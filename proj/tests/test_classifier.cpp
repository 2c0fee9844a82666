#include <doctest.h>

#include "stylelab/metrics/classifier.hpp"

using namespace stylelab;

namespace {

AttributeSchema sentiment_schema() {
    AttributeSchema s;
    s.attributes = {{"sentiment", {"negative", "positive"}}};
    return s;
}

// linearly separable toy corpus: label decided by a single marker word
std::vector<Example> separable_corpus(int n, Rng& rng) {
    std::vector<std::string> pos = {"great", "tasty", "lovely"};
    std::vector<std::string> neg = {"awful", "bland", "dirty"};
    std::vector<std::string> content = {"food", "staff", "room", "coffee", "menu"};
    std::vector<Example> out;
    for (int i = 0; i < n; ++i) {
        int label = static_cast<int>(rng.below(2));
        const auto& lex = label == 1 ? pos : neg;
        std::string text = "the " + content[rng.below(content.size())] + " was " +
                           lex[rng.below(lex.size())];
        out.push_back({text, StyleVector{{label}}});
    }
    return out;
}

}  // namespace

TEST_CASE("reaches 100% train accuracy on a separable corpus") {
    Rng rng(12);
    auto data = separable_corpus(300, rng);
    NGramClassifier clf = NGramClassifier::train(data, sentiment_schema());
    std::vector<std::string> texts;
    std::vector<StyleVector> styles;
    for (const auto& ex : data) {
        texts.push_back(ex.text);
        styles.push_back(ex.style);
    }
    CHECK(accuracy(texts, styles, clf) == 100.0);
}

TEST_CASE("classify returns a normalized distribution") {
    Rng rng(13);
    auto data = separable_corpus(100, rng);
    NGramClassifier clf = NGramClassifier::train(data, sentiment_schema());
    StyleDistribution d = clf.classify("the food was great");
    d.validate(sentiment_schema());
    CHECK(d.probs[0][1] > d.probs[0][0]);
    // empty text still yields a valid distribution
    clf.classify("").validate(sentiment_schema());
}

TEST_CASE("single observed value is a configuration error") {
    std::vector<Example> data = {{"good stuff", StyleVector{{1}}},
                                 {"more good stuff", StyleVector{{1}}}};
    CHECK_THROWS_AS(NGramClassifier::train(data, sentiment_schema()), ConfigError);
}

TEST_CASE("label permutation permutes head weights and keeps the loss curve") {
    Rng rng(14);
    auto data = separable_corpus(200, rng);
    auto flipped = data;
    for (auto& ex : flipped) ex.style.values[0] = 1 - ex.style.values[0];
    AttributeSchema schema = sentiment_schema();
    ClassifierConfig cfg;
    cfg.epochs = 3;
    NGramClassifier a = NGramClassifier::train(data, schema, cfg);
    NGramClassifier b = NGramClassifier::train(flipped, schema, cfg);
    CHECK(a.mean_train_loss(data) == doctest::Approx(b.mean_train_loss(flipped)).epsilon(1e-12));
    const Tensor& wa = a.head_weights(0);
    const Tensor& wb = b.head_weights(0);
    for (int d = 0; d < wa.rows(); ++d) {
        CHECK(wa(d, 0) == doctest::Approx(wb(d, 1)).epsilon(1e-12));
        CHECK(wa(d, 1) == doctest::Approx(wb(d, 0)).epsilon(1e-12));
    }

    // accuracy is invariant under the simultaneous label permutation
    std::vector<std::string> texts;
    std::vector<StyleVector> targets, flipped_targets;
    for (const auto& ex : data) {
        texts.push_back(ex.text);
        targets.push_back(ex.style);
        flipped_targets.push_back(StyleVector{{1 - ex.style.values[0]}});
    }
    CHECK(accuracy(texts, targets, a) == accuracy(texts, flipped_targets, b));
}

TEST_CASE("deterministic given the seed") {
    Rng rng(15);
    auto data = separable_corpus(80, rng);
    NGramClassifier a = NGramClassifier::train(data, sentiment_schema());
    NGramClassifier b = NGramClassifier::train(data, sentiment_schema());
    CHECK(a.classify("the room was dirty").probs[0][0] ==
          b.classify("the room was dirty").probs[0][0]);
}

TEST_CASE("accuracy contract checks and tie-breaking") {
    Rng rng(16);
    auto data = separable_corpus(60, rng);
    NGramClassifier clf = NGramClassifier::train(data, sentiment_schema());
    CHECK_THROWS_AS(accuracy({}, {}, clf), ContractError);
    CHECK_THROWS_AS(accuracy({"a"}, {}, clf), ContractError);
    // argmax ties break toward the lowest class index
    CHECK(NGramClassifier::argmax({0.5, 0.5}) == 0);
    CHECK(NGramClassifier::argmax({0.2, 0.5, 0.5}) == 1);
}

TEST_CASE("multi-attribute accuracy averages across attributes") {
    AttributeSchema schema;
    schema.attributes = {{"sentiment", {"neg", "pos"}}, {"tense", {"past", "present"}}};
    std::vector<std::string> pos = {"great", "lovely"}, neg = {"awful", "bland"};
    std::vector<std::string> past = {"was", "seemed"}, present = {"is", "looks"};
    Rng rng(17);
    std::vector<Example> data;
    for (int i = 0; i < 240; ++i) {
        int s = static_cast<int>(rng.below(2)), t = static_cast<int>(rng.below(2));
        std::string text = "the food " + (t ? present : past)[rng.below(2)] + " " +
                           (s ? pos : neg)[rng.below(2)];
        data.push_back({text, StyleVector{{s, t}}});
    }
    NGramClassifier clf = NGramClassifier::train(data, schema);
    std::vector<std::string> texts = {"the food is great", "the food was awful"};
    std::vector<StyleVector> right = {StyleVector{{1, 1}}, StyleVector{{0, 0}}};
    CHECK(accuracy(texts, right, clf) == 100.0);
    // one attribute wrong on one of two examples -> 75%
    std::vector<StyleVector> half = {StyleVector{{1, 0}}, StyleVector{{0, 0}}};
    CHECK(accuracy(texts, half, clf) == 75.0);
}
