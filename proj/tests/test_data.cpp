#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "stylelab/data.hpp"

using namespace stylelab;

namespace {

AttributeSchema sentiment_schema() {
    AttributeSchema s;
    s.attributes = {{"sentiment", {"negative", "positive"}}};
    return s;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "stylelab_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("load_tsv parses well-formed lines and lower-cases text") {
    auto path = temp_file("ok.tsv");
    {
        std::ofstream out(path);
        out << "Great Food !\tsentiment=positive\n";
        out << "cold  soup\tsentiment=negative\n";
    }
    LoadReport rep;
    auto examples = load_tsv(path.string(), sentiment_schema(), &rep);
    REQUIRE(examples.size() == 2);
    CHECK(rep.errors.empty());
    CHECK(examples[0].text == "great food !");
    CHECK(examples[0].style.values[0] == 1);
    CHECK(examples[1].text == "cold soup");
}

TEST_CASE("load_tsv records malformed lines with numbers and skips them") {
    auto path = temp_file("bad_lines.tsv");
    {
        std::ofstream out(path);
        for (int i = 0; i < 20; ++i) out << "fine text\tsentiment=positive\n";
        out << "no tab here\n";                            // line 21
        out << "text\tsentiment=wonderful\n";              // line 22: unknown value
    }
    LoadReport rep;
    auto examples = load_tsv(path.string(), sentiment_schema(), &rep);
    CHECK(examples.size() == 20);
    REQUIRE(rep.errors.size() == 2);
    CHECK(rep.errors[0].line_no == 21);
    CHECK(rep.errors[1].line_no == 22);
}

TEST_CASE("load_tsv hard-fails above 10% malformed") {
    auto path = temp_file("mostly_bad.tsv");
    {
        std::ofstream out(path);
        out << "fine\tsentiment=positive\n";
        out << "broken line one\n";
        out << "broken line two\n";
    }
    CHECK_THROWS_AS(load_tsv(path.string(), sentiment_schema()), InputError);
    CHECK_THROWS_AS(load_tsv("/nonexistent/file.tsv", sentiment_schema()), InputError);
}

TEST_CASE("write_tsv then load_tsv is the identity on normalized datasets") {
    SyntheticSpec spec = default_sentiment_spec(400, 3);
    Dataset ds = generate_synthetic(spec);
    auto path = temp_file("roundtrip.tsv");
    write_tsv(path.string(), ds.train, ds.schema);
    auto loaded = load_tsv(path.string(), ds.schema);
    REQUIRE(loaded.size() == ds.train.size());
    for (size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].text == ds.train[i].text);
        CHECK(loaded[i].style == ds.train[i].style);
    }
    // byte-level comparison after a second round-trip
    auto path2 = temp_file("roundtrip2.tsv");
    write_tsv(path2.string(), loaded, ds.schema);
    std::ifstream a(path), b(path2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("generate_synthetic balances styles within one") {
    SyntheticSpec spec = default_sentiment_spec(1000, 11);
    Dataset ds = generate_synthetic(spec);
    SummaryTable all = summarize(ds.train, ds.schema);
    SummaryTable dev = summarize(ds.dev, ds.schema);
    SummaryTable test = summarize(ds.test, ds.schema);
    int64_t neg = 0, pos = 0;
    for (const auto* t : {&all, &dev, &test}) {
        neg += t->counts[0][0];
        pos += t->counts[0][1];
    }
    CHECK(neg + pos == 1000);
    CHECK(std::abs(neg - pos) <= 1);
}

TEST_CASE("generate_synthetic is deterministic and marker words predict the label") {
    SyntheticSpec spec = default_sentiment_spec(600, 5);
    Dataset a = generate_synthetic(spec);
    Dataset b = generate_synthetic(spec);
    REQUIRE(a.train.size() == b.train.size());
    for (size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].text == b.train[i].text);

    // lexicon-lookup rule classifier achieves 100% on the test split
    std::set<std::string> neg(spec.markers[0][0].begin(), spec.markers[0][0].end());
    std::set<std::string> pos(spec.markers[0][1].begin(), spec.markers[0][1].end());
    for (const auto* split : {&a.train, &a.dev, &a.test}) {
        for (const Example& ex : *split) {
            int votes_neg = 0, votes_pos = 0;
            for (const auto& tok : tokenize(ex.text)) {
                votes_neg += neg.count(tok);
                votes_pos += pos.count(tok);
            }
            int predicted = votes_pos > votes_neg ? 1 : 0;
            CHECK(votes_neg + votes_pos > 0);
            CHECK((votes_neg == 0 || votes_pos == 0));  // never mixed
            CHECK(predicted == ex.style.values[0]);
        }
    }
}

TEST_CASE("generate_synthetic respects the length range and vocabulary bound") {
    SyntheticSpec spec = default_sentiment_spec(2000, 9);
    Dataset ds = generate_synthetic(spec);
    std::set<std::string> vocab;
    for (const auto* split : {&ds.train, &ds.dev, &ds.test})
        for (const Example& ex : *split) {
            auto toks = tokenize(ex.text);
            CHECK(toks.size() >= static_cast<size_t>(spec.min_len));
            CHECK(toks.size() <= static_cast<size_t>(spec.max_len));
            for (auto& t : toks) vocab.insert(t);
        }
    CHECK(vocab.size() <= 100);
}

TEST_CASE("synthetic spec validation") {
    SyntheticSpec spec = default_sentiment_spec(100, 1);
    spec.markers[0][0].clear();
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);

    spec = default_sentiment_spec(100, 1);
    spec.markers[0][0][0] = spec.markers[0][1][0];  // overlap between lexicons
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);

    spec = default_sentiment_spec(100, 1);
    spec.templates.push_back("way too short");  // misses the marker slot
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);

    spec = default_sentiment_spec(100, 1);
    spec.content.push_back(spec.markers[0][1][0]);  // content overlaps markers
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
}

TEST_CASE("summarize counts and the 50-token filter") {
    AttributeSchema schema = sentiment_schema();
    SummaryTable empty = summarize({}, schema);
    CHECK(empty.total == 0);
    CHECK(empty.counts[0][0] == 0);

    std::vector<Example> examples;
    std::string long_text = "w";
    for (int i = 0; i < 60; ++i) long_text += " w";
    examples.push_back({long_text, StyleVector{{0}}});
    examples.push_back({"short text", StyleVector{{1}}});
    examples.push_back({"another short one", StyleVector{{1}}});

    SummaryTable t = summarize(examples, schema);
    CHECK(t.total == 3);
    CHECK(t.counts[0][0] + t.counts[0][1] == t.total);
    CHECK(t.max_tokens == 61);

    auto filtered = filter_max_tokens(examples, 50);
    CHECK(filtered.size() == 2);
    SummaryTable t2 = summarize(filtered, schema);
    CHECK(t2.max_tokens <= 50);
}
