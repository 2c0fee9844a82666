#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stylelab/style.hpp"
#include "stylelab/text.hpp"

namespace stylelab {

struct Example {
    std::string text;  // lower-cased, whitespace-normalized
    StyleVector style;
};

struct Dataset {
    AttributeSchema schema;
    std::vector<Example> train;
    std::vector<Example> dev;
    std::vector<Example> test;
    std::string provenance;
};

struct LineError {
    int line_no = 0;  // 1-based
    std::string message;
};

struct LoadReport {
    int total_lines = 0;
    std::vector<LineError> errors;
};

// One example per line: `text<TAB>attr=value;attr=value`. Malformed lines
// are collected with their line numbers; more than 10% malformed lines is
// a hard failure.
inline std::vector<Example> load_tsv(const std::string& path, const AttributeSchema& schema,
                                     LoadReport* report = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("load_tsv: cannot open " + path);
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    std::vector<Example> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rep.total_lines += 1;
        size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            rep.errors.push_back({line_no, "missing tab separator"});
            continue;
        }
        std::string text = line.substr(0, tab);
        std::string style_str = line.substr(tab + 1);
        try {
            TokenSeq toks = tokenize(text);
            if (toks.empty()) throw InputError("empty text");
            Example ex;
            ex.text = join_tokens(toks);
            ex.style = parse_style(style_str, schema);
            out.push_back(std::move(ex));
        } catch (const InputError& e) {
            rep.errors.push_back({line_no, e.what()});
        }
    }
    if (rep.total_lines > 0 &&
        static_cast<double>(rep.errors.size()) > 0.10 * static_cast<double>(rep.total_lines))
        throw InputError("load_tsv: more than 10% malformed lines in " + path);
    return out;
}

inline void write_tsv(const std::string& path, const std::vector<Example>& examples,
                      const AttributeSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("write_tsv: cannot open " + path);
    for (const Example& ex : examples) out << ex.text << '\t' << format_style(ex.style, schema) << '\n';
}

// Synthetic style corpus: style is carried entirely by marker words drawn
// from per-value lexicons, content by a shared vocabulary, so a lexicon
// lookup classifies the generated text perfectly. Optional skews entangle
// the shared vocabulary with the first attribute: every content word and
// template still occurs under every style, but with style-dependent
// frequency, which reproduces the content/style tension of real corpora.
struct SyntheticSpec {
    AttributeSchema schema;
    // markers[attr][value] -> disjoint word sets
    std::vector<std::vector<std::vector<std::string>>> markers;
    // whitespace-separated templates; "{c}" = content slot, "{mK}" = marker
    // slot for attribute K. Every template must mention every attribute.
    std::vector<std::string> templates;
    std::vector<std::string> content;
    int min_len = 1;
    int max_len = 50;
    int count = 1000;
    uint64_t seed = 0;
    // in [0, 0.5): 0 keeps content/templates independent of style; larger
    // values make the half of the pool "at home" in the sentence style
    // proportionally more likely (P(home) = 0.5 + skew)
    double content_skew = 0.0;
    double template_skew = 0.0;

    void validate() const {
        schema.validate();
        require(static_cast<int>(markers.size()) == schema.num_attributes(),
                "synthetic: marker lexicons must cover every attribute");
        std::vector<std::string> all_markers;
        for (int k = 0; k < schema.num_attributes(); ++k) {
            if (static_cast<int>(markers[static_cast<size_t>(k)].size()) != schema.num_values(k))
                throw ConfigError("synthetic: marker lexicons must cover every value");
            for (const auto& lex : markers[static_cast<size_t>(k)]) {
                if (lex.empty()) throw ConfigError("synthetic: empty marker lexicon");
                for (const auto& w : lex) all_markers.push_back(w);
            }
        }
        for (size_t i = 0; i < all_markers.size(); ++i)
            for (size_t j = i + 1; j < all_markers.size(); ++j)
                if (all_markers[i] == all_markers[j])
                    throw ConfigError("synthetic: marker lexicons must be pairwise disjoint");
        for (const auto& w : all_markers)
            for (const auto& c : content)
                if (w == c) throw ConfigError("synthetic: content vocabulary overlaps markers");
        if (templates.empty()) throw ConfigError("synthetic: no templates");
        if (content.empty()) throw ConfigError("synthetic: empty content vocabulary");
        for (const auto& tpl : templates) {
            TokenSeq toks = tokenize(tpl);
            int len = static_cast<int>(toks.size());
            if (len < min_len || len > max_len)
                throw ConfigError("synthetic: template length outside range: " + tpl);
            for (int k = 0; k < schema.num_attributes(); ++k) {
                std::string slot = "{m" + std::to_string(k) + "}";
                bool found = false;
                for (const auto& t : toks) found = found || (t == slot);
                if (!found)
                    throw ConfigError("synthetic: template misses attribute " + std::to_string(k) +
                                      ": " + tpl);
            }
        }
        if (content_skew < 0 || content_skew >= 0.5 || template_skew < 0 || template_skew >= 0.5)
            throw ConfigError("synthetic: skews must lie in [0, 0.5)");
    }
};

namespace detail {
inline int split_of_index(int64_t index) {
    // deterministic 80/10/10 split keyed on the example index
    uint64_t h = index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    h = splitmix64(h);
    uint64_t bucket = h % 10;
    if (bucket < 8) return 0;
    return bucket == 8 ? 1 : 2;
}

// Index into a pool of n items split into halves, where the half matching
// `home` is preferred with probability 0.5 + skew. Items keep nonzero
// probability under every style.
inline size_t skewed_pick(size_t n, int home, double skew, Rng& rng) {
    if (n < 2 || skew <= 0) return rng.below(n);
    size_t half = n / 2;
    bool in_home = rng.uniform() < 0.5 + skew;
    size_t lo = (home % 2 == 0) == in_home ? 0 : half;
    size_t hi = lo == 0 ? half : n;
    return lo + rng.below(hi - lo);
}
}  // namespace detail

inline Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Dataset ds;
    ds.schema = spec.schema;
    ds.provenance = "synthetic seed=" + std::to_string(spec.seed);
    int64_t combos = spec.schema.num_style_combinations();
    for (int64_t i = 0; i < spec.count; ++i) {
        // round-robin over style combinations keeps counts balanced within 1
        int64_t combo = i % combos;
        StyleVector style;
        int64_t rest = combo;
        for (int k = 0; k < spec.schema.num_attributes(); ++k) {
            int nv = spec.schema.num_values(k);
            style.values.push_back(static_cast<int>(rest % nv));
            rest /= nv;
        }
        int home = style.values[0];
        const std::string& tpl =
            spec.templates[detail::skewed_pick(spec.templates.size(), home, spec.template_skew, rng)];
        TokenSeq toks = tokenize(tpl);
        TokenSeq filled;
        for (const std::string& tok : toks) {
            if (tok == "{c}") {
                filled.push_back(
                    spec.content[detail::skewed_pick(spec.content.size(), home, spec.content_skew, rng)]);
            } else if (tok.size() >= 4 && tok[0] == '{' && tok[1] == 'm' && tok.back() == '}') {
                int k = std::stoi(tok.substr(2, tok.size() - 3));
                const auto& lex =
                    spec.markers[static_cast<size_t>(k)][static_cast<size_t>(style.values[static_cast<size_t>(k)])];
                filled.push_back(lex[rng.below(lex.size())]);
            } else {
                filled.push_back(tok);
            }
        }
        Example ex{join_tokens(filled), style};
        switch (detail::split_of_index(i)) {
            case 0: ds.train.push_back(std::move(ex)); break;
            case 1: ds.dev.push_back(std::move(ex)); break;
            default: ds.test.push_back(std::move(ex)); break;
        }
    }
    return ds;
}

// The corpus used by the bundled experiments: binary sentiment, one marker
// per sentence drawn from 16-word lexicons, a small shared content
// vocabulary, mild style skew on content and template frequencies, and
// sentence lengths 4..6. Total vocabulary is 55 types.
inline SyntheticSpec default_sentiment_spec(int count = 5000, uint64_t seed = 7) {
    SyntheticSpec spec;
    spec.schema.attributes = {{"sentiment", {"negative", "positive"}}};
    spec.markers = {{
        {"bad", "awful", "bland", "dirty", "stale", "rude", "noisy", "broken", "gross", "nasty",
         "soggy", "crowded", "slow", "greasy", "cold", "sour"},
        {"good", "great", "tasty", "lovely", "fresh", "friendly", "cozy", "perfect", "warm",
         "clean", "quick", "sweet", "bright", "fancy", "crisp", "fine"},
    }};
    spec.templates = {
        "the {c} was {m0}",
        "i think the {c} is {m0}",
        "such a {m0} {c} here",
        "what a {m0} {c}",
        "this {c} is really {m0}",
        "the {c} looks {m0}",
        "our {c} seemed {m0}",
        "a {m0} {c} again",
    };
    spec.content = {"food", "pizza", "soup", "staff", "place", "room", "coffee", "cake"};
    spec.min_len = 4;
    spec.max_len = 6;
    spec.count = count;
    spec.seed = seed;
    spec.content_skew = 0.15;
    spec.template_skew = 0.15;
    return spec;
}

struct SummaryTable {
    std::vector<std::vector<int64_t>> counts;  // [attr][value]
    int64_t total = 0;
    int max_tokens = 0;
    double mean_tokens = 0;
};

inline SummaryTable summarize(const std::vector<Example>& examples, const AttributeSchema& schema) {
    SummaryTable t;
    t.counts.resize(static_cast<size_t>(schema.num_attributes()));
    for (int k = 0; k < schema.num_attributes(); ++k)
        t.counts[static_cast<size_t>(k)].assign(static_cast<size_t>(schema.num_values(k)), 0);
    int64_t token_total = 0;
    for (const Example& ex : examples) {
        t.total += 1;
        for (int k = 0; k < schema.num_attributes(); ++k)
            t.counts[static_cast<size_t>(k)][static_cast<size_t>(ex.style.values[static_cast<size_t>(k)])] += 1;
        int len = static_cast<int>(tokenize(ex.text).size());
        token_total += len;
        t.max_tokens = std::max(t.max_tokens, len);
    }
    t.mean_tokens = t.total ? static_cast<double>(token_total) / static_cast<double>(t.total) : 0.0;
    return t;
}

inline std::string format_summary(const SummaryTable& t, const AttributeSchema& schema) {
    std::ostringstream os;
    os << "examples: " << t.total << "\n";
    for (int k = 0; k < schema.num_attributes(); ++k) {
        os << schema.attributes[static_cast<size_t>(k)].name << ":";
        for (int v = 0; v < schema.num_values(k); ++v)
            os << ' ' << schema.attributes[static_cast<size_t>(k)].values[static_cast<size_t>(v)] << '='
               << t.counts[static_cast<size_t>(k)][static_cast<size_t>(v)];
        os << "\n";
    }
    os << "max tokens: " << t.max_tokens << "\n";
    os << "mean tokens: " << t.mean_tokens << "\n";
    return os.str();
}

// The paper-style length cap (e.g. 50 tokens), applied as an optional pass.
inline std::vector<Example> filter_max_tokens(const std::vector<Example>& examples, int cap) {
    require(cap >= 1, "filter_max_tokens: cap >= 1");
    std::vector<Example> out;
    for (const Example& ex : examples)
        if (static_cast<int>(tokenize(ex.text).size()) <= cap) out.push_back(ex);
    return out;
}

}  // namespace stylelab
