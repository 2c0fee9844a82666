#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stylelab/metrics/bleu.hpp"
#include "stylelab/metrics/classifier.hpp"
#include "stylelab/metrics/emd.hpp"
#include "stylelab/metrics/kneser_ney.hpp"
#include "stylelab/metrics/wmd.hpp"

namespace stylelab {

// One evaluation row: transfer accuracy, style EMD, optional
// reference BLEU, self-BLEU, word-mover similarity, perplexity.
struct EvalReport {
    double acc = 0;                   // [0, 100]
    double emd_score = 0;             // [0, 1] under the unit ground matrix
    std::optional<double> bleu_score; // [0, 100], reference-based
    double sbleu_score = 0;           // [0, 100]
    double wms_score = 0;             // (0, 1]
    double ppl = 0;                   // >= 1
    int64_t n_examples = 0;
    int64_t wms_undefined = 0;  // examples no word vector could score
};

// Scores aligned (input, output) corpora. Texts are lower-cased and
// space-tokenized here regardless of their source.
inline EvalReport evaluate_corpus(const std::vector<std::string>& inputs,
                                  const std::vector<std::string>& outputs,
                                  const std::vector<StyleVector>& target_styles,
                                  const std::vector<std::string>* references,
                                  const NGramClassifier& classifier, const KneserNeyLM& lm,
                                  const EmbeddingTable& embeddings) {
    require(!inputs.empty(), "evaluate_corpus: empty corpus");
    require(inputs.size() == outputs.size(), "evaluate_corpus: inputs/outputs misaligned");
    require(inputs.size() == target_styles.size(), "evaluate_corpus: styles misaligned");
    if (references) require(references->size() == inputs.size(), "evaluate_corpus: references misaligned");

    std::vector<TokenSeq> in_toks, out_toks;
    in_toks.reserve(inputs.size());
    out_toks.reserve(outputs.size());
    for (const auto& s : inputs) in_toks.push_back(tokenize(s));
    for (const auto& s : outputs) out_toks.push_back(tokenize(s));

    EvalReport rep;
    rep.n_examples = static_cast<int64_t>(inputs.size());
    rep.acc = accuracy(outputs, target_styles, classifier);

    const AttributeSchema& schema = classifier.schema();
    double emd_sum = 0, wms_sum = 0, ppl_sum = 0;
    int64_t wms_count = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        StyleDistribution before = classifier.classify_tokens(in_toks[i]);
        StyleDistribution after = classifier.classify_tokens(out_toks[i]);
        double e = 0;
        for (int k = 0; k < schema.num_attributes(); ++k)
            e += emd(before.probs[static_cast<size_t>(k)], after.probs[static_cast<size_t>(k)]);
        emd_sum += e / schema.num_attributes();

        try {
            wms_sum += wms(in_toks[i], out_toks[i], embeddings);
            wms_count += 1;
        } catch (const MetricUndefinedError&) {
            rep.wms_undefined += 1;
        }
        ppl_sum += lm.sentence_perplexity(out_toks[i]);
    }
    rep.emd_score = emd_sum / static_cast<double>(inputs.size());
    rep.wms_score = wms_count > 0 ? wms_sum / static_cast<double>(wms_count) : 0.0;
    rep.ppl = ppl_sum / static_cast<double>(inputs.size());
    rep.sbleu_score = bleu(out_toks, in_toks);
    if (references) {
        std::vector<TokenSeq> ref_toks;
        ref_toks.reserve(references->size());
        for (const auto& s : *references) ref_toks.push_back(tokenize(s));
        rep.bleu_score = bleu(out_toks, ref_toks);
    }
    return rep;
}

inline std::string format_report(const EvalReport& r) {
    std::ostringstream os;
    os << "examples: " << r.n_examples << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-8s %8s %8s %8s %8s %8s\n", "Acc(%)", "EMD", "BLEU",
                  "sBLEU", "WMS", "PPL");
    os << line;
    std::string bleu_str = r.bleu_score ? [&] {
        char b[32];
        std::snprintf(b, sizeof(b), "%.1f", *r.bleu_score);
        return std::string(b);
    }() : std::string("-");
    std::snprintf(line, sizeof(line), "%-8.1f %8.2f %8s %8.1f %8.2f %8.1f\n", r.acc, r.emd_score,
                  bleu_str.c_str(), r.sbleu_score, r.wms_score, r.ppl);
    os << line;
    if (r.wms_undefined > 0)
        os << "wms-undefined examples (excluded from WMS mean): " << r.wms_undefined << "\n";
    return os.str();
}

inline std::string report_csv_header() { return "acc,emd,bleu,sbleu,wms,ppl,examples,wms_undefined"; }

inline std::string report_csv_row(const EvalReport& r) {
    std::string row = format_double(r.acc) + "," + format_double(r.emd_score) + ",";
    row += r.bleu_score ? format_double(*r.bleu_score) : "";
    row += "," + format_double(r.sbleu_score) + "," + format_double(r.wms_score) + "," +
           format_double(r.ppl) + "," + std::to_string(r.n_examples) + "," +
           std::to_string(r.wms_undefined);
    return row;
}

}  // namespace stylelab
