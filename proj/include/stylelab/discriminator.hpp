#pragma once

#include <string>
#include <vector>

#include "stylelab/nn.hpp"
#include "stylelab/optim.hpp"
#include "stylelab/style.hpp"
#include "stylelab/text.hpp"

namespace stylelab {

struct DiscriminatorConfig {
    int vocab_size = 0;
    int emb_dim = 128;
    int hidden_dim = 128;
};

// GRU text encoder with one (K+1)-way classification head per attribute:
// class 0 means "model-generated", classes 1..K are the attribute values.
struct DiscriminatorParams {
    DiscriminatorConfig cfg;
    AttributeSchema schema;
    Param emb;  // [V x E]
    GruParams gru;
    std::vector<Param> head_w;  // per attribute [H x (|S_k|+1)]
    std::vector<Param> head_b;  // per attribute [1 x (|S_k|+1)]

    void init(const AttributeSchema& schema_in, const DiscriminatorConfig& cfg_in, Rng& rng) {
        schema = schema_in;
        schema.validate();
        cfg = cfg_in;
        require(cfg.vocab_size > 4, "discriminator: vocabulary too small");
        emb = Param("disc.emb", uniform_init({cfg.vocab_size, cfg.emb_dim}, 0.08, rng));
        gru.init("disc.gru", cfg.emb_dim, cfg.hidden_dim, rng);
        double sh = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));
        head_w.clear();
        head_b.clear();
        for (int k = 0; k < schema.num_attributes(); ++k) {
            int classes = schema.num_values(k) + 1;
            head_w.emplace_back("disc.head_w" + std::to_string(k),
                                uniform_init({cfg.hidden_dim, classes}, sh, rng));
            head_b.emplace_back("disc.head_b" + std::to_string(k), Tensor({1, classes}));
        }
    }

    std::vector<Param*> all() {
        std::vector<Param*> ps = {&emb};
        for (Param* p : gru.all()) ps.push_back(p);
        for (auto& p : head_w) ps.push_back(&p);
        for (auto& p : head_b) ps.push_back(&p);
        return ps;
    }
};

// Final GRU state over hard token ids -> per-attribute logits.
inline std::vector<Var> disc_predict(Tape& t, const std::vector<std::vector<int>>& ids,
                                     DiscriminatorParams& D, bool trainable = true) {
    require(!ids.empty(), "disc_predict: empty batch");
    size_t t_max = 0;
    for (const auto& seq : ids) {
        require(!seq.empty(), "disc_predict: empty input");
        t_max = std::max(t_max, seq.size());
    }
    ParamUse use{t, trainable};
    int batch = static_cast<int>(ids.size());
    Var h = t.constant(Tensor({batch, D.cfg.hidden_dim}));
    for (size_t step = 0; step < t_max; ++step) {
        Tensor mask({batch, 1});
        std::vector<int> col(static_cast<size_t>(batch), PAD_ID);
        for (int b = 0; b < batch; ++b) {
            const auto& seq = ids[static_cast<size_t>(b)];
            if (step < seq.size()) {
                col[static_cast<size_t>(b)] = seq[step];
                mask(b, 0) = 1;
            }
        }
        Var x = t.rows(use(D.emb), col);
        h = gru_cell_masked(t, x, h, D.gru, mask, use);
    }
    std::vector<Var> logits;
    for (size_t k = 0; k < D.head_w.size(); ++k)
        logits.push_back(t.add_rowvec(t.matmul(h, use(D.head_w[k])), use(D.head_b[k])));
    return logits;
}

// Same encoder over softmax-weighted embedding mixtures (one [B x V]
// distribution per step), so the generator can receive gradients through
// its output distributions. A step distribution that is one-hot reproduces
// the hard-id path exactly.
inline std::vector<Var> disc_predict_soft(Tape& t, const std::vector<Var>& dists,
                                          const std::vector<Tensor>& step_masks,
                                          DiscriminatorParams& D, bool trainable = false) {
    require(!dists.empty(), "disc_predict: empty input");
    require(dists.size() == step_masks.size(), "disc_predict: mask count mismatch");
    ParamUse use{t, trainable};
    int batch = t.val(dists[0]).rows();
    Var h = t.constant(Tensor({batch, D.cfg.hidden_dim}));
    for (size_t step = 0; step < dists.size(); ++step) {
        Var x = t.matmul(dists[step], use(D.emb));
        h = gru_cell_masked(t, x, h, D.gru, step_masks[step], use);
    }
    std::vector<Var> logits;
    for (size_t k = 0; k < D.head_w.size(); ++k)
        logits.push_back(t.add_rowvec(t.matmul(h, use(D.head_w[k])), use(D.head_b[k])));
    return logits;
}

// Mean cross entropy against per-attribute targets; one column index per
// (example, attribute).
inline Var disc_cross_entropy(Tape& t, const std::vector<Var>& logits,
                              const std::vector<std::vector<int>>& targets_per_attr) {
    Var total = -1;
    for (size_t k = 0; k < logits.size(); ++k) {
        Var logp = t.pick(t.log_softmax_rows(logits[k]), targets_per_attr[k]);
        total = (total < 0) ? logp : t.add(total, logp);
    }
    Var mean = t.mean_all(total);
    return t.scale(mean, static_cast<real>(-1.0 / static_cast<double>(logits.size())));
}

// One Adam step on the discriminator: real examples are labeled with their
// style classes (value + 1 per head), generated ones with class 0.
// Generator parameters are never touched (the generated batch arrives as
// plain token ids).
inline double disc_train_step(const std::vector<std::vector<int>>& real_ids,
                              const std::vector<StyleVector>& real_styles,
                              const std::vector<std::vector<int>>& generated_ids,
                              DiscriminatorParams& D, Adam& opt, double clip_norm = 5.0) {
    require(!real_ids.empty() && !generated_ids.empty(), "disc_train_step: empty batch");
    require(real_ids.size() == real_styles.size(), "disc_train_step: style missing for real example");
    for (const auto& s : real_styles) validate_style(s, D.schema);

    Tape t;
    std::vector<std::vector<int>> all_ids = real_ids;
    for (const auto& seq : generated_ids) all_ids.push_back(seq);
    std::vector<Var> logits = disc_predict(t, all_ids, D, true);
    std::vector<std::vector<int>> targets(D.head_w.size());
    for (size_t k = 0; k < D.head_w.size(); ++k) {
        targets[k].reserve(all_ids.size());
        for (const auto& s : real_styles) targets[k].push_back(s.values[k] + 1);
        for (size_t g = 0; g < generated_ids.size(); ++g) targets[k].push_back(0);
    }
    Var loss = disc_cross_entropy(t, logits, targets);
    double value = t.val(loss)(0, 0);
    t.backward(loss);
    clip_grad_norm(D.all(), clip_norm);
    opt.step(D.all());
    return value;
}

}  // namespace stylelab
