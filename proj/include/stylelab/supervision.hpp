#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stylelab/discriminator.hpp"
#include "stylelab/generator.hpp"
#include "stylelab/metrics/classifier.hpp"
#include "stylelab/metrics/emd.hpp"

namespace stylelab {

enum class Regime { DAE, DAE_BT, DAE_BT_ADV, DAE_BT_MRT };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::DAE: return "dae";
        case Regime::DAE_BT: return "dae+bt";
        case Regime::DAE_BT_ADV: return "dae+bt+adv";
        case Regime::DAE_BT_MRT: return "dae+bt+mrt";
    }
    return "?";
}

inline Regime parse_regime(const std::string& s) {
    if (s == "dae") return Regime::DAE;
    if (s == "dae+bt") return Regime::DAE_BT;
    if (s == "dae+bt+adv") return Regime::DAE_BT_ADV;
    if (s == "dae+bt+mrt") return Regime::DAE_BT_MRT;
    throw ConfigError("unknown regime \"" + s + "\"");
}

inline bool regime_has_bt(Regime r) { return r != Regime::DAE; }
inline bool regime_has_adv(Regime r) { return r == Regime::DAE_BT_ADV; }
inline bool regime_has_mrt(Regime r) { return r == Regime::DAE_BT_MRT; }

struct LossWeights {
    double ae = 1;
    double bt = 1;
    double adv = 0;
    double mrt = 0;
};

// Linear annealing of the autoencoding weight to zero over training while
// the backtranslation weight stays at one; adversarial and risk terms are
// simply switched by the regime.
inline LossWeights lambda_schedule(int64_t step, int64_t total_steps, Regime regime) {
    require(step >= 0, "lambda_schedule: step >= 0");
    require(total_steps >= 1, "lambda_schedule: total_steps >= 1");
    LossWeights w;
    w.ae = std::max(0.0, 1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
    w.bt = 1.0;
    w.adv = regime_has_adv(regime) ? 1.0 : 0.0;
    w.mrt = regime_has_mrt(regime) ? 1.0 : 0.0;
    return w;
}

// Uniform draw over every schema-valid style different from s in at least
// one attribute.
inline StyleVector perturb_style(const StyleVector& s, const AttributeSchema& schema, Rng& rng) {
    validate_style(s, schema);
    int64_t combos = schema.num_style_combinations();
    if (combos <= 1) throw ContractError("perturb_style: no eligible perturbation exists");
    int64_t s_index = 0;
    int64_t radix = 1;
    for (int k = 0; k < schema.num_attributes(); ++k) {
        s_index += radix * s.values[static_cast<size_t>(k)];
        radix *= schema.num_values(k);
    }
    int64_t r = static_cast<int64_t>(rng.below(static_cast<uint64_t>(combos - 1)));
    if (r >= s_index) r += 1;
    StyleVector out;
    for (int k = 0; k < schema.num_attributes(); ++k) {
        int nv = schema.num_values(k);
        out.values.push_back(static_cast<int>(r % nv));
        r /= nv;
    }
    return out;
}

struct Batch {
    std::vector<std::vector<int>> ids;
    std::vector<StyleVector> styles;
};

struct NoiseParams {
    double p_drop = 0.1;
    int shuffle_k = 3;
};

// ---- denoising autoencoding ----

// mean_b -log P(x_b | e(noise(x_b)), s_b)
inline Var loss_dae(Tape& t, const Batch& batch, GeneratorParams& P, const NoiseParams& np,
                    Rng& rng, bool train = true) {
    require(!batch.ids.empty(), "loss_dae: empty batch");
    std::vector<std::vector<int>> corrupted;
    corrupted.reserve(batch.ids.size());
    for (const auto& seq : batch.ids) corrupted.push_back(noise(seq, np.p_drop, np.shuffle_k, rng));
    EncodedBatch enc = encode_batch(t, corrupted, P, train, &rng, true);
    Var nll = sequence_nll_batch(t, enc, batch.styles, batch.ids, P, train, &rng, true);
    return t.mean_all(nll);
}

// ---- backtranslation ----

// Hard greedy transfer used inside the BT/MRT losses; gradients are blocked
// by construction (the decode runs on its own tape). Empty transfers are
// replaced by a single UNK so downstream encoders get non-empty input.
inline std::vector<std::vector<int>> greedy_transfer(const std::vector<std::vector<int>>& ids,
                                                     const std::vector<StyleVector>& styles,
                                                     GeneratorParams& P, int max_len) {
    Tape local;
    EncodedBatch enc = encode_batch(local, ids, P, false, nullptr, false);
    DecodeResult dec = decode_batch(local, enc, styles, P, DecodeMode::Greedy, max_len);
    for (auto& seq : dec.ids)
        if (seq.empty()) seq = {UNK_ID};
    return dec.ids;
}

// The two-pass backtranslation loop with an injectable transfer function,
// so the reconstruction fixed point can be checked against a stubbed
// identity generator.
using TransferFn = std::function<std::vector<std::vector<int>>(
    const std::vector<std::vector<int>>&, const std::vector<StyleVector>&)>;

struct BacktranslateResult {
    std::vector<std::vector<int>> transferred;    // x_hat, in style s_hat
    std::vector<std::vector<int>> reconstructed;  // x_star, back in style s
};

inline BacktranslateResult backtranslate(const std::vector<std::vector<int>>& ids,
                                         const std::vector<StyleVector>& styles,
                                         const std::vector<StyleVector>& perturbed,
                                         const TransferFn& transfer) {
    BacktranslateResult r;
    r.transferred = transfer(ids, perturbed);
    r.reconstructed = transfer(r.transferred, styles);
    return r;
}

struct BtArtifacts {
    std::vector<StyleVector> perturbed;
    std::vector<std::vector<int>> transferred;
};

// Differentiable reconstruction term given frozen transferred text.
inline Var bt_reconstruction_nll(Tape& t, const std::vector<std::vector<int>>& transferred,
                                 const Batch& batch, GeneratorParams& P, bool train, Rng& rng) {
    EncodedBatch enc = encode_batch(t, transferred, P, train, &rng, true);
    Var nll = sequence_nll_batch(t, enc, batch.styles, batch.ids, P, train, &rng, true);
    return t.mean_all(nll);
}

// mean_b -log P(x_b | e(d(e(x_b), s_hat)), s_b); only the second pass is
// differentiable.
inline Var loss_bt(Tape& t, const Batch& batch, GeneratorParams& P, Rng& rng, bool train = true,
                   BtArtifacts* artifacts = nullptr) {
    require(!batch.ids.empty(), "loss_bt: empty batch");
    std::vector<StyleVector> perturbed;
    perturbed.reserve(batch.styles.size());
    for (const auto& s : batch.styles) perturbed.push_back(perturb_style(s, P.schema, rng));
    std::vector<std::vector<int>> transferred =
        greedy_transfer(batch.ids, perturbed, P, P.cfg.max_len);
    if (artifacts) {
        artifacts->perturbed = perturbed;
        artifacts->transferred = transferred;
    }
    return bt_reconstruction_nll(t, transferred, batch, P, train, rng);
}

// ---- adversarial ----

// mean over attributes and batch of -log P_D(s_hat | x_hat) where x_hat is
// soft-generated toward s_hat; discriminator parameters are constants on
// this tape.
inline Var loss_adv(Tape& t, const Batch& batch, GeneratorParams& P, DiscriminatorParams& D,
                    Rng& rng, bool train = true, int fixed_len = -1,
                    const std::vector<StyleVector>* perturbed_in = nullptr) {
    require(!batch.ids.empty(), "loss_adv: empty batch");
    require(P.schema == D.schema, "loss_adv: discriminator schema mismatch");
    std::vector<StyleVector> perturbed;
    if (perturbed_in) {
        perturbed = *perturbed_in;
    } else {
        for (const auto& s : batch.styles) perturbed.push_back(perturb_style(s, P.schema, rng));
    }
    EncodedBatch enc = encode_batch(t, batch.ids, P, train, &rng, true);
    SoftDecode soft = soft_decode_batch(t, enc, perturbed, P, P.cfg.max_len, fixed_len, train, &rng);
    std::vector<Var> logits = disc_predict_soft(t, soft.dists, soft.step_masks, D, false);
    std::vector<std::vector<int>> targets(logits.size());
    for (size_t k = 0; k < logits.size(); ++k)
        for (const auto& s : perturbed) targets[k].push_back(s.values[k] + 1);
    return disc_cross_entropy(t, logits, targets);
}

// ---- minimum risk training ----

struct MrtSpec {
    int n_samples = 10;
    double alpha = 0.005;
    double temperature = 1.0;

    void validate() const {
        require(n_samples >= 2, "mrt: pool size N >= 2");
        require(alpha > 0, "mrt: alpha > 0");
        require(temperature > 0, "mrt: temperature > 0");
    }
};

// Candidate risk: 1 - clamp(dcEMD(q(x_hat), q(x_star); target s), 0, 1),
// averaged over attributes. Style distributions come from the evaluation
// classifier and are constants; the gradient reaches the generator only
// through the renormalized pool posterior Q ~ P^alpha.
inline double mrt_delta(const StyleDistribution& before, const StyleDistribution& after,
                        const StyleVector& original_style) {
    double acc = 0;
    int m = static_cast<int>(before.probs.size());
    for (int k = 0; k < m; ++k) {
        double dc = dc_emd(before.probs[static_cast<size_t>(k)], after.probs[static_cast<size_t>(k)],
                           original_style.values[static_cast<size_t>(k)]);
        acc += 1.0 - std::clamp(dc, 0.0, 1.0);
    }
    return acc / static_cast<double>(m);
}

struct MrtArtifacts {
    std::vector<StyleVector> perturbed;
    std::vector<std::vector<int>> transferred;
    std::vector<std::vector<std::vector<int>>> candidates;  // [n][b]
    Tensor delta;                                           // [B x n]
};

// Transfer, sample the candidate pool, and score the constant risk weights.
inline MrtArtifacts mrt_sample(const Batch& batch, GeneratorParams& P,
                               const NGramClassifier& classifier, const MrtSpec& spec,
                               const Vocab& vocab, Rng& rng, const BtArtifacts* reuse = nullptr) {
    int batch_n = static_cast<int>(batch.ids.size());
    int n = spec.n_samples;
    MrtArtifacts art;
    if (reuse) {
        art.perturbed = reuse->perturbed;
        art.transferred = reuse->transferred;
    } else {
        for (const auto& s : batch.styles) art.perturbed.push_back(perturb_style(s, P.schema, rng));
        art.transferred = greedy_transfer(batch.ids, art.perturbed, P, P.cfg.max_len);
    }
    art.candidates.resize(static_cast<size_t>(n));
    {
        Tape local;
        EncodedBatch enc = encode_batch(local, art.transferred, P, false, nullptr, false);
        for (int i = 0; i < n; ++i) {
            DecodeResult dec = decode_batch(local, enc, batch.styles, P, DecodeMode::Sample,
                                            P.cfg.max_len, spec.temperature, &rng);
            for (auto& seq : dec.ids)
                if (seq.empty()) seq = {UNK_ID};
            art.candidates[static_cast<size_t>(i)] = std::move(dec.ids);
        }
    }
    art.delta = Tensor({batch_n, n});
    for (int b = 0; b < batch_n; ++b) {
        StyleDistribution before =
            classifier.classify_tokens(decode_ids(art.transferred[static_cast<size_t>(b)], vocab));
        for (int i = 0; i < n; ++i) {
            StyleDistribution after = classifier.classify_tokens(
                decode_ids(art.candidates[static_cast<size_t>(i)][static_cast<size_t>(b)], vocab));
            art.delta(b, i) = static_cast<real>(
                mrt_delta(before, after, batch.styles[static_cast<size_t>(b)]));
        }
    }
    return art;
}

// Expected risk under the sharpened pool posterior, differentiable through
// the candidate log-probabilities only (the pool and Delta are frozen).
inline Var mrt_risk(Tape& t, const MrtArtifacts& art, const Batch& batch, GeneratorParams& P,
                    const MrtSpec& spec, bool train, Rng& rng) {
    int batch_n = static_cast<int>(batch.ids.size());
    int n = static_cast<int>(art.candidates.size());
    EncodedBatch enc = encode_batch(t, art.transferred, P, train, &rng, true);
    EncodedBatch tiled = tile_encoded(t, enc, n);
    std::vector<StyleVector> styles_tiled;
    std::vector<std::vector<int>> targets_tiled;
    styles_tiled.reserve(static_cast<size_t>(batch_n) * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < batch_n; ++b) {
            styles_tiled.push_back(batch.styles[static_cast<size_t>(b)]);
            targets_tiled.push_back(art.candidates[static_cast<size_t>(i)][static_cast<size_t>(b)]);
        }
    Var nll_all = sequence_nll_batch(t, tiled, styles_tiled, targets_tiled, P, train, &rng, true);
    Var logp_all = t.scale(nll_all, -1);  // [N*B x 1]
    Var logp_mat = t.slice_rows(logp_all, 0, batch_n);
    for (int i = 1; i < n; ++i)
        logp_mat = t.concat_cols(logp_mat, t.slice_rows(logp_all, i * batch_n, (i + 1) * batch_n));
    Var q = t.softmax_rows(t.scale(logp_mat, static_cast<real>(spec.alpha)));
    Var risk = t.row_dot(q, t.constant(art.delta));  // [B x 1]
    return t.mean_all(risk);
}

inline Var loss_mrt(Tape& t, const Batch& batch, GeneratorParams& P,
                    const NGramClassifier& classifier, const MrtSpec& spec, const Vocab& vocab,
                    Rng& rng, bool train = true, const BtArtifacts* reuse = nullptr) {
    require(!batch.ids.empty(), "loss_mrt: empty batch");
    spec.validate();
    require(classifier.schema() == P.schema, "loss_mrt: classifier schema mismatch");
    MrtArtifacts art = mrt_sample(batch, P, classifier, spec, vocab, rng, reuse);
    return mrt_risk(t, art, batch, P, spec, train, rng);
}

// ---- combined step ----

struct StepRecord {
    LossWeights weights;
    double l_ae = 0, l_bt = 0, l_adv = 0, l_mrt = 0;
    bool ae_active = false, bt_active = false, adv_active = false, mrt_active = false;
    double total = 0;
    double grad_norm = 0;
    double disc_loss = 0;
};

struct TrainStepConfig {
    Regime regime = Regime::DAE;
    NoiseParams noise;
    MrtSpec mrt;
    double clip_norm = 5.0;
};

// One optimization step: active losses combined with the scheduled weights
// on a single tape, one clipped Adam update on the generator, plus (ADV
// regime) one discriminator update on real vs model-generated text.
inline StepRecord train_step(const Batch& batch, const TrainStepConfig& cfg, GeneratorParams& P,
                             Adam& gen_opt, DiscriminatorParams* D, Adam* disc_opt,
                             const NGramClassifier* classifier, const Vocab* vocab, int64_t step,
                             int64_t total_steps, Rng& rng) {
    StepRecord rec;
    rec.weights = lambda_schedule(step, total_steps, cfg.regime);
    if (regime_has_adv(cfg.regime))
        require(D != nullptr && disc_opt != nullptr, "train_step: ADV regime needs a discriminator");
    if (regime_has_mrt(cfg.regime)) {
        if (classifier == nullptr || vocab == nullptr)
            throw ConfigError("train_step: MRT regime needs a trained style classifier");
    }

    Tape t;
    Var total = -1;
    auto add_term = [&](Var loss, double weight) {
        Var term = t.scale(loss, static_cast<real>(weight));
        total = (total < 0) ? term : t.add(total, term);
    };

    BtArtifacts bt_art;
    if (rec.weights.ae > 0) {
        Var l = loss_dae(t, batch, P, cfg.noise, rng, true);
        rec.l_ae = t.val(l)(0, 0);
        rec.ae_active = true;
        add_term(l, rec.weights.ae);
    }
    if (regime_has_bt(cfg.regime)) {
        Var l = loss_bt(t, batch, P, rng, true, &bt_art);
        rec.l_bt = t.val(l)(0, 0);
        rec.bt_active = true;
        add_term(l, rec.weights.bt);
    }
    if (regime_has_adv(cfg.regime)) {
        Var l = loss_adv(t, batch, P, *D, rng, true, -1, &bt_art.perturbed);
        rec.l_adv = t.val(l)(0, 0);
        rec.adv_active = true;
        add_term(l, rec.weights.adv);
    }
    if (regime_has_mrt(cfg.regime)) {
        Var l = loss_mrt(t, batch, P, *classifier, cfg.mrt, *vocab, rng, true, &bt_art);
        rec.l_mrt = t.val(l)(0, 0);
        rec.mrt_active = true;
        add_term(l, rec.weights.mrt);
    }

    if (total < 0) return rec;  // nothing active (DAE regime at the final step)
    rec.total = t.val(total)(0, 0);
    t.backward(total);
    rec.grad_norm = clip_grad_norm(P.all(), cfg.clip_norm);
    gen_opt.step(P.all());

    if (regime_has_adv(cfg.regime)) {
        rec.disc_loss =
            disc_train_step(batch.ids, batch.styles, bt_art.transferred, *D, *disc_opt, cfg.clip_norm);
    }
    return rec;
}

}  // namespace stylelab
