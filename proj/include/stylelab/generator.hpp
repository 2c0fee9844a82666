#pragma once

#include <string>
#include <vector>

#include "stylelab/nn.hpp"
#include "stylelab/optim.hpp"
#include "stylelab/style.hpp"
#include "stylelab/text.hpp"

namespace stylelab {

struct GeneratorConfig {
    int vocab_size = 0;
    int emb_dim = 512;
    int hidden_dim = 512;
    int pool_window = 5;
    int max_len = 50;
    double dropout = 0.1;
};

// Bidirectional GRU encoder with temporal max-pooling; style-conditioned
// unidirectional GRU decoder with dot-product attention over the pooled
// latent sequence. The decoder's first input is the BOS embedding plus the
// sum of the attribute-value embeddings; its initial hidden state is a
// learned projection of the mean-pooled latent.
struct GeneratorParams {
    GeneratorConfig cfg;
    AttributeSchema schema;
    std::vector<int> style_offset;

    Param token_emb;  // [V x E]
    Param style_emb;  // [sum_k |S_k| x E]
    GruParams enc_fwd, enc_bwd;  // input E, hidden H
    GruParams dec;               // input E, hidden H
    Param attn_w;                // [H x 2H]
    Param init_w;                // [2H x H]
    Param init_b;                // [1 x H]
    Param comb_w;                // [3H x H]
    Param comb_b;                // [1 x H]
    Param out_w;                 // [H x V]
    Param out_b;                 // [1 x V]

    void init(const AttributeSchema& schema_in, const GeneratorConfig& cfg_in, Rng& rng) {
        schema = schema_in;
        schema.validate();
        cfg = cfg_in;
        require(cfg.vocab_size > 4, "generator: vocabulary too small");
        int e = cfg.emb_dim, h = cfg.hidden_dim, v = cfg.vocab_size;
        style_offset.clear();
        int total_styles = 0;
        for (int k = 0; k < schema.num_attributes(); ++k) {
            style_offset.push_back(total_styles);
            total_styles += schema.num_values(k);
        }
        token_emb = Param("gen.token_emb", uniform_init({v, e}, 0.08, rng));
        style_emb = Param("gen.style_emb", uniform_init({total_styles, e}, 0.08, rng));
        enc_fwd.init("gen.enc_fwd", e, h, rng);
        enc_bwd.init("gen.enc_bwd", e, h, rng);
        dec.init("gen.dec", e, h, rng);
        double sh = 1.0 / std::sqrt(static_cast<double>(h));
        double s2h = 1.0 / std::sqrt(static_cast<double>(2 * h));
        double s3h = 1.0 / std::sqrt(static_cast<double>(3 * h));
        attn_w = Param("gen.attn_w", uniform_init({h, 2 * h}, sh, rng));
        init_w = Param("gen.init_w", uniform_init({2 * h, h}, s2h, rng));
        init_b = Param("gen.init_b", Tensor({1, h}));
        comb_w = Param("gen.comb_w", uniform_init({3 * h, h}, s3h, rng));
        comb_b = Param("gen.comb_b", Tensor({1, h}));
        out_w = Param("gen.out_w", uniform_init({h, v}, sh, rng));
        out_b = Param("gen.out_b", Tensor({1, v}));
    }

    std::vector<Param*> all() {
        std::vector<Param*> ps = {&token_emb, &style_emb, &attn_w, &init_w, &init_b,
                                  &comb_w,    &comb_b,    &out_w,  &out_b};
        for (Param* p : enc_fwd.all()) ps.push_back(p);
        for (Param* p : enc_bwd.all()) ps.push_back(p);
        for (Param* p : dec.all()) ps.push_back(p);
        return ps;
    }

    int style_row(int attr, int value) const {
        return style_offset[static_cast<size_t>(attr)] + value;
    }
};

struct EncodedBatch {
    int batch = 0;
    std::vector<Var> latent;  // T_lat steps of [B x 2H]
    Tensor latent_mask;       // [B x T_lat]
    std::vector<int> latent_len;
    Var pooled_mean = -1;     // [B x 2H]
};

namespace genops {

constexpr real kNegInf = static_cast<real>(-1e30);

inline Tensor column_mask(const std::vector<std::vector<int>>& ids, size_t t) {
    Tensor mask({static_cast<int>(ids.size()), 1});
    for (size_t b = 0; b < ids.size(); ++b) mask(static_cast<int>(b), 0) = t < ids[b].size() ? 1 : 0;
    return mask;
}

inline std::vector<int> column_ids(const std::vector<std::vector<int>>& ids, size_t t) {
    std::vector<int> col(ids.size(), PAD_ID);
    for (size_t b = 0; b < ids.size(); ++b)
        if (t < ids[b].size()) col[b] = ids[b][t];
    return col;
}

}  // namespace genops

// Encodes a batch of non-empty id sequences. Padded time steps are excluded
// from pooling, dead pooling windows are zeroed and masked.
inline EncodedBatch encode_batch(Tape& t, const std::vector<std::vector<int>>& ids,
                                 GeneratorParams& P, bool train = false, Rng* rng = nullptr,
                                 bool trainable = true) {
    require(!ids.empty(), "encode: empty batch");
    size_t t_max = 0;
    for (const auto& seq : ids) {
        require(!seq.empty(), "encode: empty input sequence");
        t_max = std::max(t_max, seq.size());
    }
    ParamUse use{t, trainable};
    int batch = static_cast<int>(ids.size());
    int h = P.cfg.hidden_dim;
    int window = P.cfg.pool_window;

    std::vector<Tensor> masks;
    std::vector<Var> embs;
    masks.reserve(t_max);
    embs.reserve(t_max);
    for (size_t step = 0; step < t_max; ++step) {
        masks.push_back(genops::column_mask(ids, step));
        Var x = t.rows(use(P.token_emb), genops::column_ids(ids, step));
        if (train && P.cfg.dropout > 0 && rng) x = t.dropout(x, P.cfg.dropout, *rng);
        embs.push_back(x);
    }

    std::vector<Var> fwd(t_max), bwd(t_max);
    Var hf = t.constant(Tensor({batch, h}));
    for (size_t step = 0; step < t_max; ++step) {
        hf = gru_cell_masked(t, embs[step], hf, P.enc_fwd, masks[step], use);
        fwd[step] = hf;
    }
    Var hb = t.constant(Tensor({batch, h}));
    for (size_t step = t_max; step-- > 0;) {
        hb = gru_cell_masked(t, embs[step], hb, P.enc_bwd, masks[step], use);
        bwd[step] = hb;
    }

    std::vector<Var> states;
    states.reserve(t_max);
    for (size_t step = 0; step < t_max; ++step)
        states.push_back(t.where_mask(t.concat_cols(fwd[step], bwd[step]), masks[step], genops::kNegInf));

    std::vector<Var> pooled = max_pool_time(t, states, window);
    int t_lat = static_cast<int>(pooled.size());

    EncodedBatch enc;
    enc.batch = batch;
    enc.latent_mask = Tensor({batch, t_lat});
    enc.latent_len.resize(static_cast<size_t>(batch));
    for (int b = 0; b < batch; ++b) {
        int len = static_cast<int>(ids[static_cast<size_t>(b)].size());
        int lat = (len + window - 1) / window;
        enc.latent_len[static_cast<size_t>(b)] = lat;
        for (int j = 0; j < t_lat; ++j) enc.latent_mask(b, j) = j < lat ? 1 : 0;
    }
    for (int j = 0; j < t_lat; ++j) {
        Tensor col({batch, 1});
        for (int b = 0; b < batch; ++b) col(b, 0) = enc.latent_mask(b, j);
        enc.latent.push_back(t.mul_mask(pooled[static_cast<size_t>(j)], col));
    }

    Var acc = enc.latent[0];
    for (int j = 1; j < t_lat; ++j) acc = t.add(acc, enc.latent[static_cast<size_t>(j)]);
    Tensor inv_len({batch, 1});
    for (int b = 0; b < batch; ++b)
        inv_len(b, 0) = static_cast<real>(1.0 / enc.latent_len[static_cast<size_t>(b)]);
    enc.pooled_mean = t.mul_colvec(acc, t.constant(std::move(inv_len)));
    return enc;
}

namespace genops {

// Sum of the attribute-value embeddings, one row per example.
inline Var style_sum(Tape& t, const std::vector<StyleVector>& styles, GeneratorParams& P,
                     const ParamUse& use) {
    Var acc = -1;
    for (int k = 0; k < P.schema.num_attributes(); ++k) {
        std::vector<int> rows_k;
        rows_k.reserve(styles.size());
        for (const auto& s : styles) {
            validate_style(s, P.schema);
            rows_k.push_back(P.style_row(k, s.values[static_cast<size_t>(k)]));
        }
        Var e = t.rows(use(P.style_emb), rows_k);
        acc = (acc < 0) ? e : t.add(acc, e);
    }
    return acc;
}

inline Var initial_hidden(Tape& t, const EncodedBatch& enc, GeneratorParams& P,
                          const ParamUse& use) {
    return t.tanh(t.add_rowvec(t.matmul(enc.pooled_mean, use(P.init_w)), use(P.init_b)));
}

struct DecoderStep {
    Var hidden;
    Var logits;
};

inline DecoderStep decoder_step(Tape& t, Var x, Var h, const EncodedBatch& enc,
                                GeneratorParams& P, const Tensor& step_mask, bool train,
                                Rng* rng, const ParamUse& use) {
    Var h2 = gru_cell_masked(t, x, h, P.dec, step_mask, use);
    Var query = t.matmul(h2, use(P.attn_w));
    Var scores = t.row_dot(query, enc.latent[0]);
    for (size_t j = 1; j < enc.latent.size(); ++j)
        scores = t.concat_cols(scores, t.row_dot(query, enc.latent[j]));
    scores = t.where_mask(scores, enc.latent_mask, kNegInf);
    Var alpha = t.softmax_rows(scores);
    Var ctx = -1;
    for (size_t j = 0; j < enc.latent.size(); ++j) {
        Var term = t.mul_colvec(enc.latent[j], t.slice_cols(alpha, static_cast<int>(j),
                                                            static_cast<int>(j) + 1));
        ctx = (ctx < 0) ? term : t.add(ctx, term);
    }
    Var o = t.tanh(t.add_rowvec(t.matmul(t.concat_cols(h2, ctx), use(P.comb_w)), use(P.comb_b)));
    if (train && P.cfg.dropout > 0 && rng) o = t.dropout(o, P.cfg.dropout, *rng);
    Var logits = t.add_rowvec(t.matmul(o, use(P.out_w)), use(P.out_b));
    return {h2, logits};
}

}  // namespace genops

// Teacher-forced negative log-likelihood of the targets (EOS appended),
// one scalar per example: [B x 1]. Targets must not contain PAD.
inline Var sequence_nll_batch(Tape& t, const EncodedBatch& enc,
                              const std::vector<StyleVector>& styles,
                              const std::vector<std::vector<int>>& targets, GeneratorParams& P,
                              bool train = false, Rng* rng = nullptr, bool trainable = true) {
    require(static_cast<int>(styles.size()) == enc.batch, "decode: style count mismatch");
    require(static_cast<int>(targets.size()) == enc.batch, "decode: target count mismatch");
    size_t t_out = 0;
    for (const auto& seq : targets) {
        require(!seq.empty(), "sequence_log_prob: empty target");
        for (int id : seq) require(id != PAD_ID, "sequence_log_prob: target contains PAD");
        t_out = std::max(t_out, seq.size());
    }
    t_out += 1;  // EOS
    ParamUse use{t, trainable};
    int batch = enc.batch;

    Var h = genops::initial_hidden(t, enc, P, use);
    Var x = t.add(t.rows(use(P.token_emb), std::vector<int>(static_cast<size_t>(batch), BOS_ID)),
                  genops::style_sum(t, styles, P, use));
    if (train && P.cfg.dropout > 0 && rng) x = t.dropout(x, P.cfg.dropout, *rng);

    Var total = -1;
    for (size_t step = 0; step < t_out; ++step) {
        Tensor step_mask({batch, 1});
        std::vector<int> target_col(static_cast<size_t>(batch), PAD_ID);
        for (int b = 0; b < batch; ++b) {
            const auto& seq = targets[static_cast<size_t>(b)];
            if (step < seq.size()) {
                target_col[static_cast<size_t>(b)] = seq[step];
                step_mask(b, 0) = 1;
            } else if (step == seq.size()) {
                target_col[static_cast<size_t>(b)] = EOS_ID;
                step_mask(b, 0) = 1;
            } else {
                step_mask(b, 0) = 0;
            }
        }
        auto out = genops::decoder_step(t, x, h, enc, P, step_mask, train, rng, use);
        h = out.hidden;
        Var logp = t.pick(t.log_softmax_rows(out.logits), target_col);
        logp = t.mul_mask(logp, step_mask);
        total = (total < 0) ? logp : t.add(total, logp);
        if (step + 1 < t_out) {
            Var nx = t.rows(use(P.token_emb), target_col);
            if (train && P.cfg.dropout > 0 && rng) nx = t.dropout(nx, P.cfg.dropout, *rng);
            x = nx;
        }
    }
    return t.scale(total, -1);
}

enum class DecodeMode { Greedy, Sample };

struct DecodeResult {
    std::vector<std::vector<int>> ids;       // without EOS
    std::vector<std::vector<double>> logps;  // per emitted token, EOS included
};

// Free-running decode (no gradients). Sampling is deterministic given the
// rng state; greedy breaks logit ties toward the lowest token id.
inline DecodeResult decode_batch(Tape& t, const EncodedBatch& enc,
                                 const std::vector<StyleVector>& styles, GeneratorParams& P,
                                 DecodeMode mode, int max_len, double temperature = 1.0,
                                 Rng* rng = nullptr) {
    require(max_len >= 1, "decode: max_len >= 1");
    require(static_cast<int>(styles.size()) == enc.batch, "decode: style count mismatch");
    if (mode == DecodeMode::Sample) {
        require(rng != nullptr, "decode: sampling needs an rng");
        require(temperature > 0, "decode: temperature > 0");
    }
    ParamUse use{t, false};
    int batch = enc.batch;

    DecodeResult res;
    res.ids.assign(static_cast<size_t>(batch), {});
    res.logps.assign(static_cast<size_t>(batch), {});
    std::vector<char> done(static_cast<size_t>(batch), 0);

    Var h = genops::initial_hidden(t, enc, P, use);
    Var x = t.add(t.rows(use(P.token_emb), std::vector<int>(static_cast<size_t>(batch), BOS_ID)),
                  genops::style_sum(t, styles, P, use));

    for (int step = 0; step <= max_len; ++step) {
        Tensor step_mask({batch, 1});
        for (int b = 0; b < batch; ++b) step_mask(b, 0) = done[static_cast<size_t>(b)] ? 0 : 1;
        auto out = genops::decoder_step(t, x, h, enc, P, step_mask, false, nullptr, use);
        h = out.hidden;
        const Tensor& logits = t.val(out.logits);
        int v = logits.cols();
        // PAD and BOS are never emitted
        auto allowed = [](int j) { return j != PAD_ID && j != BOS_ID; };
        std::vector<int> chosen(static_cast<size_t>(batch), PAD_ID);
        for (int b = 0; b < batch; ++b) {
            if (done[static_cast<size_t>(b)]) continue;
            // log-softmax for the scored/emitted token
            double mx = logits(b, 0);
            for (int j = 1; j < v; ++j) mx = std::max(mx, static_cast<double>(logits(b, j)));
            double z = 0;
            for (int j = 0; j < v; ++j) z += std::exp(static_cast<double>(logits(b, j)) - mx);
            int pick;
            if (mode == DecodeMode::Greedy) {
                pick = EOS_ID;
                for (int j = 0; j < v; ++j)
                    if (allowed(j) && logits(b, j) > logits(b, pick)) pick = j;
            } else {
                // temperature sampling over the shifted logits; the shift
                // uses the max over allowed tokens so tiny temperatures
                // cannot underflow every weight
                double mx_allowed = logits(b, EOS_ID);
                for (int j = 0; j < v; ++j)
                    if (allowed(j)) mx_allowed = std::max(mx_allowed, static_cast<double>(logits(b, j)));
                double zt = 0;
                std::vector<double> w(static_cast<size_t>(v), 0.0);
                for (int j = 0; j < v; ++j) {
                    if (!allowed(j)) continue;
                    w[static_cast<size_t>(j)] =
                        std::exp((static_cast<double>(logits(b, j)) - mx_allowed) / temperature);
                    zt += w[static_cast<size_t>(j)];
                }
                double r = rng->uniform() * zt;
                pick = v - 1;
                double cum = 0;
                for (int j = 0; j < v; ++j) {
                    cum += w[static_cast<size_t>(j)];
                    if (w[static_cast<size_t>(j)] > 0 && r < cum) {
                        pick = j;
                        break;
                    }
                }
            }
            // force termination at the cap
            if (step == max_len) pick = EOS_ID;
            double logp = static_cast<double>(logits(b, pick)) - mx - std::log(z);
            res.logps[static_cast<size_t>(b)].push_back(logp);
            if (pick == EOS_ID) {
                done[static_cast<size_t>(b)] = 1;
            } else {
                res.ids[static_cast<size_t>(b)].push_back(pick);
            }
            chosen[static_cast<size_t>(b)] = pick;
        }
        bool all_done = true;
        for (char d : done) all_done = all_done && d;
        if (all_done) break;
        x = t.rows(use(P.token_emb), chosen);
    }
    return res;
}

struct SoftDecode {
    std::vector<Var> dists;         // per step [B x V] softmax distributions
    std::vector<Tensor> step_masks; // per step [B x 1]
    std::vector<int> lengths;       // emitted tokens per example (EOS excluded)
};

// Differentiable free-running decode: each step's softmax distribution is
// fed back as an embedding mixture, so gradients reach the generator
// through every step. Termination is by argmax EOS (or fixed_len when
// given, which keeps the unrolled graph length constant for checks).
inline SoftDecode soft_decode_batch(Tape& t, const EncodedBatch& enc,
                                    const std::vector<StyleVector>& styles, GeneratorParams& P,
                                    int max_len, int fixed_len = -1, bool train = false,
                                    Rng* rng = nullptr) {
    require(max_len >= 1, "soft_decode: max_len >= 1");
    ParamUse use{t, true};
    int batch = enc.batch;
    SoftDecode res;
    res.lengths.assign(static_cast<size_t>(batch), 0);
    std::vector<char> done(static_cast<size_t>(batch), 0);

    Var h = genops::initial_hidden(t, enc, P, use);
    Var x = t.add(t.rows(use(P.token_emb), std::vector<int>(static_cast<size_t>(batch), BOS_ID)),
                  genops::style_sum(t, styles, P, use));
    if (train && P.cfg.dropout > 0 && rng) x = t.dropout(x, P.cfg.dropout, *rng);

    int limit = fixed_len > 0 ? fixed_len : max_len;
    for (int step = 0; step < limit; ++step) {
        Tensor step_mask({batch, 1});
        for (int b = 0; b < batch; ++b) step_mask(b, 0) = done[static_cast<size_t>(b)] ? 0 : 1;
        auto out = genops::decoder_step(t, x, h, enc, P, step_mask, train, rng, use);
        h = out.hidden;
        Var p = t.softmax_rows(out.logits);
        res.dists.push_back(p);
        res.step_masks.push_back(step_mask);
        const Tensor& pv = t.val(p);
        if (fixed_len <= 0) {
            for (int b = 0; b < batch; ++b) {
                if (done[static_cast<size_t>(b)]) continue;
                int arg = EOS_ID;  // PAD and BOS never terminate or count
                for (int j = 0; j < pv.cols(); ++j)
                    if (j != PAD_ID && j != BOS_ID && pv(b, j) > pv(b, arg)) arg = j;
                if (arg == EOS_ID) done[static_cast<size_t>(b)] = 1;
                else res.lengths[static_cast<size_t>(b)] += 1;
            }
            bool all_done = true;
            for (char d : done) all_done = all_done && d;
            if (all_done) break;
        } else {
            for (int b = 0; b < batch; ++b) res.lengths[static_cast<size_t>(b)] += 1;
        }
        x = t.matmul(p, use(P.token_emb));
        if (train && P.cfg.dropout > 0 && rng) x = t.dropout(x, P.cfg.dropout, *rng);
    }
    return res;
}

// Tiles an encoded batch n times along the row axis (copy-major layout:
// row r = copy * batch + b); used to score several candidates per example
// in one teacher-forced pass.
inline EncodedBatch tile_encoded(Tape& t, const EncodedBatch& enc, int n) {
    require(n >= 1, "tile_encoded: n >= 1");
    EncodedBatch out;
    out.batch = enc.batch * n;
    for (Var lat : enc.latent) out.latent.push_back(t.tile_rows(lat, n));
    out.pooled_mean = t.tile_rows(enc.pooled_mean, n);
    int t_lat = enc.latent_mask.cols();
    out.latent_mask = Tensor({out.batch, t_lat});
    out.latent_len.resize(static_cast<size_t>(out.batch));
    for (int copy = 0; copy < n; ++copy)
        for (int b = 0; b < enc.batch; ++b) {
            int r = copy * enc.batch + b;
            out.latent_len[static_cast<size_t>(r)] = enc.latent_len[static_cast<size_t>(b)];
            for (int j = 0; j < t_lat; ++j) out.latent_mask(r, j) = enc.latent_mask(b, j);
        }
    return out;
}

// ---- single-sequence operations ----

using LatentSeq = std::vector<Tensor>;  // each [1 x 2H]

inline LatentSeq encode(const std::vector<int>& ids, GeneratorParams& P) {
    Tape t;
    EncodedBatch enc = encode_batch(t, {ids}, P, false, nullptr, false);
    LatentSeq out;
    for (Var v : enc.latent) out.push_back(t.val(v));
    return out;
}

namespace genops {
// Rebuilds an EncodedBatch for an externally held latent sequence.
inline EncodedBatch latent_to_batch(Tape& t, const LatentSeq& latent) {
    require(!latent.empty(), "decode: empty latent");
    EncodedBatch enc;
    enc.batch = 1;
    int t_lat = static_cast<int>(latent.size());
    enc.latent_mask = Tensor({1, t_lat}, 1);
    enc.latent_len = {t_lat};
    Var acc = -1;
    for (const Tensor& step : latent) {
        Var v = t.constant(step);
        enc.latent.push_back(v);
        acc = (acc < 0) ? v : t.add(acc, v);
    }
    enc.pooled_mean = t.scale(acc, static_cast<real>(1.0 / t_lat));
    return enc;
}
}  // namespace genops

struct SingleDecode {
    std::vector<int> ids;
    std::vector<double> logps;
};

inline SingleDecode decode(const LatentSeq& latent, const StyleVector& style, GeneratorParams& P,
                           DecodeMode mode, int max_len, double temperature = 1.0,
                           uint64_t seed = 0) {
    Tape t;
    EncodedBatch enc = genops::latent_to_batch(t, latent);
    Rng rng(seed);
    DecodeResult res = decode_batch(t, enc, {style}, P, mode, max_len, temperature, &rng);
    return {res.ids[0], res.logps[0]};
}

// Teacher-forced decode: returns the target ids with the per-step log
// probability of each target token (EOS appended).
inline SingleDecode decode_teacher_forced(const LatentSeq& latent, const StyleVector& style,
                                          const std::vector<int>& target, GeneratorParams& P) {
    require(!target.empty(), "decode: empty teacher-forcing target");
    Tape t;
    EncodedBatch enc = genops::latent_to_batch(t, latent);
    ParamUse use{t, false};
    SingleDecode res;
    res.ids = target;
    Var h = genops::initial_hidden(t, enc, P, use);
    Var x = t.add(t.rows(use(P.token_emb), {BOS_ID}), genops::style_sum(t, {style}, P, use));
    Tensor mask({1, 1}, 1);
    for (size_t step = 0; step <= target.size(); ++step) {
        int tok = step < target.size() ? target[step] : EOS_ID;
        require(tok != PAD_ID, "sequence_log_prob: target contains PAD");
        auto out = genops::decoder_step(t, x, h, enc, P, mask, false, nullptr, use);
        h = out.hidden;
        Var logp = t.pick(t.log_softmax_rows(out.logits), {tok});
        res.logps.push_back(t.val(logp)(0, 0));
        if (step < target.size()) x = t.rows(use(P.token_emb), {tok});
    }
    return res;
}

// Teacher-forced total log-probability of the target (EOS included); <= 0.
inline double sequence_log_prob(const std::vector<int>& target, const LatentSeq& latent,
                                const StyleVector& style, GeneratorParams& P) {
    Tape t;
    EncodedBatch enc = genops::latent_to_batch(t, latent);
    Var nll = sequence_nll_batch(t, enc, {style}, {target}, P, false, nullptr, false);
    return -t.val(nll)(0, 0);
}

// Global mean-pool over the latent sequence.
inline Tensor pooled_content(const LatentSeq& latent) {
    require(!latent.empty(), "pooled_content: empty latent");
    Tensor acc = latent[0];
    for (size_t i = 1; i < latent.size(); ++i) axpy(1, latent[i], acc);
    for (int64_t i = 0; i < acc.numel(); ++i) acc.at(i) /= static_cast<real>(latent.size());
    return acc;
}

inline double content_mse(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw ContractError("content_mse: shape mismatch");
    double s = 0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        double d = a.at(i) - b.at(i);
        s += d * d;
    }
    return s / static_cast<double>(a.numel());
}

}  // namespace stylelab
