#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stylelab/autodiff.hpp"

namespace stylelab {

inline Tensor uniform_init(std::vector<int> shape, double scale, Rng& rng) {
    Tensor t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = static_cast<real>(rng.uniform(-scale, scale));
    return t;
}

struct GruParams {
    Param wx;  // [in x 3H], gate order: update | reset | candidate
    Param wh;  // [H x 3H]
    Param bx;  // [1 x 3H]
    Param bh;  // [1 x 3H]
    int input_dim = 0;
    int hidden_dim = 0;

    void init(const std::string& prefix, int in_dim, int hid, Rng& rng) {
        input_dim = in_dim;
        hidden_dim = hid;
        double sx = 1.0 / std::sqrt(static_cast<double>(in_dim));
        double sh = 1.0 / std::sqrt(static_cast<double>(hid));
        wx = Param(prefix + ".wx", uniform_init({in_dim, 3 * hid}, sx, rng));
        wh = Param(prefix + ".wh", uniform_init({hid, 3 * hid}, sh, rng));
        bx = Param(prefix + ".bx", Tensor({1, 3 * hid}));
        bh = Param(prefix + ".bh", Tensor({1, 3 * hid}));
    }

    std::vector<Param*> all() { return {&wx, &wh, &bx, &bh}; }
};

// Leaf selector: trainable parameters enter the tape via t.param() so
// gradients flow; frozen usage (inference, adversarial generator step)
// enters via t.input().
struct ParamUse {
    Tape& t;
    bool trainable;
    Var operator()(Param& p) const { return trainable ? t.param(p) : t.input(p.value); }
};

// Reference GRU cell composed from tape primitives; used to cross-check
// the fused implementation below.
inline Var gru_cell_reference(Tape& t, Var x, Var h, GruParams& p, const ParamUse& use) {
    int hd = p.hidden_dim;
    Var gi = t.add_rowvec(t.matmul(x, use(p.wx)), use(p.bx));
    Var gh = t.add_rowvec(t.matmul(h, use(p.wh)), use(p.bh));
    Var update = t.sigmoid(t.add(t.slice_cols(gi, 0, hd), t.slice_cols(gh, 0, hd)));
    Var reset = t.sigmoid(t.add(t.slice_cols(gi, hd, 2 * hd), t.slice_cols(gh, hd, 2 * hd)));
    Var cand = t.tanh(t.add(t.slice_cols(gi, 2 * hd, 3 * hd),
                            t.mul(reset, t.slice_cols(gh, 2 * hd, 3 * hd))));
    // h' = (1-z) * cand + z * h
    return t.add(t.mul(t.affine(update, -1, 1), cand), t.mul(update, h));
}

// Fused GRU step with an optional row mask (mask 0 keeps the previous
// hidden state). One tape node; the backward pass is hand-derived, which
// keeps the recurrent core cheap.
//   z = sigmoid(x Wxz + h Whz + bz)
//   r = sigmoid(x Wxr + h Whr + br)
//   n = tanh(x Wxn + bn + r * (h Whn + bhn))
//   h' = (1 - z) * n + z * h
inline Var gru_cell_fused(Tape& t, Var x, Var h, Var wx, Var wh, Var bx, Var bh,
                          const Tensor* mask_col) {
    const Tensor& xv = t.val(x);
    const Tensor& hv = t.val(h);
    const Tensor& wxv = t.val(wx);
    const Tensor& whv = t.val(wh);
    const Tensor& bxv = t.val(bx);
    const Tensor& bhv = t.val(bh);
    int batch = xv.rows();
    int hd = hv.cols();
    if (wxv.cols() != 3 * hd || whv.rows() != hd || whv.cols() != 3 * hd)
        throw ShapeError("gru: weight shapes inconsistent");
    if (mask_col && (mask_col->rows() != batch || mask_col->cols() != 1))
        throw ShapeError("gru: mask must be [batch x 1]");

    Tensor gi, gh;
    matmul_into(xv, wxv, gi);
    matmul_into(hv, whv, gh);
    struct Saved {
        Tensor z, r, n, ghn, mask;
        bool has_mask;
    };
    auto saved = std::make_shared<Saved>();
    saved->z = Tensor({batch, hd});
    saved->r = Tensor({batch, hd});
    saved->n = Tensor({batch, hd});
    saved->ghn = Tensor({batch, hd});
    saved->has_mask = mask_col != nullptr;
    if (mask_col) saved->mask = *mask_col;

    Tensor out({batch, hd});
    for (int i = 0; i < batch; ++i) {
        bool active = !mask_col || (*mask_col)(i, 0) != 0;
        const real* gi_row = gi.data() + static_cast<size_t>(i) * 3 * hd;
        const real* gh_row = gh.data() + static_cast<size_t>(i) * 3 * hd;
        const real* h_row = hv.data() + static_cast<size_t>(i) * hd;
        real* out_row = out.data() + static_cast<size_t>(i) * hd;
        real* z_row = saved->z.data() + static_cast<size_t>(i) * hd;
        real* r_row = saved->r.data() + static_cast<size_t>(i) * hd;
        real* n_row = saved->n.data() + static_cast<size_t>(i) * hd;
        real* ghn_row = saved->ghn.data() + static_cast<size_t>(i) * hd;
        if (!active) {
            std::copy(h_row, h_row + hd, out_row);
            continue;
        }
        for (int j = 0; j < hd; ++j) {
            double az = gi_row[j] + bxv(0, j) + gh_row[j] + bhv(0, j);
            double ar = gi_row[hd + j] + bxv(0, hd + j) + gh_row[hd + j] + bhv(0, hd + j);
            double ghn = gh_row[2 * hd + j] + bhv(0, 2 * hd + j);
            double z = 1.0 / (1.0 + std::exp(-az));
            double r = 1.0 / (1.0 + std::exp(-ar));
            double n = std::tanh(gi_row[2 * hd + j] + bxv(0, 2 * hd + j) + r * ghn);
            z_row[j] = static_cast<real>(z);
            r_row[j] = static_cast<real>(r);
            n_row[j] = static_cast<real>(n);
            ghn_row[j] = static_cast<real>(ghn);
            out_row[j] = static_cast<real>((1.0 - z) * n + z * h_row[j]);
        }
    }

    bool rg = t.needs_grad(x) || t.needs_grad(h) || t.needs_grad(wx) || t.needs_grad(wh) ||
              t.needs_grad(bx) || t.needs_grad(bh);
    return t.custom(std::move(out), rg, [&t, x, h, wx, wh, saved, batch, hd,
                                         bx, bh](Var o) {
        const Tensor& g = t.grad(o);
        const Tensor& hv2 = t.val(h);
        Tensor dgi({batch, 3 * hd});
        Tensor dgh({batch, 3 * hd});
        bool need_h = t.needs_grad(h);
        Tensor* gh_acc = need_h ? &t.grad(h) : nullptr;
        for (int i = 0; i < batch; ++i) {
            bool active = !saved->has_mask || saved->mask(i, 0) != 0;
            const real* g_row = g.data() + static_cast<size_t>(i) * hd;
            real* dgi_row = dgi.data() + static_cast<size_t>(i) * 3 * hd;
            real* dgh_row = dgh.data() + static_cast<size_t>(i) * 3 * hd;
            if (!active) {
                if (gh_acc)
                    for (int j = 0; j < hd; ++j) (*gh_acc)(i, j) += g_row[j];
                continue;
            }
            const real* h_row = hv2.data() + static_cast<size_t>(i) * hd;
            const real* z_row = saved->z.data() + static_cast<size_t>(i) * hd;
            const real* r_row = saved->r.data() + static_cast<size_t>(i) * hd;
            const real* n_row = saved->n.data() + static_cast<size_t>(i) * hd;
            const real* ghn_row = saved->ghn.data() + static_cast<size_t>(i) * hd;
            for (int j = 0; j < hd; ++j) {
                double dh_out = g_row[j];
                double z = z_row[j], r = r_row[j], n = n_row[j];
                double dz = dh_out * (h_row[j] - n);
                double dn = dh_out * (1.0 - z);
                double dgn = dn * (1.0 - n * n);
                double dr = dgn * ghn_row[j];
                double daz = dz * z * (1.0 - z);
                double dar = dr * r * (1.0 - r);
                dgi_row[j] = static_cast<real>(daz);
                dgi_row[hd + j] = static_cast<real>(dar);
                dgi_row[2 * hd + j] = static_cast<real>(dgn);
                dgh_row[j] = static_cast<real>(daz);
                dgh_row[hd + j] = static_cast<real>(dar);
                dgh_row[2 * hd + j] = static_cast<real>(dgn * r);
                if (gh_acc) (*gh_acc)(i, j) += dh_out * z;
            }
        }
        if (t.needs_grad(x)) matmul_tB_into(dgi, t.val(wx), t.grad(x), true);
        if (t.needs_grad(wx)) matmul_tA_into(t.val(x), dgi, t.grad(wx), true);
        if (gh_acc) matmul_tB_into(dgh, t.val(wh), *gh_acc, true);
        if (t.needs_grad(wh)) matmul_tA_into(hv2, dgh, t.grad(wh), true);
        if (t.needs_grad(bx)) {
            Tensor& gb = t.grad(bx);
            for (int i = 0; i < batch; ++i)
                for (int j = 0; j < 3 * hd; ++j) gb(0, j) += dgi(i, j);
        }
        if (t.needs_grad(bh)) {
            Tensor& gb = t.grad(bh);
            for (int i = 0; i < batch; ++i)
                for (int j = 0; j < 3 * hd; ++j) gb(0, j) += dgh(i, j);
        }
    });
}

inline Var gru_cell(Tape& t, Var x, Var h, GruParams& p, const ParamUse& use) {
    return gru_cell_fused(t, x, h, use(p.wx), use(p.wh), use(p.bx), use(p.bh), nullptr);
}

inline Var gru_cell(Tape& t, Var x, Var h, GruParams& p) {
    return gru_cell(t, x, h, p, ParamUse{t, true});
}

// Rows with mask 0 keep their previous hidden state.
inline Var gru_cell_masked(Tape& t, Var x, Var h, GruParams& p, const Tensor& mask_col,
                           const ParamUse& use) {
    return gru_cell_fused(t, x, h, use(p.wx), use(p.wh), use(p.bx), use(p.bh), &mask_col);
}

// Non-overlapping temporal max-pool over a sequence of [B x d] steps.
// Returns ceil(T / window) pooled steps; the final partial window is pooled
// as-is. Padded positions must already carry -inf-like values if they are
// to be excluded.
inline std::vector<Var> max_pool_time(Tape& t, const std::vector<Var>& seq, int window) {
    require(window >= 1, "max_pool_time: window >= 1");
    require(!seq.empty(), "max_pool_time: empty sequence");
    std::vector<Var> out;
    for (size_t start = 0; start < seq.size(); start += static_cast<size_t>(window)) {
        Var acc = seq[start];
        size_t end = std::min(seq.size(), start + static_cast<size_t>(window));
        for (size_t i = start + 1; i < end; ++i) acc = t.max2(acc, seq[i]);
        out.push_back(acc);
    }
    return out;
}

}  // namespace stylelab
