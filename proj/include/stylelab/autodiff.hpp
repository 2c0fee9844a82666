#pragma once

#include <cmath>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylelab/tensor.hpp"

namespace stylelab {

// A trainable tensor. Gradients accumulate into `grad` when a Tape that
// references the parameter runs backward().
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;

    Param() = default;
    Param(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

    void zero_grad() { grad.fill(0); }
};

using Var = int32_t;

// Reverse-mode gradient tape over dense tensors. Nodes are recorded in
// evaluation order, so reverse iteration is a reverse topological order.
// Tensors passed to input() are referenced, not copied, and must outlive
// the tape. Backward closures are only recorded when an argument requires
// a gradient, which makes inference through the tape cheap.
class Tape {
public:
    const Tensor& val(Var v) const {
        const Node& n = nodes_[static_cast<size_t>(v)];
        return n.external ? *n.external : n.owned;
    }

    bool needs_grad(Var v) const { return nodes_[static_cast<size_t>(v)].requires_grad; }

    Tensor& grad(Var v) {
        Node& n = nodes_[static_cast<size_t>(v)];
        if (!n.grad_ready) {
            n.grad = Tensor(val(v).shape());
            n.grad_ready = true;
        }
        return n.grad;
    }

    bool grad_ready(Var v) const { return nodes_[static_cast<size_t>(v)].grad_ready; }

    size_t size() const { return nodes_.size(); }

    Var param(Param& p) {
        auto it = param_ids_.find(&p);
        if (it != param_ids_.end()) return it->second;
        Node n;
        n.external = &p.value;
        n.param = &p;
        n.requires_grad = true;
        Var id = push(std::move(n));
        param_ids_.emplace(&p, id);
        return id;
    }

    // Non-trainable external tensor; caller keeps it alive.
    Var input(const Tensor& t) {
        Node n;
        n.external = &t;
        return push(std::move(n));
    }

    Var constant(Tensor t) {
        Node n;
        n.owned = std::move(t);
        return push(std::move(n));
    }

    // ---- elementwise ----

    Var add(Var a, Var b) {
        check_same(a, b, "add");
        Tensor out = val(a);
        axpy(1, val(b), out);
        return unary_binary(std::move(out), a, b, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            if (needs_grad(a2)) axpy(1, g, grad(a2));
            if (needs_grad(b2)) axpy(1, g, grad(b2));
        });
    }

    Var sub(Var a, Var b) {
        check_same(a, b, "sub");
        Tensor out = val(a);
        axpy(-1, val(b), out);
        return unary_binary(std::move(out), a, b, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            if (needs_grad(a2)) axpy(1, g, grad(a2));
            if (needs_grad(b2)) axpy(-1, g, grad(b2));
        });
    }

    Var mul(Var a, Var b) {
        check_same(a, b, "mul");
        const Tensor& ta = val(a);
        const Tensor& tb = val(b);
        Tensor out(ta.shape());
        for (int64_t i = 0; i < ta.numel(); ++i) out.at(i) = ta.at(i) * tb.at(i);
        return unary_binary(std::move(out), a, b, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            if (needs_grad(a2)) {
                Tensor& ga = grad(a2);
                const Tensor& vb = val(b2);
                for (int64_t i = 0; i < g.numel(); ++i) ga.at(i) += g.at(i) * vb.at(i);
            }
            if (needs_grad(b2)) {
                Tensor& gb = grad(b2);
                const Tensor& va = val(a2);
                for (int64_t i = 0; i < g.numel(); ++i) gb.at(i) += g.at(i) * va.at(i);
            }
        });
    }

    // k*a + c
    Var affine(Var a, real k, real c) {
        const Tensor& ta = val(a);
        Tensor out(ta.shape());
        for (int64_t i = 0; i < ta.numel(); ++i) out.at(i) = k * ta.at(i) + c;
        return unary(std::move(out), a, [this, k](Var a2, Var o) {
            axpy(k, grad(o), grad(a2));
        });
    }

    Var scale(Var a, real k) { return affine(a, k, 0); }

    Var sigmoid(Var a) {
        const Tensor& ta = val(a);
        Tensor out(ta.shape());
        for (int64_t i = 0; i < ta.numel(); ++i) {
            double x = ta.at(i);
            out.at(i) = static_cast<real>(x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                                                 : std::exp(x) / (1.0 + std::exp(x)));
        }
        return unary(std::move(out), a, [this](Var a2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& y = val(o);
            Tensor& ga = grad(a2);
            for (int64_t i = 0; i < g.numel(); ++i) {
                double s = y.at(i);
                ga.at(i) += g.at(i) * s * (1.0 - s);
            }
        });
    }

    Var tanh(Var a) {
        const Tensor& ta = val(a);
        Tensor out(ta.shape());
        for (int64_t i = 0; i < ta.numel(); ++i) out.at(i) = static_cast<real>(std::tanh(ta.at(i)));
        return unary(std::move(out), a, [this](Var a2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& y = val(o);
            Tensor& ga = grad(a2);
            for (int64_t i = 0; i < g.numel(); ++i) {
                double t = y.at(i);
                ga.at(i) += g.at(i) * (1.0 - t * t);
            }
        });
    }

    // Elementwise max; ties resolved toward the first argument.
    Var max2(Var a, Var b) {
        check_same(a, b, "max2");
        const Tensor& ta = val(a);
        const Tensor& tb = val(b);
        Tensor out(ta.shape());
        for (int64_t i = 0; i < ta.numel(); ++i) out.at(i) = std::max(ta.at(i), tb.at(i));
        return unary_binary(std::move(out), a, b, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& va = val(a2);
            const Tensor& vb = val(b2);
            if (needs_grad(a2)) {
                Tensor& ga = grad(a2);
                for (int64_t i = 0; i < g.numel(); ++i)
                    if (va.at(i) >= vb.at(i)) ga.at(i) += g.at(i);
            }
            if (needs_grad(b2)) {
                Tensor& gb = grad(b2);
                for (int64_t i = 0; i < g.numel(); ++i)
                    if (va.at(i) < vb.at(i)) gb.at(i) += g.at(i);
            }
        });
    }

    // ---- matrix / structure ----

    Var matmul(Var a, Var b) {
        Tensor out;
        matmul_into(val(a), val(b), out);
        return unary_binary(std::move(out), a, b, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            if (needs_grad(a2)) matmul_tB_into(g, val(b2), grad(a2), true);
            if (needs_grad(b2)) matmul_tA_into(val(a2), g, grad(b2), true);
        });
    }

    // a: [m x n], bias: [1 x n] broadcast over rows.
    Var add_rowvec(Var a, Var bias) {
        const Tensor& ta = val(a);
        const Tensor& tb = val(bias);
        if (tb.rows() != 1 || tb.cols() != ta.cols()) throw ShapeError("add_rowvec: bias must be [1 x cols]");
        Tensor out = ta;
        int m = ta.rows(), n = ta.cols();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) out(i, j) += tb(0, j);
        return unary_binary(std::move(out), a, bias, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            if (needs_grad(a2)) axpy(1, g, grad(a2));
            if (needs_grad(b2)) {
                Tensor& gb = grad(b2);
                int m = g.rows(), n = g.cols();
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) gb(0, j) += g(i, j);
            }
        });
    }

    // a: [m x n], c: [m x 1] broadcast over columns.
    Var mul_colvec(Var a, Var c) {
        const Tensor& ta = val(a);
        const Tensor& tc = val(c);
        if (tc.rows() != ta.rows() || tc.cols() != 1) throw ShapeError("mul_colvec: need [rows x 1]");
        int m = ta.rows(), n = ta.cols();
        Tensor out(ta.shape());
        for (int i = 0; i < m; ++i) {
            real w = tc(i, 0);
            for (int j = 0; j < n; ++j) out(i, j) = ta(i, j) * w;
        }
        return unary_binary(std::move(out), a, c, [this](Var a2, Var c2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& ta2 = val(a2);
            const Tensor& tc2 = val(c2);
            int m = g.rows(), n = g.cols();
            if (needs_grad(a2)) {
                Tensor& ga = grad(a2);
                for (int i = 0; i < m; ++i) {
                    real w = tc2(i, 0);
                    for (int j = 0; j < n; ++j) ga(i, j) += g(i, j) * w;
                }
            }
            if (needs_grad(c2)) {
                Tensor& gc = grad(c2);
                for (int i = 0; i < m; ++i) {
                    real acc = 0;
                    for (int j = 0; j < n; ++j) acc += g(i, j) * ta2(i, j);
                    gc(i, 0) += acc;
                }
            }
        });
    }

    // out[i,:] = keep ? a[i,:] : fill, where keep = (mask != 0) xor invert.
    // Mask is [m x 1] or [m x n] and is treated as a constant.
    Var where_mask(Var a, const Tensor& mask, real fill, bool invert = false) {
        const Tensor& ta = val(a);
        int m = ta.rows(), n = ta.cols();
        bool colmask = (mask.cols() == 1);
        if (mask.rows() != m || (!colmask && mask.cols() != n))
            throw ShapeError("where_mask: mask must be [m x 1] or [m x n]");
        Tensor out(ta.shape());
        Tensor keep = mask;  // copied so the closure owns it
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                bool pass = ((colmask ? keep(i, 0) : keep(i, j)) != 0) != invert;
                out(i, j) = pass ? ta(i, j) : fill;
            }
        Var o = next_id();
        bool rg = needs_grad(a);
        Node node;
        node.owned = std::move(out);
        node.requires_grad = rg;
        if (rg) {
            node.back = [this, a, o, keep = std::move(keep), colmask, invert]() {
                const Tensor& g = grad(o);
                Tensor& ga = grad(a);
                int m2 = g.rows(), n2 = g.cols();
                for (int i = 0; i < m2; ++i)
                    for (int j = 0; j < n2; ++j) {
                        bool pass = ((colmask ? keep(i, 0) : keep(i, j)) != 0) != invert;
                        if (pass) ga(i, j) += g(i, j);
                    }
            };
        }
        return push(std::move(node));
    }

    Var mul_mask(Var a, const Tensor& mask) { return where_mask(a, mask, 0); }

    // Gather rows of a [R x n] table; ids may repeat (gradients accumulate).
    Var rows(Var table, std::vector<int> ids) {
        const Tensor& tt = val(table);
        int n = tt.cols();
        int m = static_cast<int>(ids.size());
        require(m > 0, "rows: empty id list");
        for (int id : ids)
            if (id < 0 || id >= tt.rows()) throw IndexError("rows: id out of range");
        Tensor out({m, n});
        for (int i = 0; i < m; ++i) {
            const real* src = tt.data() + static_cast<size_t>(ids[static_cast<size_t>(i)]) * n;
            real* dst = out.data() + static_cast<size_t>(i) * n;
            std::copy(src, src + n, dst);
        }
        Var o = next_id();
        bool rg = needs_grad(table);
        Node node;
        node.owned = std::move(out);
        node.requires_grad = rg;
        if (rg) {
            node.back = [this, table, o, ids = std::move(ids)]() {
                const Tensor& g = grad(o);
                Tensor& gt = grad(table);
                int n2 = g.cols();
                for (int i = 0; i < g.rows(); ++i) {
                    const real* src = g.data() + static_cast<size_t>(i) * n2;
                    real* dst = gt.data() + static_cast<size_t>(ids[static_cast<size_t>(i)]) * n2;
                    for (int j = 0; j < n2; ++j) dst[j] += src[j];
                }
            };
        }
        return push(std::move(node));
    }

    Var concat_cols(Var a, Var b) {
        const Tensor& ta = val(a);
        const Tensor& tb = val(b);
        if (ta.rows() != tb.rows()) throw ShapeError("concat_cols: row mismatch");
        int m = ta.rows(), na = ta.cols(), nb = tb.cols();
        Tensor out({m, na + nb});
        for (int i = 0; i < m; ++i) {
            std::copy(ta.data() + static_cast<size_t>(i) * na, ta.data() + static_cast<size_t>(i + 1) * na,
                      out.data() + static_cast<size_t>(i) * (na + nb));
            std::copy(tb.data() + static_cast<size_t>(i) * nb, tb.data() + static_cast<size_t>(i + 1) * nb,
                      out.data() + static_cast<size_t>(i) * (na + nb) + na);
        }
        return unary_binary(std::move(out), a, b, [this, na, nb](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            int m2 = g.rows();
            if (needs_grad(a2)) {
                Tensor& ga = grad(a2);
                for (int i = 0; i < m2; ++i)
                    for (int j = 0; j < na; ++j) ga(i, j) += g(i, j);
            }
            if (needs_grad(b2)) {
                Tensor& gb = grad(b2);
                for (int i = 0; i < m2; ++i)
                    for (int j = 0; j < nb; ++j) gb(i, j) += g(i, j + na);
            }
        });
    }

    Var slice_cols(Var a, int c0, int c1) {
        const Tensor& ta = val(a);
        require(0 <= c0 && c0 < c1 && c1 <= ta.cols(), "slice_cols: bad range");
        int m = ta.rows(), n = c1 - c0;
        Tensor out({m, n});
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) out(i, j) = ta(i, c0 + j);
        return unary(std::move(out), a, [this, c0, n](Var a2, Var o) {
            const Tensor& g = grad(o);
            Tensor& ga = grad(a2);
            for (int i = 0; i < g.rows(); ++i)
                for (int j = 0; j < n; ++j) ga(i, c0 + j) += g(i, j);
        });
    }

    Var slice_rows(Var a, int r0, int r1) {
        const Tensor& ta = val(a);
        require(0 <= r0 && r0 < r1 && r1 <= ta.rows(), "slice_rows: bad range");
        int n = ta.cols(), m = r1 - r0;
        Tensor out({m, n});
        std::copy(ta.data() + static_cast<size_t>(r0) * n, ta.data() + static_cast<size_t>(r1) * n, out.data());
        return unary(std::move(out), a, [this, r0, m, n](Var a2, Var o) {
            const Tensor& g = grad(o);
            Tensor& ga = grad(a2);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) ga(r0 + i, j) += g(i, j);
        });
    }

    // [m x n] -> [m*k x n], k stacked copies.
    Var tile_rows(Var a, int k) {
        require(k >= 1, "tile_rows: k >= 1");
        const Tensor& ta = val(a);
        int m = ta.rows(), n = ta.cols();
        Tensor out({m * k, n});
        for (int r = 0; r < k; ++r)
            std::copy(ta.data(), ta.data() + static_cast<size_t>(m) * n,
                      out.data() + static_cast<size_t>(r) * m * n);
        return unary(std::move(out), a, [this, k, m, n](Var a2, Var o) {
            const Tensor& g = grad(o);
            Tensor& ga = grad(a2);
            for (int r = 0; r < k; ++r) {
                const real* src = g.data() + static_cast<size_t>(r) * m * n;
                real* dst = ga.data();
                for (int64_t i = 0; i < static_cast<int64_t>(m) * n; ++i) dst[i] += src[i];
            }
        });
    }

    // Per-row dot product -> [m x 1].
    Var row_dot(Var a, Var b) {
        check_same(a, b, "row_dot");
        const Tensor& ta = val(a);
        const Tensor& tb = val(b);
        int m = ta.rows(), n = ta.cols();
        Tensor out({m, 1});
        for (int i = 0; i < m; ++i) {
            real acc = 0;
            for (int j = 0; j < n; ++j) acc += ta(i, j) * tb(i, j);
            out(i, 0) = acc;
        }
        return unary_binary(std::move(out), a, b, [this](Var a2, Var b2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& va = val(a2);
            const Tensor& vb = val(b2);
            int m2 = va.rows(), n2 = va.cols();
            if (needs_grad(a2)) {
                Tensor& ga = grad(a2);
                for (int i = 0; i < m2; ++i)
                    for (int j = 0; j < n2; ++j) ga(i, j) += g(i, 0) * vb(i, j);
            }
            if (needs_grad(b2)) {
                Tensor& gb = grad(b2);
                for (int i = 0; i < m2; ++i)
                    for (int j = 0; j < n2; ++j) gb(i, j) += g(i, 0) * va(i, j);
            }
        });
    }

    // ---- softmax family ----

    Var softmax_rows(Var a) {
        const Tensor& ta = val(a);
        if (ta.cols() < 1) throw ShapeError("softmax_rows: empty rows");
        int m = ta.rows(), n = ta.cols();
        Tensor out(ta.shape());
        for (int i = 0; i < m; ++i) {
            real mx = ta(i, 0);
            for (int j = 1; j < n; ++j) mx = std::max(mx, ta(i, j));
            double z = 0;
            for (int j = 0; j < n; ++j) {
                double e = std::exp(static_cast<double>(ta(i, j) - mx));
                out(i, j) = static_cast<real>(e);
                z += e;
            }
            for (int j = 0; j < n; ++j) out(i, j) = static_cast<real>(out(i, j) / z);
        }
        return unary(std::move(out), a, [this](Var a2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& y = val(o);
            Tensor& ga = grad(a2);
            int m2 = g.rows(), n2 = g.cols();
            for (int i = 0; i < m2; ++i) {
                double dot = 0;
                for (int j = 0; j < n2; ++j) dot += g(i, j) * y(i, j);
                for (int j = 0; j < n2; ++j) ga(i, j) += y(i, j) * (g(i, j) - static_cast<real>(dot));
            }
        });
    }

    Var log_softmax_rows(Var a) {
        const Tensor& ta = val(a);
        if (ta.cols() < 1) throw ShapeError("log_softmax_rows: empty rows");
        int m = ta.rows(), n = ta.cols();
        Tensor out(ta.shape());
        for (int i = 0; i < m; ++i) {
            real mx = ta(i, 0);
            for (int j = 1; j < n; ++j) mx = std::max(mx, ta(i, j));
            double z = 0;
            for (int j = 0; j < n; ++j) z += std::exp(static_cast<double>(ta(i, j) - mx));
            double lz = std::log(z) + mx;
            for (int j = 0; j < n; ++j) out(i, j) = static_cast<real>(ta(i, j) - lz);
        }
        return unary(std::move(out), a, [this](Var a2, Var o) {
            const Tensor& g = grad(o);
            const Tensor& ly = val(o);
            Tensor& ga = grad(a2);
            int m2 = g.rows(), n2 = g.cols();
            for (int i = 0; i < m2; ++i) {
                double gsum = 0;
                for (int j = 0; j < n2; ++j) gsum += g(i, j);
                for (int j = 0; j < n2; ++j)
                    ga(i, j) += g(i, j) - static_cast<real>(gsum * std::exp(static_cast<double>(ly(i, j))));
            }
        });
    }

    // out[i] = a[i, cols[i]] -> [m x 1]
    Var pick(Var a, std::vector<int> colsel) {
        const Tensor& ta = val(a);
        int m = ta.rows();
        require(static_cast<int>(colsel.size()) == m, "pick: selector length != rows");
        for (int c : colsel)
            if (c < 0 || c >= ta.cols()) throw IndexError("pick: column out of range");
        Tensor out({m, 1});
        for (int i = 0; i < m; ++i) out(i, 0) = ta(i, colsel[static_cast<size_t>(i)]);
        Var o = next_id();
        bool rg = needs_grad(a);
        Node node;
        node.owned = std::move(out);
        node.requires_grad = rg;
        if (rg) {
            node.back = [this, a, o, colsel = std::move(colsel)]() {
                const Tensor& g = grad(o);
                Tensor& ga = grad(a);
                for (int i = 0; i < g.rows(); ++i) ga(i, colsel[static_cast<size_t>(i)]) += g(i, 0);
            };
        }
        return push(std::move(node));
    }

    // ---- reductions ----

    Var sum_all(Var a) {
        Tensor out({1, 1});
        out(0, 0) = static_cast<real>(sum(val(a)));
        return unary(std::move(out), a, [this](Var a2, Var o) {
            real g = grad(o)(0, 0);
            Tensor& ga = grad(a2);
            for (int64_t i = 0; i < ga.numel(); ++i) ga.at(i) += g;
        });
    }

    Var mean_all(Var a) {
        int64_t n = val(a).numel();
        return scale(sum_all(a), static_cast<real>(1.0 / static_cast<double>(n)));
    }

    // Inverted dropout; identity when rate == 0. The mask is sampled from
    // the supplied rng, so the caller controls reproducibility.
    Var dropout(Var a, double rate, Rng& rng) {
        require(rate >= 0 && rate < 1, "dropout: rate in [0,1)");
        if (rate == 0) return a;
        const Tensor& ta = val(a);
        Tensor mask(ta.shape());
        real keep_scale = static_cast<real>(1.0 / (1.0 - rate));
        for (int64_t i = 0; i < mask.numel(); ++i)
            mask.at(i) = (rng.uniform() >= rate) ? keep_scale : 0;
        return mul_mask_full(a, std::move(mask));
    }

    // Escape hatch for fused ops with hand-written backward passes. The
    // closure receives the output Var; it must accumulate into grad(input)
    // for every input that needs_grad.
    Var custom(Tensor value, bool requires_grad, std::function<void(Var)> back) {
        Var o = next_id();
        Node node;
        node.owned = std::move(value);
        node.requires_grad = requires_grad;
        if (requires_grad && back)
            node.back = [back = std::move(back), o]() { back(o); };
        return push(std::move(node));
    }

    void backward(Var loss) {
        const Tensor& lv = val(loss);
        if (lv.numel() != 1) throw ContractError("backward: loss must be scalar");
        grad(loss)(0, 0) = 1;
        for (int32_t i = static_cast<int32_t>(nodes_.size()) - 1; i >= 0; --i) {
            Node& n = nodes_[static_cast<size_t>(i)];
            if (n.requires_grad && n.grad_ready && n.back) n.back();
        }
        // flush leaf gradients into their parameters
        for (auto& [p, id] : param_ids_) {
            Node& n = nodes_[static_cast<size_t>(id)];
            if (n.grad_ready) axpy(1, n.grad, p->grad);
        }
    }

private:
    struct Node {
        Tensor owned;
        const Tensor* external = nullptr;
        Tensor grad;
        std::function<void()> back;
        Param* param = nullptr;
        bool requires_grad = false;
        bool grad_ready = false;
    };

    std::vector<Node> nodes_;
    std::unordered_map<Param*, Var> param_ids_;

    Var next_id() const { return static_cast<Var>(nodes_.size()); }

    Var push(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<Var>(nodes_.size() - 1);
    }

    void check_same(Var a, Var b, const char* op) {
        if (!val(a).same_shape(val(b))) throw ShapeError(std::string(op) + ": shape mismatch");
    }

    Var mul_mask_full(Var a, Tensor mask) {
        const Tensor& ta = val(a);
        Tensor out(ta.shape());
        for (int64_t i = 0; i < ta.numel(); ++i) out.at(i) = ta.at(i) * mask.at(i);
        Var o = next_id();
        bool rg = needs_grad(a);
        Node node;
        node.owned = std::move(out);
        node.requires_grad = rg;
        if (rg) {
            node.back = [this, a, o, mask = std::move(mask)]() {
                const Tensor& g = grad(o);
                Tensor& ga = grad(a);
                for (int64_t i = 0; i < g.numel(); ++i) ga.at(i) += g.at(i) * mask.at(i);
            };
        }
        return push(std::move(node));
    }

    template <class F>
    Var unary(Tensor out, Var a, F f) {
        Var o = next_id();
        bool rg = needs_grad(a);
        Node node;
        node.owned = std::move(out);
        node.requires_grad = rg;
        if (rg) node.back = [f, a, o]() mutable { f(a, o); };
        return push(std::move(node));
    }

    template <class F>
    Var unary_binary(Tensor out, Var a, Var b, F f) {
        Var o = next_id();
        bool rg = needs_grad(a) || needs_grad(b);
        Node node;
        node.owned = std::move(out);
        node.requires_grad = rg;
        if (rg) node.back = [f, a, b, o]() mutable { f(a, b, o); };
        return push(std::move(node));
    }
};

// -log softmax(logits)[target] for a single logit row.
inline Var softmax_cross_entropy(Tape& t, Var logits, int target) {
    const Tensor& lv = t.val(logits);
    if (lv.rank() != 2 || lv.rows() != 1) throw ShapeError("softmax_cross_entropy: expect [1 x n] logits");
    if (lv.cols() < 2) throw ShapeError("softmax_cross_entropy: need at least 2 classes");
    if (target < 0 || target >= lv.cols()) throw IndexError("softmax_cross_entropy: target out of range");
    return t.scale(t.pick(t.log_softmax_rows(logits), {target}), -1);
}

inline double softmax_cross_entropy(const Tensor& logits, int target) {
    Tape t;
    Var l = t.input(logits);
    return t.val(softmax_cross_entropy(t, l, target))(0, 0);
}

// Validates an analytic gradient against central differences.
// Returns max_i |analytic_i - fd_i| / max(1, |analytic_i|).
inline double grad_check(const std::function<double(const std::vector<double>&)>& value_fn,
                         const std::function<std::vector<double>(const std::vector<double>&)>& grad_fn,
                         const std::vector<double>& point, double eps = 1e-5) {
    require(eps >= 1e-6 && eps <= 1e-3, "grad_check: epsilon in [1e-6, 1e-3]");
    std::vector<double> analytic = grad_fn(point);
    require(analytic.size() == point.size(), "grad_check: gradient size mismatch");
    double worst = 0;
    std::vector<double> x = point;
    for (size_t i = 0; i < x.size(); ++i) {
        double orig = x[i];
        x[i] = orig + eps;
        double fp = value_fn(x);
        x[i] = orig - eps;
        double fm = value_fn(x);
        x[i] = orig;
        double fd = (fp - fm) / (2 * eps);
        double err = std::abs(analytic[i] - fd) / std::max(1.0, std::abs(analytic[i]));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace stylelab
