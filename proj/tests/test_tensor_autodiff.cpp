#include <doctest.h>

#include <cmath>

#include "stylelab/autodiff.hpp"
#include "stylelab/nn.hpp"
#include "support/gradcheck_util.hpp"

using namespace stylelab;
using stylelab::testutil::tape_grad_check;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double scale = 1.0) {
    Tensor t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = static_cast<real>(rng.normal() * scale);
    return t;
}

}  // namespace

TEST_CASE("tensor shape bookkeeping") {
    Tensor t({2, 3}, 1.5);
    CHECK(t.numel() == 6);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    t(1, 2) = 7;
    CHECK(t.at(5) == doctest::Approx(7));
    CHECK_THROWS_AS(Tensor({0, 3}), ContractError);
    CHECK_THROWS_AS(Tensor(std::vector<int>{}), ContractError);
    CHECK_THROWS_AS(Tensor::from({2, 2}, {1, 2, 3}), ShapeError);
}

TEST_CASE("matmul kernels agree with naive triple loop") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        int m = 1 + static_cast<int>(rng.below(6));
        int k = 1 + static_cast<int>(rng.below(6));
        int n = 1 + static_cast<int>(rng.below(6));
        Tensor a = random_tensor({m, k}, rng);
        Tensor b = random_tensor({k, n}, rng);
        Tensor c = matmul(a, b);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0;
                for (int l = 0; l < k; ++l) acc += a(i, l) * b(l, j);
                CHECK(c(i, j) == doctest::Approx(acc).epsilon(1e-12));
            }
        // A^T B route
        Tensor at({k, m});
        for (int i = 0; i < m; ++i)
            for (int l = 0; l < k; ++l) at(l, i) = a(i, l);
        Tensor c2;
        matmul_tA_into(at, b, c2);
        for (int64_t i = 0; i < c.numel(); ++i) CHECK(c2.at(i) == doctest::Approx(c.at(i)).epsilon(1e-12));
        // A B^T route
        Tensor bt({n, k});
        for (int l = 0; l < k; ++l)
            for (int j = 0; j < n; ++j) bt(j, l) = b(l, j);
        Tensor c3;
        matmul_tB_into(a, bt, c3);
        for (int64_t i = 0; i < c.numel(); ++i) CHECK(c3.at(i) == doctest::Approx(c.at(i)).epsilon(1e-12));
    }
}

TEST_CASE("softmax_cross_entropy reference values") {
    CHECK(softmax_cross_entropy(Tensor::row({0, 0}), 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(softmax_cross_entropy(Tensor::row({1, 1, 1}), 2) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // oracle: direct evaluation of -log(1 / (1 + e^-20))
    double oracle = -std::log(1.0 / (1.0 + std::exp(-20.0)));
    CHECK(softmax_cross_entropy(Tensor::row({10, -10}), 0) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(softmax_cross_entropy(Tensor::row({10, -10}), 0) >= 0.0);

    CHECK_THROWS_AS(softmax_cross_entropy(Tensor::row({1, 2}), 2), IndexError);
    CHECK_THROWS_AS(softmax_cross_entropy(Tensor::row({1, 2}), -1), IndexError);
    CHECK_THROWS_AS(softmax_cross_entropy(Tensor::row({1}), 0), ShapeError);
}

TEST_CASE("grad_check on f(x) = x^2") {
    auto value = [](const std::vector<double>& x) { return x[0] * x[0]; };
    auto grad = [](const std::vector<double>& x) { return std::vector<double>{2 * x[0]}; };
    CHECK(grad(std::vector<double>{3.0})[0] == doctest::Approx(6.0));
    CHECK(grad_check(value, grad, {3.0}, 1e-5) < 1e-7);
    CHECK_THROWS_AS(grad_check(value, grad, {3.0}, 1e-8), ContractError);
    CHECK_THROWS_AS(grad_check(value, grad, {3.0}, 1e-2), ContractError);
}

TEST_CASE("every primitive passes grad_check at 20 random points") {
    Rng seeds(20250101);
    for (int point = 0; point < 20; ++point) {
        uint64_t seed = seeds.next();
        Rng rng(seed);
        Param a("a", random_tensor({3, 4}, rng));
        Param b("b", random_tensor({3, 4}, rng));
        Param w("w", random_tensor({4, 5}, rng));
        Param bias("bias", random_tensor({1, 4}, rng));
        Param col("col", random_tensor({3, 1}, rng));
        Param emb("emb", random_tensor({6, 4}, rng));
        Tensor mask({3, 1});
        mask(0, 0) = 1;
        mask(1, 0) = 0;
        mask(2, 0) = 1;
        std::vector<int> ids = {2, 0, 5};
        std::vector<int> picks = {1, 3, 0};

        auto check = [&](const char* name, std::vector<Param*> ps, std::function<Var(Tape&)> build) {
            double err = tape_grad_check(ps, build);
            INFO(name << " at point " << point);
            CHECK(err < 1e-4);
        };

        check("add+mul+affine", {&a, &b}, [&](Tape& t) {
            Var x = t.add(t.param(a), t.param(b));
            Var y = t.mul(x, t.affine(t.param(a), 0.5, -0.25));
            return t.mean_all(y);
        });
        check("sub+tanh+sigmoid", {&a, &b}, [&](Tape& t) {
            return t.mean_all(t.mul(t.tanh(t.param(a)), t.sigmoid(t.sub(t.param(a), t.param(b)))));
        });
        check("matmul+add_rowvec", {&a, &w, &bias}, [&](Tape& t) {
            return t.mean_all(t.tanh(t.matmul(t.add_rowvec(t.param(a), t.param(bias)), t.param(w))));
        });
        check("rows (embedding gather)", {&emb}, [&](Tape& t) {
            return t.mean_all(t.tanh(t.rows(t.param(emb), ids)));
        });
        check("concat+slice", {&a, &b}, [&](Tape& t) {
            Var c = t.concat_cols(t.param(a), t.param(b));
            return t.mean_all(t.mul(t.slice_cols(c, 2, 6), t.slice_cols(c, 1, 5)));
        });
        check("slice_rows+tile_rows", {&a}, [&](Tape& t) {
            Var tiles = t.tile_rows(t.param(a), 3);
            return t.mean_all(t.tanh(t.slice_rows(tiles, 2, 7)));
        });
        check("softmax_rows", {&a, &b}, [&](Tape& t) {
            Var s = t.softmax_rows(t.param(a));
            return t.mean_all(t.mul(s, t.tanh(t.param(b))));
        });
        check("log_softmax+pick", {&a}, [&](Tape& t) {
            return t.mean_all(t.pick(t.log_softmax_rows(t.param(a)), picks));
        });
        check("row_dot+mul_colvec", {&a, &b, &col}, [&](Tape& t) {
            Var d = t.row_dot(t.param(a), t.param(b));
            return t.mean_all(t.mul_colvec(t.param(b), t.sigmoid(t.add(d, t.param(col)))));
        });
        check("max2+where_mask", {&a, &b}, [&](Tape& t) {
            Var m = t.max2(t.param(a), t.param(b));
            return t.mean_all(t.where_mask(m, mask, -1.0));
        });
    }
}

TEST_CASE("gru cell passes grad_check at 20 random points") {
    Rng seeds(777);
    for (int point = 0; point < 20; ++point) {
        Rng rng(seeds.next());
        GruParams gru;
        gru.init("gru", 3, 4, rng);
        Param x("x", random_tensor({2, 3}, rng));
        Param h("h", random_tensor({2, 4}, rng));
        std::vector<Param*> ps = {&gru.wx, &gru.wh, &gru.bx, &gru.bh, &x, &h};
        double err = tape_grad_check(ps, [&](Tape& t) {
            return t.mean_all(gru_cell(t, t.param(x), t.param(h), gru));
        });
        CHECK(err < 1e-4);
    }
}

TEST_CASE("fused gru cell matches the primitive-composed reference exactly") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        GruParams gru;
        gru.init("gru", 5, 6, rng);
        Param x("x", random_tensor({3, 5}, rng));
        Param h("h", random_tensor({3, 6}, rng));
        Tensor mask({3, 1});
        mask(0, 0) = 1;
        mask(1, 0) = trial % 2;
        mask(2, 0) = 1;

        auto grads_of = [&](bool fused) {
            for (Param* p : {&gru.wx, &gru.wh, &gru.bx, &gru.bh, &x, &h}) p->zero_grad();
            Tape t;
            ParamUse use{t, true};
            Var out = fused ? gru_cell_masked(t, t.param(x), t.param(h), gru, mask, use)
                            : t.add(t.mul_mask(gru_cell_reference(t, t.param(x), t.param(h), gru, use),
                                               mask),
                                    t.where_mask(t.param(h), mask, 0, true));
            Var loss = t.mean_all(t.mul(out, t.tanh(out)));
            double v = t.val(loss)(0, 0);
            t.backward(loss);
            std::vector<double> all = {v};
            for (Param* p : {&gru.wx, &gru.wh, &gru.bx, &gru.bh, &x, &h})
                for (int64_t i = 0; i < p->grad.numel(); ++i) all.push_back(p->grad.at(i));
            return all;
        };
        auto a = grads_of(true);
        auto b = grads_of(false);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("masked gru step keeps hidden state where mask is zero") {
    Rng rng(5);
    GruParams gru;
    gru.init("gru", 3, 4, rng);
    Tensor xv = random_tensor({2, 3}, rng);
    Tensor hv = random_tensor({2, 4}, rng);
    Tensor mask({2, 1});
    mask(0, 0) = 1;
    mask(1, 0) = 0;
    Tape t;
    Var h2 = gru_cell_masked(t, t.input(xv), t.input(hv), gru, mask, ParamUse{t, true});
    Var h2_plain = gru_cell(t, t.input(xv), t.input(hv), gru);
    for (int j = 0; j < 4; ++j) {
        CHECK(t.val(h2)(0, j) == doctest::Approx(t.val(h2_plain)(0, j)));
        CHECK(t.val(h2)(1, j) == doctest::Approx(hv(1, j)));
    }
}

TEST_CASE("max_pool_time window arithmetic") {
    Rng rng(11);
    for (int len = 1; len <= 12; ++len) {
        Tape t;
        std::vector<Var> seq;
        std::vector<Tensor> keep;
        keep.reserve(static_cast<size_t>(len));
        for (int i = 0; i < len; ++i) {
            keep.push_back(random_tensor({2, 3}, rng));
            seq.push_back(t.input(keep.back()));
        }
        auto pooled = max_pool_time(t, seq, 5);
        CHECK(static_cast<int>(pooled.size()) == (len + 4) / 5);
        // every pooled value equals the max over its window
        for (size_t w = 0; w < pooled.size(); ++w) {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 3; ++j) {
                    double mx = -1e300;
                    for (size_t p = w * 5; p < std::min(keep.size(), w * 5 + 5); ++p)
                        mx = std::max(mx, static_cast<double>(keep[p](i, j)));
                    CHECK(t.val(pooled[w])(i, j) == doctest::Approx(mx));
                }
        }
    }
}

TEST_CASE("forward is deterministic and gradients ignore unrelated nodes") {
    Rng rng(99);
    Param a("a", random_tensor({2, 2}, rng));
    Param b("b", random_tensor({2, 2}, rng));

    auto run = [&](bool extra_nodes) {
        for (Param* p : {&a, &b}) p->zero_grad();
        Tape t;
        Var loss = t.mean_all(t.mul(t.tanh(t.param(a)), t.param(b)));
        if (extra_nodes) {
            Tensor junk = random_tensor({3, 3}, rng);
            Var j = t.input(junk);
            (void)t.softmax_rows(j);
            (void)t.mean_all(t.tanh(j));
        }
        t.backward(loss);
        auto g = stylelab::testutil::flatten_grads({&a, &b});
        g.push_back(t.val(loss)(0, 0));
        return g;
    };

    auto g1 = run(false);
    auto g2 = run(true);
    auto g3 = run(false);
    CHECK(g1 == g2);
    CHECK(g1 == g3);
}

TEST_CASE("backward requires scalar loss") {
    Tensor v({2, 2}, 1.0);
    Tape t;
    Var x = t.input(v);
    CHECK_THROWS_AS(t.backward(x), ContractError);
}

TEST_CASE("dropout is inverted and disabled at rate 0") {
    Rng rng(3);
    Tensor v({50, 20}, 1.0);
    Tape t;
    Var x = t.input(v);
    CHECK(t.dropout(x, 0.0, rng) == x);
    Var d = t.dropout(x, 0.25, rng);
    double mean = sum(t.val(d)) / static_cast<double>(t.val(d).numel());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.1));
    for (int64_t i = 0; i < t.val(d).numel(); ++i) {
        double val = t.val(d).at(i);
        CHECK((val == 0.0 || val == doctest::Approx(1.0 / 0.75)));
    }
}
