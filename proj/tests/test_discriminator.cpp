#include <doctest.h>

#include <cmath>

#include "stylelab/discriminator.hpp"
#include "support/model_util.hpp"

using namespace stylelab;
using namespace stylelab::testutil;

TEST_CASE("logits are deterministic and have one head of |S|+1 classes") {
    DiscriminatorParams D = tiny_discriminator(1);
    Tape t;
    std::vector<std::vector<int>> ids = {{4, 5, 6}, {7, 8}};
    auto l1 = disc_predict(t, ids, D, false);
    auto l2 = disc_predict(t, ids, D, false);
    REQUIRE(l1.size() == 1);
    CHECK(t.val(l1[0]).cols() == 3);  // fake, negative, positive
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(t.val(l1[0])(i, j) == t.val(l2[0])(i, j));
    CHECK_THROWS_AS(disc_predict(t, {}, D), ContractError);
    CHECK_THROWS_AS(disc_predict(t, {{}}, D), ContractError);
}

TEST_CASE("one-hot soft input reproduces hard-id logits") {
    DiscriminatorParams D = tiny_discriminator(2);
    Tape t;
    std::vector<std::vector<int>> ids = {{5, 7, 9}};
    auto hard = disc_predict(t, ids, D, false);

    std::vector<Var> dists;
    std::vector<Tensor> masks;
    for (int tok : ids[0]) {
        Tensor onehot({1, 12});
        onehot(0, tok) = 1;
        dists.push_back(t.constant(std::move(onehot)));
        masks.push_back(Tensor({1, 1}, 1));
    }
    auto soft = disc_predict_soft(t, dists, masks, D, false);
    for (int j = 0; j < 3; ++j)
        CHECK(t.val(soft[0])(0, j) == doctest::Approx(t.val(hard[0])(0, j)).epsilon(1e-12));
}

TEST_CASE("zeroed heads give exactly ln(3) cross entropy on a 3-class head") {
    DiscriminatorParams D = tiny_discriminator(3);
    D.head_w[0].value.fill(0);
    D.head_b[0].value.fill(0);
    Tape t;
    auto logits = disc_predict(t, {{4, 5}, {6, 7}}, D, false);
    Var loss = disc_cross_entropy(t, logits, {{1, 2}});
    CHECK(t.val(loss)(0, 0) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("training separates a token-disjoint toy problem") {
    // style 0 sentences use tokens 4..6, style 1 tokens 7..9, fakes 10..11
    Rng rng(4);
    std::vector<std::vector<int>> real_ids;
    std::vector<StyleVector> real_styles;
    std::vector<std::vector<int>> fake_ids;
    for (int i = 0; i < 8; ++i) {
        int label = i % 2;
        std::vector<int> seq;
        for (int k = 0; k < 3; ++k)
            seq.push_back(label == 0 ? 4 + static_cast<int>(rng.below(3))
                                     : 7 + static_cast<int>(rng.below(3)));
        real_ids.push_back(seq);
        real_styles.push_back(StyleVector{{label}});
        fake_ids.push_back({10 + static_cast<int>(rng.below(2)), 10, 11});
    }
    DiscriminatorParams D = tiny_discriminator(5);
    AdamConfig cfg;
    cfg.lr = 0.01;
    Adam opt(cfg);
    double loss = 0;
    for (int step = 0; step < 200; ++step) loss = disc_train_step(real_ids, real_styles, fake_ids, D, opt);
    CHECK(loss < 0.1);
}

TEST_CASE("disc_train_step validates real styles") {
    DiscriminatorParams D = tiny_discriminator(6);
    Adam opt;
    CHECK_THROWS_AS(disc_train_step({{4, 5}}, {}, {{6}}, D, opt), ContractError);
    CHECK_THROWS_AS(disc_train_step({}, {}, {{6}}, D, opt), ContractError);
}

TEST_CASE("discriminator loss is non-increasing over 100 steps in >= 95 of 100 trials") {
    int ok = 0;
    for (uint64_t trial = 0; trial < 100; ++trial) {
        Rng rng(9000 + trial);
        // frozen random "generated" output and separable real data
        std::vector<std::vector<int>> real_ids, fake_ids;
        std::vector<StyleVector> real_styles;
        for (int i = 0; i < 6; ++i) {
            int label = i % 2;
            std::vector<int> seq;
            for (int k = 0; k < 3; ++k)
                seq.push_back(label == 0 ? 4 + static_cast<int>(rng.below(3))
                                         : 7 + static_cast<int>(rng.below(3)));
            real_ids.push_back(seq);
            real_styles.push_back(StyleVector{{label}});
            fake_ids.push_back(random_seq(rng, 12, 2, 5));
        }
        DiscriminatorParams D = tiny_discriminator(rng.next());
        AdamConfig cfg;
        cfg.lr = 0.005;
        Adam opt(cfg);
        double first = disc_train_step(real_ids, real_styles, fake_ids, D, opt);
        double last = first;
        for (int step = 1; step < 100; ++step)
            last = disc_train_step(real_ids, real_styles, fake_ids, D, opt);
        if (last <= first) ++ok;
    }
    CHECK(ok >= 95);
}
