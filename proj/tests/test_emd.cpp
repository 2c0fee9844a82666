#include <doctest.h>

#include <cmath>

#include "stylelab/common.hpp"
#include "stylelab/metrics/emd.hpp"
#include "support/lp_oracle.hpp"

using namespace stylelab;

namespace {

std::vector<double> random_dist(int n, Rng& rng, bool allow_zero = true) {
    std::vector<double> p(static_cast<size_t>(n));
    double s = 0;
    for (auto& v : p) {
        v = allow_zero && rng.uniform() < 0.2 ? 0.0 : rng.uniform();
        s += v;
    }
    if (s == 0) {
        p[0] = 1;
        s = 1;
    }
    for (auto& v : p) v /= s;
    return p;
}

std::vector<double> random_ground(int n, Rng& rng) {
    std::vector<double> g(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = rng.uniform(0.1, 3.0);
            g[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] = d;
            g[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(i)] = d;
        }
    return g;
}

}  // namespace

TEST_CASE("emd basics") {
    std::vector<double> p = {0.5, 0.5}, q = {0.5, 0.5};
    CHECK(emd(p, q) == 0.0);
    CHECK(emd({1, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    // 2-bin unit-cost case equals total variation
    CHECK(emd({0.9, 0.1}, {0.2, 0.8}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(emd({0.9, 0.1}, {0.2, 0.8}) ==
          doctest::Approx(lp_oracle::transport_lp({0.9, 0.1}, {0.2, 0.8}, unit_ground_matrix(2))));
}

TEST_CASE("emd input contracts") {
    CHECK_THROWS_AS(emd({0.5, 0.6}, {0.5, 0.5}), ContractError);  // not normalized
    CHECK_THROWS_AS(emd({0.5, 0.5}, {0.5, 0.5, 0.0}), ContractError);
    CHECK_THROWS_AS(emd({-0.1, 1.1}, {0.5, 0.5}), ContractError);
    std::vector<double> bad_diag = {0.5, 1, 1, 0.5};
    CHECK_THROWS_AS(emd({0.5, 0.5}, {0.5, 0.5}, bad_diag), ContractError);
    std::vector<double> asym = {0, 1, 2, 0};
    CHECK_THROWS_AS(emd({0.5, 0.5}, {0.5, 0.5}, asym), ContractError);
}

TEST_CASE("emd agrees with LP oracle on random instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng.below(5));  // 2..6
        auto p = random_dist(n, rng);
        auto q = random_dist(n, rng);
        bool unit = rng.uniform() < 0.5;
        auto g = unit ? unit_ground_matrix(n) : random_ground(n, rng);
        double mine = emd(p, q, g);
        double oracle = lp_oracle::transport_lp(p, q, g);
        CHECK(std::abs(mine - oracle) < 1e-9);
    }
}

TEST_CASE("emd metric properties on the unit ground matrix") {
    Rng rng(31337);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.below(5));
        auto p = random_dist(n, rng);
        auto q = random_dist(n, rng);
        auto r = random_dist(n, rng);
        double pq = emd(p, q), qp = emd(q, p), pr = emd(p, r), rq = emd(r, q);
        CHECK(pq >= 0.0);
        CHECK(pq <= 1.0 + 1e-12);
        CHECK(std::abs(pq - qp) < 1e-9);            // symmetry
        CHECK(pq <= pr + rq + 1e-9);                // triangle inequality
        CHECK(emd(p, p) == 0.0);                    // identity
        // unit ground distance: EMD == total variation
        double tv = 0;
        for (size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
        tv /= 2;
        CHECK(pq == doctest::Approx(tv).epsilon(1e-9));
    }
}

TEST_CASE("dc_emd sign rule") {
    std::vector<double> before = {0.9, 0.1}, after = {0.2, 0.8};
    CHECK(dc_emd(before, before, 0) == 0.0);
    CHECK(dc_emd(before, after, 1) == doctest::Approx(0.7));   // mass moved toward class 1
    CHECK(dc_emd(before, after, 0) == doctest::Approx(-0.7));  // mass moved away from class 0
    CHECK_THROWS_AS(dc_emd(before, after, 2), ContractError);
}

TEST_CASE("dc_emd magnitude and antisymmetry over random triples") {
    Rng rng(515);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.below(5));
        auto p = random_dist(n, rng);
        auto q = random_dist(n, rng);
        int target = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        double d = dc_emd(p, q, target);
        CHECK(std::abs(std::abs(d) - emd(p, q)) < 1e-12);
        if (p[static_cast<size_t>(target)] != q[static_cast<size_t>(target)]) {
            // swapping the roles flips the sign condition
            CHECK(dc_emd(q, p, target) == doctest::Approx(-d));
        } else {
            CHECK(d >= 0.0);  // boundary convention: counts as toward
        }
    }
}
