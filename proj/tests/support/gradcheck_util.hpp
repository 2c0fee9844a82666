#pragma once

#include <functional>
#include <vector>

#include "stylelab/autodiff.hpp"

namespace stylelab::testutil {

inline std::vector<double> flatten(const std::vector<Param*>& params) {
    std::vector<double> out;
    for (const Param* p : params)
        for (int64_t i = 0; i < p->value.numel(); ++i) out.push_back(p->value.at(i));
    return out;
}

inline void unflatten(const std::vector<double>& flat, const std::vector<Param*>& params) {
    size_t k = 0;
    for (Param* p : params)
        for (int64_t i = 0; i < p->value.numel(); ++i) p->value.at(i) = static_cast<real>(flat[k++]);
}

inline std::vector<double> flatten_grads(const std::vector<Param*>& params) {
    std::vector<double> out;
    for (const Param* p : params)
        for (int64_t i = 0; i < p->grad.numel(); ++i) out.push_back(p->grad.at(i));
    return out;
}

// Runs grad_check on a scalar tape program over the given parameters.
// The builder must be deterministic (re-seed any internal randomness).
inline double tape_grad_check(const std::vector<Param*>& params,
                              const std::function<Var(Tape&)>& build, double eps = 1e-5) {
    auto value_fn = [&](const std::vector<double>& x) {
        unflatten(x, params);
        Tape t;
        Var loss = build(t);
        return static_cast<double>(t.val(loss)(0, 0));
    };
    auto grad_fn = [&](const std::vector<double>& x) {
        unflatten(x, params);
        for (Param* p : params) p->zero_grad();
        Tape t;
        Var loss = build(t);
        t.backward(loss);
        return flatten_grads(params);
    };
    std::vector<double> point = flatten(params);
    double err = grad_check(value_fn, grad_fn, point, eps);
    unflatten(point, params);
    return err;
}

}  // namespace stylelab::testutil
