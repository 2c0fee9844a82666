#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "stylelab/autodiff.hpp"

namespace stylelab {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    // weight decay fixed at 0
};

struct AdamState {
    Tensor m;
    Tensor v;
    int64_t step = 0;
};

// One bias-corrected Adam update for a single tensor.
inline void adam_step(Tensor& value, const Tensor& grad, AdamState& state, const AdamConfig& cfg) {
    if (!value.same_shape(grad)) throw ContractError("adam_step: param/grad shape mismatch");
    if (state.step == 0) {
        state.m = Tensor(value.shape());
        state.v = Tensor(value.shape());
    }
    if (!state.m.same_shape(value)) throw ContractError("adam_step: state shape mismatch");
    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (int64_t i = 0; i < value.numel(); ++i) {
        double g = grad.at(i);
        double m = cfg.beta1 * state.m.at(i) + (1.0 - cfg.beta1) * g;
        double v = cfg.beta2 * state.v.at(i) + (1.0 - cfg.beta2) * g * g;
        state.m.at(i) = static_cast<real>(m);
        state.v.at(i) = static_cast<real>(v);
        double mhat = m / bc1;
        double vhat = v / bc2;
        value.at(i) -= static_cast<real>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
}

// Global-norm gradient clipping across a parameter set. Returns the
// pre-clip norm; afterwards the global norm is min(norm, max_norm) up to
// rounding. The relative tolerance band makes repeated application a
// bit-exact no-op.
inline double clip_grad_norm(const std::vector<Param*>& params, double max_norm) {
    require(max_norm > 0, "clip_grad_norm: max_norm > 0");
    double sq = 0;
    for (const Param* p : params) sq += squared_l2(p->grad);
    double norm = std::sqrt(sq);
    if (norm > max_norm * (1.0 + 1e-12)) {
        real s = static_cast<real>(max_norm / norm);
        for (Param* p : params)
            for (int64_t i = 0; i < p->grad.numel(); ++i) p->grad.at(i) *= s;
    }
    return norm;
}

class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    const AdamConfig& config() const { return cfg_; }

    // Applies one update to every parameter (in the given order) and
    // zeroes the gradients.
    void step(const std::vector<Param*>& params) {
        for (Param* p : params) {
            adam_step(p->value, p->grad, states_[p], cfg_);
            p->zero_grad();
        }
    }

private:
    AdamConfig cfg_;
    std::unordered_map<Param*, AdamState> states_;
};

}  // namespace stylelab
