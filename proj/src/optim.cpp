#include "hypgan/optim.hpp"

#include <cmath>

namespace hypgan {

AdamState make_adam_state(const Network& net, AdamConfig cfg) {
    AdamState state;
    state.cfg = cfg;
    state.m.reserve(net.params.size());
    state.v.reserve(net.params.size());
    for (const Parameter& p : net.params) {
        state.m.push_back(Tensor::zeros(p.value.rows(), p.value.cols()));
        state.v.push_back(Tensor::zeros(p.value.rows(), p.value.cols()));
    }
    return state;
}

bool adam_step(AdamState& state, std::vector<Parameter>& params,
               const std::vector<Tensor>& grads) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: parameter/gradient count mismatch");
    }
    for (std::size_t k = 0; k < grads.size(); ++k) {
        require_same_shape(params[k].value, grads[k], "adam_step");
        if (!grads[k].all_finite()) {
            return false;
        }
    }
    state.step += 1;
    const AdamConfig& c = state.cfg;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& p = params[k].value;
        Tensor& m = state.m[k];
        Tensor& v = state.v[k];
        const Tensor& grad = grads[k];
        for (std::int64_t i = 0; i < p.numel(); ++i) {
            const double gi = grad[i];
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * gi;
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * gi * gi;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
        }
    }
    return true;
}

}  // namespace hypgan
