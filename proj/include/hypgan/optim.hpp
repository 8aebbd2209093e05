#pragma once

#include <vector>

#include "hypgan/networks.hpp"
#include "hypgan/tensor.hpp"

namespace hypgan {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    long step = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;
};

AdamState make_adam_state(const Network& net, AdamConfig cfg);

// Standard bias-corrected Adam update. Returns false (and leaves parameters
// and moments untouched) if any gradient element is non-finite.
bool adam_step(AdamState& state, std::vector<Parameter>& params,
               const std::vector<Tensor>& grads);

}  // namespace hypgan
