#pragma once

// Shared helpers for the test suites: random tensors, relative error, and the
// central finite-difference oracle. The oracle only touches public API and is
// independent of the backward implementation it checks.

#include <cmath>
#include <functional>
#include <vector>

#include "hypgan/autodiff.hpp"
#include "hypgan/rng.hpp"
#include "hypgan/tensor.hpp"

namespace testutil {

inline hypgan::Tensor random_tensor(hypgan::RngState& rng, std::int64_t rows, std::int64_t cols,
                                    double lo, double hi) {
    hypgan::Tensor t(rows, cols);
    for (std::int64_t i = 0; i < t.numel(); ++i) {
        t[i] = lo + (hi - lo) * rng.next_uniform();
    }
    return t;
}

inline double rel_err(double a, double b, double floor = 1e-8) {
    const double denom = std::max({std::fabs(a), std::fabs(b), floor});
    return std::fabs(a - b) / denom;
}

// Builds the scalar function from scratch for every perturbed input, so the
// finite-difference estimate never reuses implementation state.
using ScalarFn = std::function<double(const std::vector<hypgan::Tensor>&)>;

struct FdReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

inline FdReport compare_to_finite_differences(const ScalarFn& f,
                                              std::vector<hypgan::Tensor> inputs,
                                              const std::vector<hypgan::Tensor>& analytic,
                                              double h = 1e-6, double grad_floor = 1e-6) {
    FdReport rep;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        for (std::int64_t i = 0; i < inputs[k].numel(); ++i) {
            const double saved = inputs[k][i];
            inputs[k][i] = saved + h;
            const double up = f(inputs);
            inputs[k][i] = saved - h;
            const double down = f(inputs);
            inputs[k][i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            rep.max_rel_err = std::max(rep.max_rel_err,
                                       rel_err(analytic[k][i], numeric, grad_floor));
            ++rep.checked;
        }
    }
    return rep;
}

// Convenience wrapper: builds a graph over leaf inputs, evaluates `build`,
// and checks backward() against finite differences.
using GraphFn = std::function<hypgan::ad::Var(hypgan::ad::Graph&, std::vector<hypgan::ad::Var>&)>;

inline FdReport check_gradients(const GraphFn& build, const std::vector<hypgan::Tensor>& inputs,
                                double h = 1e-6) {
    using hypgan::ad::Graph;
    using hypgan::ad::Var;
    Graph g;
    std::vector<Var> leaves;
    leaves.reserve(inputs.size());
    for (const hypgan::Tensor& t : inputs) {
        leaves.push_back(g.leaf(t));
    }
    Var root = build(g, leaves);
    const std::vector<hypgan::Tensor> analytic = g.backward(root, leaves);

    const ScalarFn value = [&build](const std::vector<hypgan::Tensor>& xs) {
        Graph g2;
        std::vector<Var> ls;
        ls.reserve(xs.size());
        for (const hypgan::Tensor& t : xs) {
            ls.push_back(g2.leaf(t));
        }
        return build(g2, ls).value().item();
    };
    return compare_to_finite_differences(value, inputs, analytic, h);
}

}  // namespace testutil
