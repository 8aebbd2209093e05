#include "hypgan/layers.hpp"

#include <cmath>

namespace hypgan::layers {

using ad::Graph;
using ad::Var;

Var euclidean_linear_forward(Var w, Var b, Var x) {
    Graph& g = *x.graph;
    return g.add(g.matmul(x, g.transpose(w)), b);
}

Var hyperbolic_linear_forward(Var w, Var b, Var v, const Curvature& curv) {
    Var bias_point = poincare::exp_map_zero(b, curv);
    return poincare::mobius_bias_add(poincare::mobius_matvec(w, v, curv), bias_point, curv);
}

Var hyperbolic_leaky_relu(Var v, double slope, const Curvature& curv) {
    Graph& g = *v.graph;
    return poincare::project_to_ball(g.leaky_relu(v, slope), curv);
}

Var dropout_forward(Var x, double rate, RngState& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) {
        throw std::invalid_argument("dropout rate must lie in [0, 1)");
    }
    if (!training || rate == 0.0) {
        return x;
    }
    Graph& g = *x.graph;
    const Tensor& t = x.value();
    Tensor mask(t.rows(), t.cols());
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::int64_t i = 0; i < mask.numel(); ++i) {
        mask[i] = rng.next_uniform() < rate ? 0.0 : keep_scale;
    }
    return g.mul(x, g.leaf(std::move(mask)));
}

Tensor init_linear_weight(RngState& rng, std::int64_t out, std::int64_t in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Tensor w(out, in);
    for (std::int64_t i = 0; i < w.numel(); ++i) {
        w[i] = (2.0 * rng.next_uniform() - 1.0) * bound;
    }
    return w;
}

}  // namespace hypgan::layers
