#pragma once

#include <variant>

#include "hypgan/autodiff.hpp"
#include "hypgan/poincare.hpp"
#include "hypgan/rng.hpp"

namespace hypgan {

// Layer descriptors reference parameters by index into the owning network's
// registry. Hyperbolic layers take their curvature from the network.

struct EuclideanLinear {
    int weight = -1;  // out x in
    int bias = -1;    // 1 x out
};

// Mobius matvec followed by Mobius bias translation. The bias parameter is a
// euclidean tangent-at-origin vector mapped through exp0 inside the layer, so
// plain Adam updates stay valid.
struct HyperbolicLinear {
    int weight = -1;
    int bias = -1;
};

struct ExpMapBoundary {};
struct LogMapBoundary {};

struct LeakyReLULayer {
    double slope = 0.2;
};

// LeakyReLU applied directly to ball coordinates (no log/exp sandwich);
// coordinatewise contraction for slope <= 1, with a projection as safeguard.
struct HyperbolicLeakyReLU {
    double slope = 0.2;
};

struct TanhLayer {};

struct DropoutLayer {
    double rate = 0.1;
};

using Layer = std::variant<EuclideanLinear, HyperbolicLinear, ExpMapBoundary, LogMapBoundary,
                           LeakyReLULayer, HyperbolicLeakyReLU, TanhLayer, DropoutLayer>;

namespace layers {

// x (N x in) -> x W^T + b (N x out).
ad::Var euclidean_linear_forward(ad::Var w, ad::Var b, ad::Var x);

// v inside the ball -> mobius_bias_add(mobius_matvec(W, v), exp0(b)).
ad::Var hyperbolic_linear_forward(ad::Var w, ad::Var b, ad::Var v, const Curvature& curv);

ad::Var hyperbolic_leaky_relu(ad::Var v, double slope, const Curvature& curv);

// Inverted dropout: training zeroes elements with probability `rate` and
// scales survivors by 1/(1-rate); evaluation is exactly the identity.
ad::Var dropout_forward(ad::Var x, double rate, RngState& rng, bool training);

// Uniform in +-1/sqrt(fan_in); keeps first forward passes of hyperbolic
// layers well inside the ball.
Tensor init_linear_weight(RngState& rng, std::int64_t out, std::int64_t in);

}  // namespace layers
}  // namespace hypgan
