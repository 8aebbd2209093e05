#pragma once

#include <stdexcept>

#include "hypgan/autodiff.hpp"
#include "hypgan/tensor.hpp"

namespace hypgan {

struct BallError : std::runtime_error {
    explicit BallError(const std::string& what) : std::runtime_error(what) {}
};

// Positive curvature parameter c of the Poincare ball D^n_c together with the
// derived radius r = 1/sqrt(c) and the relative boundary margin used by
// project_to_ball. Hyperbolic operations reject c <= 0; the euclidean case is
// expressed by euclidean layers, not by c = 0.
struct Curvature {
    double c;
    double sqrt_c;
    double radius;  // 1 / sqrt(c)
    double margin;  // relative, default 1e-5

    explicit Curvature(double c_value, double boundary_margin = 1e-5);
};

// Batched Mobius gyrovector operations and exp/log maps. Rows of a tensor are
// independent points; every function is differentiable through the graph.
// Functions taking ball points validate c*||row||^2 < 1 on their inputs and
// return projected points, so closure holds after every public operation.
namespace poincare {

// Throws BallError unless every row satisfies c*||row||^2 < 1.
void check_in_ball(const Tensor& t, const Curvature& curv, const char* what);

// Rows with norm >= (1 - margin)*r are radially rescaled to exactly
// (1 - margin)*r; interior rows pass through unchanged.
ad::Var project_to_ball(ad::Var u, const Curvature& curv);

// lambda_u = 2 / (1 - c*||u||^2), per row (N x 1); >= 2 inside the ball.
ad::Var conformal_factor(ad::Var u, const Curvature& curv);

ad::Var mobius_add(ad::Var u, ad::Var v, const Curvature& curv);

ad::Var exp_map(ad::Var u, ad::Var x, const Curvature& curv);
ad::Var log_map(ad::Var u, ad::Var v, const Curvature& curv);
ad::Var exp_map_zero(ad::Var x, const Curvature& curv);
ad::Var log_map_zero(ad::Var v, const Curvature& curv);

ad::Var mobius_scalar_mul(double k, ad::Var v, const Curvature& curv);

// M (out x in) applied to row points v (N x in) -> N x out.
ad::Var mobius_matvec(ad::Var m, ad::Var v, const Curvature& curv);

// Bias translation; identical to mobius_add(v, b) (the conformal-ratio form
// coincides and is kept as a test oracle only).
ad::Var mobius_bias_add(ad::Var v, ad::Var b, const Curvature& curv);

// Mobius lift of a euclidean map f: exp0(f(log0(v))).
template <class F>
ad::Var mobius_fn(F&& f, ad::Var v, const Curvature& curv) {
    return project_to_ball(exp_map_zero(f(log_map_zero(v, curv)), curv), curv);
}

}  // namespace poincare
}  // namespace hypgan
