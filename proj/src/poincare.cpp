#include "hypgan/poincare.hpp"

#include <cmath>

namespace hypgan {

Curvature::Curvature(double c_value, double boundary_margin)
    : c(c_value),
      sqrt_c(std::sqrt(c_value)),
      radius(1.0 / std::sqrt(c_value)),
      margin(boundary_margin) {
    if (!(std::isfinite(c_value) && c_value > 0.0)) {
        throw BallError("curvature c must be a positive finite real, got " +
                        std::to_string(c_value));
    }
    if (!(boundary_margin > 0.0 && boundary_margin < 1.0)) {
        throw BallError("boundary margin must lie in (0, 1)");
    }
}

namespace poincare {

namespace {

constexpr double kNormEps = 1e-15;
constexpr double kAtanhBound = 1.0 - 1e-10;

using ad::Graph;
using ad::Var;

Graph& graph_of(Var v, const char* what) {
    if (!v.valid()) {
        throw std::invalid_argument(std::string(what) + ": invalid Var");
    }
    return *v.graph;
}

// lambda without the membership check, for internal reuse.
Var conformal_factor_unchecked(Var u, const Curvature& curv) {
    Graph& g = graph_of(u, "conformal_factor");
    Var uu = g.sum_cols(g.square(u));
    return g.div(g.scalar(2.0), g.axpb(uu, -curv.c, 1.0));
}

// Operands must share the feature dimension; one side may be a single row
// (a bias point translated against a whole batch).
void check_addable(const Tensor& u, const Tensor& v, const char* what) {
    const bool rows_ok = u.rows() == v.rows() || u.rows() == 1 || v.rows() == 1;
    if (u.cols() != v.cols() || !rows_ok) {
        throw ShapeError(std::string(what) + ": operands " + u.shape_str() + " and " +
                         v.shape_str() + " do not conform");
    }
}

Var mobius_add_unchecked(Var u, Var v, const Curvature& curv) {
    Graph& g = graph_of(u, "mobius_add");
    check_addable(u.value(), v.value(), "mobius_add");
    const double c = curv.c;
    Var uu = g.sum_cols(g.square(u));
    Var vv = g.sum_cols(g.square(v));
    Var uv = g.sum_cols(g.mul(u, v));
    Var two_c_uv = g.axpb(uv, 2.0 * c, 0.0);
    // (1 + 2c<u,v> + c||v||^2) u + (1 - c||u||^2) v
    Var coef_u = g.add(g.axpb(vv, c, 1.0), two_c_uv);
    Var coef_v = g.axpb(uu, -c, 1.0);
    Var num = g.add(g.mul(coef_u, u), g.mul(coef_v, v));
    // 1 + 2c<u,v> + c^2 ||u||^2 ||v||^2; strictly positive for interior points,
    // clamped against boundary degeneracy.
    Var den = g.clamp_min(g.add(g.axpb(g.mul(uu, vv), c * c, 1.0), two_c_uv), kNormEps);
    return project_to_ball(g.div(num, den), curv);
}

}  // namespace

void check_in_ball(const Tensor& t, const Curvature& curv, const char* what) {
    const std::int64_t rows = t.rows();
    const std::int64_t cols = t.cols();
    for (std::int64_t i = 0; i < rows; ++i) {
        const double* r = t.data() + i * cols;
        double nsq = 0.0;
        for (std::int64_t j = 0; j < cols; ++j) {
            nsq += r[j] * r[j];
        }
        if (!(curv.c * nsq < 1.0)) {
            throw BallError(std::string(what) + ": row " + std::to_string(i) +
                            " is on or outside the ball (c*||u||^2 = " +
                            std::to_string(curv.c * nsq) + ")");
        }
    }
}

Var project_to_ball(Var u, const Curvature& curv) {
    Graph& g = graph_of(u, "project_to_ball");
    const double limit = (1.0 - curv.margin) * curv.radius;
    Var n = g.rowwise_norm(u);
    Var scale = g.clamp(g.div(g.scalar(limit), g.clamp_min(n, kNormEps)), 0.0, 1.0);
    return g.mul(u, scale);
}

Var conformal_factor(Var u, const Curvature& curv) {
    check_in_ball(u.value(), curv, "conformal_factor");
    return conformal_factor_unchecked(u, curv);
}

Var mobius_add(Var u, Var v, const Curvature& curv) {
    check_in_ball(u.value(), curv, "mobius_add(u)");
    check_in_ball(v.value(), curv, "mobius_add(v)");
    return mobius_add_unchecked(u, v, curv);
}

Var exp_map(Var u, Var x, const Curvature& curv) {
    Graph& g = graph_of(u, "exp_map");
    require_same_shape(u.value(), x.value(), "exp_map");
    check_in_ball(u.value(), curv, "exp_map(u)");
    Var n = g.rowwise_norm(x);
    Var nc = g.clamp_min(n, kNormEps);
    Var lam = conformal_factor_unchecked(u, curv);
    Var t = g.tanh(g.axpb(g.mul(lam, n), 0.5 * curv.sqrt_c, 0.0));
    Var step = g.mul(x, g.div(t, g.axpb(nc, curv.sqrt_c, 0.0)));
    // ||step|| = tanh(.)/sqrt(c) < r, so the projection only trims the margin.
    return mobius_add_unchecked(u, project_to_ball(step, curv), curv);
}

Var log_map(Var u, Var v, const Curvature& curv) {
    Graph& g = graph_of(u, "log_map");
    require_same_shape(u.value(), v.value(), "log_map");
    check_in_ball(u.value(), curv, "log_map(u)");
    check_in_ball(v.value(), curv, "log_map(v)");
    Var w = mobius_add_unchecked(g.neg(u), v, curv);
    Var nw = g.rowwise_norm(w);
    Var arg = g.clamp(g.axpb(nw, curv.sqrt_c, 0.0), 0.0, kAtanhBound);
    Var lam = conformal_factor_unchecked(u, curv);
    Var coef = g.div(g.axpb(g.atanh(arg), 2.0 / curv.sqrt_c, 0.0), lam);
    return g.mul(g.div(w, g.clamp_min(nw, kNormEps)), coef);
}

Var exp_map_zero(Var x, const Curvature& curv) {
    Graph& g = graph_of(x, "exp_map_zero");
    Var n = g.rowwise_norm(x);
    Var t = g.tanh(g.axpb(n, curv.sqrt_c, 0.0));
    Var coef = g.div(t, g.axpb(g.clamp_min(n, kNormEps), curv.sqrt_c, 0.0));
    return project_to_ball(g.mul(x, coef), curv);
}

Var log_map_zero(Var v, const Curvature& curv) {
    Graph& g = graph_of(v, "log_map_zero");
    check_in_ball(v.value(), curv, "log_map_zero");
    Var n = g.rowwise_norm(v);
    Var arg = g.clamp(g.axpb(n, curv.sqrt_c, 0.0), 0.0, kAtanhBound);
    Var coef = g.div(g.atanh(arg), g.axpb(g.clamp_min(n, kNormEps), curv.sqrt_c, 0.0));
    return g.mul(v, coef);
}

Var mobius_scalar_mul(double k, Var v, const Curvature& curv) {
    Graph& g = graph_of(v, "mobius_scalar_mul");
    check_in_ball(v.value(), curv, "mobius_scalar_mul");
    return project_to_ball(exp_map_zero(g.axpb(log_map_zero(v, curv), k, 0.0), curv), curv);
}

Var mobius_matvec(Var m, Var v, const Curvature& curv) {
    Graph& g = graph_of(v, "mobius_matvec");
    check_in_ball(v.value(), curv, "mobius_matvec");
    Var x = g.matmul(log_map_zero(v, curv), g.transpose(m));
    return exp_map_zero(x, curv);
}

Var mobius_bias_add(Var v, Var b, const Curvature& curv) {
    check_in_ball(v.value(), curv, "mobius_bias_add(v)");
    check_in_ball(b.value(), curv, "mobius_bias_add(b)");
    return mobius_add_unchecked(v, b, curv);
}

}  // namespace poincare
}  // namespace hypgan
