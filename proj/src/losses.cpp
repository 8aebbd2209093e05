#include "hypgan/losses.hpp"

namespace hypgan::losses {

using ad::Graph;
using ad::Var;

Var gan_d_loss(Var d_logits_real, Var d_logits_fake) {
    Graph& g = *d_logits_real.graph;
    Var real_term = g.mean_all(g.softplus(g.neg(d_logits_real)));  // BCE(real -> 1)
    Var fake_term = g.mean_all(g.softplus(d_logits_fake));         // BCE(fake -> 0)
    return g.add(real_term, fake_term);
}

Var gan_g_loss(Var d_logits_fake) {
    Graph& g = *d_logits_fake.graph;
    return g.mean_all(g.softplus(g.neg(d_logits_fake)));  // BCE(fake -> 1)
}

WganGpParts wgan_gp_d_loss(const Critic& critic, Var x_real, Var x_fake, Var eps_col,
                           double lambda_gp) {
    Graph& g = *x_real.graph;
    require_same_shape(x_real.value(), x_fake.value(), "wgan_gp_d_loss");
    const Tensor& eps = eps_col.value();
    if (eps.rows() != x_real.rows() || eps.cols() != 1) {
        throw ShapeError("wgan_gp_d_loss: eps must be N x 1");
    }
    for (std::int64_t i = 0; i < eps.numel(); ++i) {
        if (!(eps[i] >= 0.0 && eps[i] <= 1.0)) {
            throw std::invalid_argument("wgan_gp_d_loss: eps outside [0, 1]");
        }
    }
    if (!(lambda_gp > 0.0)) {
        throw std::invalid_argument("wgan_gp_d_loss: lambda_gp must be positive");
    }

    Var x_hat = g.add(g.mul(eps_col, x_real), g.mul(g.axpb(eps_col, -1.0, 1.0), x_fake));
    // Summing the per-sample scores gives the per-row input gradients in one
    // backward pass; the gradient stays a graph node so the penalty can be
    // differentiated w.r.t. the critic parameters afterwards.
    Var grad = g.grad_as_node(g.sum_all(critic(x_hat)), x_hat);
    Var penalty = g.mean_all(g.square(g.add_scalar(g.rowwise_norm(grad), -1.0)));

    Var wasserstein = g.sub(g.mean_all(critic(x_fake)), g.mean_all(critic(x_real)));
    Var total = g.add(wasserstein, g.mul_scalar(penalty, lambda_gp));
    return {total, wasserstein, penalty};
}

Var wgan_g_loss(const Critic& critic, Var x_fake) {
    Graph& g = *x_fake.graph;
    return g.neg(g.mean_all(critic(x_fake)));
}

}  // namespace hypgan::losses
