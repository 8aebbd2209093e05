#pragma once

#include <functional>

#include "hypgan/autodiff.hpp"

namespace hypgan::losses {

// Binary cross-entropy in stable logit form (softplus), mean over the batch.
// The CGAN uses the same formulas: conditioning enters through the network
// inputs, not the loss.
ad::Var gan_d_loss(ad::Var d_logits_real, ad::Var d_logits_fake);

// Non-saturating generator loss -log D(G(z)) in logit form.
ad::Var gan_g_loss(ad::Var d_logits_fake);

using Critic = std::function<ad::Var(ad::Var)>;

struct WganGpParts {
    ad::Var total;        // wasserstein + lambda * penalty
    ad::Var wasserstein;  // mean D(fake) - mean D(real)
    ad::Var penalty;      // mean (||grad_xhat D(xhat)|| - 1)^2
};

// eps_col is an N x 1 tensor of per-sample interpolation weights in [0, 1];
// xhat = eps*x_real + (1-eps)*x_fake. The critic must be differentiable twice
// along its input path (every primitive here has a differentiable adjoint).
WganGpParts wgan_gp_d_loss(const Critic& critic, ad::Var x_real, ad::Var x_fake, ad::Var eps_col,
                           double lambda_gp);

ad::Var wgan_g_loss(const Critic& critic, ad::Var x_fake);

}  // namespace hypgan::losses
