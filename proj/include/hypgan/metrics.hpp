#pragma once

#include <array>

#include "hypgan/data.hpp"
#include "hypgan/networks.hpp"
#include "hypgan/optim.hpp"

namespace hypgan {

struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Fixed MNIST classifier (784 -> 256 -> 64 -> 10, LeakyReLU 0.2) used as the
// probability and feature source for IS and FID. The 64-unit penultimate
// activations are the feature space; absolute FID values are therefore not
// comparable across feature extractors, only orderings and trends are.
struct Evaluator {
    Network net;
    double test_accuracy = 0.0;
    std::uint64_t seed = 0;

    static constexpr std::int64_t kFeatureDim = 64;
};

struct EvaluatorOptions {
    int epochs = 6;
    std::int64_t batch_size = 128;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double min_accuracy = 0.96;
};

// The classifier skeleton (shared by training and checkpoint loading).
Network build_evaluator_classifier(RngState& init_rng);

// Deterministic per seed; throws MetricError if the test accuracy stays below
// opts.min_accuracy after the budget.
Evaluator train_evaluator(const Dataset& train, const Dataset& test, std::uint64_t seed,
                          const EvaluatorOptions& opts = {});

double classifier_accuracy(const Evaluator& ev, const Dataset& ds);

struct EvalOutput {
    Tensor probs;     // N x 10, rows sum to 1
    Tensor features;  // N x 64
};

EvalOutput evaluate_images(const Evaluator& ev, const Tensor& images);

// exp(E_x KL(p(y|x) || p(y))); 1 <= IS <= #classes. Rows must sum to 1 (1e-9).
double inception_score(const Tensor& probs);

struct SplitScore {
    double mean = 0.0;
    double stddev = 0.0;
};

// Standard protocol: score contiguous splits and average.
SplitScore inception_score_split(const Tensor& probs, int splits = 10);

struct GaussianSummary {
    Tensor mean;  // 1 x d
    Tensor cov;   // d x d, symmetric PSD
    std::int64_t count = 0;
};

GaussianSummary summarize_features(const Tensor& features);

// Principal square root of a symmetric PSD matrix via cyclic Jacobi rotations;
// eigenvalues are clamped at zero (error below -1e-10).
Tensor matrix_sqrt_psd(const Tensor& a);

// ||mu1-mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}); symmetric, >= 0.
double fid(const GaussianSummary& a, const GaussianSummary& b);

// Distribution of R(x) = tanh(sqrt(c)||x||) = ||exp0(x)|| / r over rows.
struct RadiusHistogram {
    std::array<std::int64_t, 100> bins{};  // [0, 1) in 0.01 steps
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
    std::int64_t count = 0;
};

RadiusHistogram radius_distribution(const Tensor& x, const Curvature& curv);

}  // namespace hypgan
