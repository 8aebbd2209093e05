#include "hypgan/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hypgan/kernels.hpp"

namespace hypgan {

namespace {

constexpr double kLogFloor = 1e-12;

}  // namespace

Network build_evaluator_classifier(RngState& rng) {
    Network net;
    net.input_width = kImageDim;
    net.output_width = 10;
    const std::vector<std::int64_t> widths = {kImageDim, 256, Evaluator::kFeatureDim, 10};
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const int w = static_cast<int>(net.params.size());
        net.params.push_back({"lin" + std::to_string(i) + ".weight",
                              layers::init_linear_weight(rng, widths[i + 1], widths[i])});
        const int b = static_cast<int>(net.params.size());
        net.params.push_back(
            {"lin" + std::to_string(i) + ".bias", Tensor::zeros(1, widths[i + 1])});
        net.layers.push_back(EuclideanLinear{w, b});
        if (i + 2 < widths.size()) {
            net.layers.push_back(LeakyReLULayer{kLeakySlope});
        }
    }
    return net;
}

namespace {

// Plain-tensor affine + LeakyReLU for inference paths (no tape).
Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
    Tensor wt(w.cols(), w.rows());
    kernels::transpose(w.data(), wt.data(), w.rows(), w.cols());
    Tensor out(x.rows(), w.rows());
    kernels::matmul(x.data(), wt.data(), out.data(), x.rows(), x.cols(), w.rows());
    for (std::int64_t i = 0; i < out.rows(); ++i) {
        for (std::int64_t j = 0; j < out.cols(); ++j) {
            out.at(i, j) += b[j];
        }
    }
    return out;
}

void leaky_inplace(Tensor& t, double slope) {
    kernels::map(t.data(), t.data(), t.numel(),
                 [slope](double v) { return v >= 0.0 ? v : slope * v; });
}

void softmax_rows_inplace(Tensor& t) {
    for (std::int64_t i = 0; i < t.rows(); ++i) {
        double* r = t.data() + i * t.cols();
        double m = r[0];
        for (std::int64_t j = 1; j < t.cols(); ++j) {
            m = std::max(m, r[j]);
        }
        double sum = 0.0;
        for (std::int64_t j = 0; j < t.cols(); ++j) {
            r[j] = std::exp(r[j] - m);
            sum += r[j];
        }
        for (std::int64_t j = 0; j < t.cols(); ++j) {
            r[j] /= sum;
        }
    }
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
// in `eig`; V columns are the eigenvectors.
void jacobi_eigen(const Tensor& a, std::vector<double>& eig, Tensor& v) {
    const std::int64_t n = a.rows();
    Tensor b = a;
    v = Tensor::identity(n);
    double fro = 0.0;
    for (std::int64_t i = 0; i < b.numel(); ++i) {
        fro += b[i] * b[i];
    }
    const double stop = 1e-26 * (fro > 0.0 ? fro : 1.0);
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                off += b.at(p, q) * b.at(p, q);
            }
        }
        if (2.0 * off <= stop) {
            eig.resize(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) {
                eig[static_cast<std::size_t>(i)] = b.at(i, i);
            }
            return;
        }
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                const double apq = b.at(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (b.at(q, q) - b.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::int64_t k = 0; k < n; ++k) {
                    const double bkp = b.at(k, p);
                    const double bkq = b.at(k, q);
                    b.at(k, p) = c * bkp - s * bkq;
                    b.at(k, q) = s * bkp + c * bkq;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double bpk = b.at(p, k);
                    const double bqk = b.at(q, k);
                    b.at(p, k) = c * bpk - s * bqk;
                    b.at(q, k) = s * bpk + c * bqk;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double vkp = v.at(k, p);
                    const double vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    throw MetricError("jacobi eigendecomposition did not converge in 100 sweeps");
}

void require_symmetric(const Tensor& a, double tol, const char* what) {
    if (a.rows() != a.cols()) {
        throw MetricError(std::string(what) + ": matrix must be square");
    }
    for (std::int64_t i = 0; i < a.rows(); ++i) {
        for (std::int64_t j = i + 1; j < a.cols(); ++j) {
            if (std::fabs(a.at(i, j) - a.at(j, i)) > tol) {
                throw MetricError(std::string(what) + ": matrix not symmetric within tolerance");
            }
        }
    }
}

Tensor matmul_t(const Tensor& a, const Tensor& b) {
    Tensor out(a.rows(), b.cols());
    kernels::matmul(a.data(), b.data(), out.data(), a.rows(), a.cols(), b.cols());
    return out;
}

}  // namespace

Evaluator train_evaluator(const Dataset& train, const Dataset& test, std::uint64_t seed,
                          const EvaluatorOptions& opts) {
    RngState init_rng = RngState(seed).split(0x11);
    RngState shuffle_rng = RngState(seed).split(0x22);
    RngState unused_dropout(0);

    Evaluator ev;
    ev.seed = seed;
    ev.net = build_evaluator_classifier(init_rng);
    AdamState adam = make_adam_state(ev.net, {opts.lr, opts.beta1, opts.beta2, 1e-8});

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        for (const auto& idx : epoch_batches(train.size(), opts.batch_size, shuffle_rng)) {
            Batch batch = gather(train, idx);
            ad::Graph g;
            BoundNet bound = bind(g, ev.net);
            ad::Var logits = bound.forward(g.leaf(std::move(batch.images)), true, unused_dropout);
            // Cross-entropy via the max-shifted log-sum-exp; the shift is a
            // constant w.r.t. differentiation and cancels exactly.
            ad::Var shift = g.row_max(logits);
            ad::Var lse = g.add(shift, g.log(g.sum_cols(g.exp(g.sub(logits, shift)))));
            ad::Var picked = g.sum_cols(g.mul(logits, g.leaf(std::move(batch.labels_one_hot))));
            ad::Var loss = g.mean_all(g.sub(lse, picked));
            std::vector<Tensor> grads = g.backward(loss, bound.params);
            if (!adam_step(adam, ev.net.params, grads)) {
                throw MetricError("non-finite gradient while training the evaluator");
            }
        }
    }

    ev.test_accuracy = classifier_accuracy(ev, test);
    if (ev.test_accuracy < opts.min_accuracy) {
        throw MetricError("evaluator test accuracy " + std::to_string(ev.test_accuracy) +
                          " below required " + std::to_string(opts.min_accuracy));
    }
    return ev;
}

EvalOutput evaluate_images(const Evaluator& ev, const Tensor& images) {
    const auto& p = ev.net.params;
    EvalOutput out;
    Tensor h1 = linear_forward(images, p[0].value, p[1].value);
    leaky_inplace(h1, kLeakySlope);
    Tensor h2 = linear_forward(h1, p[2].value, p[3].value);
    leaky_inplace(h2, kLeakySlope);
    out.features = h2;
    out.probs = linear_forward(h2, p[4].value, p[5].value);
    softmax_rows_inplace(out.probs);
    return out;
}

double classifier_accuracy(const Evaluator& ev, const Dataset& ds) {
    const EvalOutput out = evaluate_images(ev, ds.images);
    std::int64_t correct = 0;
    for (std::int64_t i = 0; i < out.probs.rows(); ++i) {
        const double* r = out.probs.data() + i * out.probs.cols();
        std::int64_t best = 0;
        for (std::int64_t j = 1; j < out.probs.cols(); ++j) {
            if (r[j] > r[best]) {
                best = j;
            }
        }
        if (best == ds.labels[static_cast<std::size_t>(i)]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(ds.size());
}

double inception_score(const Tensor& probs) {
    const std::int64_t n = probs.rows();
    const std::int64_t k = probs.cols();
    if (n < 1) {
        throw MetricError("inception_score: empty input");
    }
    for (std::int64_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::int64_t j = 0; j < k; ++j) {
            const double p = probs.at(i, j);
            if (p < 0.0) {
                throw MetricError("inception_score: negative probability");
            }
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw MetricError("inception_score: row " + std::to_string(i) +
                              " does not sum to 1 (got " + std::to_string(sum) + ")");
        }
    }
    std::vector<double> marginal(static_cast<std::size_t>(k), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < k; ++j) {
            marginal[static_cast<std::size_t>(j)] += probs.at(i, j);
        }
    }
    for (double& m : marginal) {
        m /= static_cast<double>(n);
    }
    double mean_kl = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        double kl = 0.0;
        for (std::int64_t j = 0; j < k; ++j) {
            const double p = probs.at(i, j);
            if (p > 0.0) {
                kl += p * (std::log(std::max(p, kLogFloor)) -
                           std::log(std::max(marginal[static_cast<std::size_t>(j)], kLogFloor)));
            }
        }
        mean_kl += kl;
    }
    mean_kl /= static_cast<double>(n);
    return std::exp(mean_kl);
}

SplitScore inception_score_split(const Tensor& probs, int splits) {
    const std::int64_t n = probs.rows();
    if (splits < 1) {
        throw MetricError("inception_score_split: splits must be >= 1");
    }
    splits = static_cast<int>(std::min<std::int64_t>(splits, n));
    std::vector<double> scores;
    for (int s = 0; s < splits; ++s) {
        const std::int64_t lo = n * s / splits;
        const std::int64_t hi = n * (s + 1) / splits;
        Tensor chunk(hi - lo, probs.cols());
        for (std::int64_t i = 0; i < chunk.numel(); ++i) {
            chunk[i] = probs[lo * probs.cols() + i];
        }
        scores.push_back(inception_score(chunk));
    }
    SplitScore out;
    for (double s : scores) {
        out.mean += s;
    }
    out.mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) {
        var += (s - out.mean) * (s - out.mean);
    }
    out.stddev = scores.size() > 1 ? std::sqrt(var / static_cast<double>(scores.size() - 1)) : 0.0;
    return out;
}

GaussianSummary summarize_features(const Tensor& features) {
    const std::int64_t n = features.rows();
    const std::int64_t d = features.cols();
    if (n < 2) {
        throw MetricError("summarize_features: need at least 2 samples");
    }
    GaussianSummary s;
    s.count = n;
    s.mean = Tensor(1, d);
    kernels::sum_rows(features.data(), s.mean.data(), n, d);
    for (std::int64_t j = 0; j < d; ++j) {
        s.mean[j] /= static_cast<double>(n);
    }
    Tensor centered(n, d);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < d; ++j) {
            centered.at(i, j) = features.at(i, j) - s.mean[j];
        }
    }
    Tensor ct(d, n);
    kernels::transpose(centered.data(), ct.data(), n, d);
    s.cov = Tensor(d, d);
    kernels::matmul(ct.data(), centered.data(), s.cov.data(), d, n, d);
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (std::int64_t i = 0; i < d; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            const double sym = 0.5 * (s.cov.at(i, j) + s.cov.at(j, i)) * scale;
            s.cov.at(i, j) = sym;
            s.cov.at(j, i) = sym;
        }
    }
    return s;
}

Tensor matrix_sqrt_psd(const Tensor& a) {
    require_symmetric(a, 1e-10, "matrix_sqrt_psd");
    std::vector<double> eig;
    Tensor v;
    jacobi_eigen(a, eig, v);
    for (double& e : eig) {
        if (e < -1e-10) {
            throw MetricError("matrix_sqrt_psd: eigenvalue " + std::to_string(e) +
                              " below PSD tolerance");
        }
        e = e > 0.0 ? std::sqrt(e) : 0.0;
    }
    const std::int64_t n = a.rows();
    Tensor scaled(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            scaled.at(i, j) = v.at(i, j) * eig[static_cast<std::size_t>(j)];
        }
    }
    Tensor vt(n, n);
    kernels::transpose(v.data(), vt.data(), n, n);
    return matmul_t(scaled, vt);
}

double fid(const GaussianSummary& a, const GaussianSummary& b) {
    if (a.mean.cols() != b.mean.cols()) {
        throw MetricError("fid: dimension mismatch");
    }
    const std::int64_t d = a.mean.cols();
    double mean_sq = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
        const double diff = a.mean[j] - b.mean[j];
        mean_sq += diff * diff;
    }
    double trace_a = 0.0;
    double trace_b = 0.0;
    for (std::int64_t i = 0; i < d; ++i) {
        trace_a += a.cov.at(i, i);
        trace_b += b.cov.at(i, i);
    }
    // Tr((S_a S_b)^{1/2}) via the symmetric similar form A^{1/2} S_b A^{1/2}.
    Tensor sa = matrix_sqrt_psd(a.cov);
    Tensor m = matmul_t(matmul_t(sa, b.cov), sa);
    for (std::int64_t i = 0; i < d; ++i) {
        for (std::int64_t j = 0; j < i; ++j) {
            const double sym = 0.5 * (m.at(i, j) + m.at(j, i));
            m.at(i, j) = sym;
            m.at(j, i) = sym;
        }
    }
    std::vector<double> eig;
    Tensor v;
    jacobi_eigen(m, eig, v);
    double max_eig = 0.0;
    for (double e : eig) {
        max_eig = std::max(max_eig, std::fabs(e));
    }
    const double psd_tol = 1e-7 * std::max(1.0, max_eig);
    double trace_sqrt = 0.0;
    for (double e : eig) {
        if (e < -psd_tol) {
            throw MetricError("fid: product matrix not PSD within tolerance");
        }
        trace_sqrt += e > 0.0 ? std::sqrt(e) : 0.0;
    }
    const double value = mean_sq + trace_a + trace_b - 2.0 * trace_sqrt;
    return value > 0.0 ? value : 0.0;
}

RadiusHistogram radius_distribution(const Tensor& x, const Curvature& curv) {
    RadiusHistogram h;
    h.count = x.rows();
    if (x.rows() == 0) {
        return h;
    }
    std::vector<double> radii(static_cast<std::size_t>(x.rows()));
    for (std::int64_t i = 0; i < x.rows(); ++i) {
        const double* r = x.data() + i * x.cols();
        double nsq = 0.0;
        for (std::int64_t j = 0; j < x.cols(); ++j) {
            nsq += r[j] * r[j];
        }
        const double rad = std::tanh(curv.sqrt_c * std::sqrt(nsq));
        radii[static_cast<std::size_t>(i)] = rad;
        const int bin = std::min(99, static_cast<int>(rad * 100.0));
        h.bins[static_cast<std::size_t>(bin)] += 1;
    }
    std::sort(radii.begin(), radii.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(radii.size() - 1);
        return radii[static_cast<std::size_t>(std::llround(pos))];
    };
    h.min = radii.front();
    h.q25 = quantile(0.25);
    h.median = quantile(0.5);
    h.q75 = quantile(0.75);
    h.max = radii.back();
    return h;
}

}  // namespace hypgan
