#pragma once

#include <string>
#include <vector>

#include "hypgan/rng.hpp"
#include "hypgan/tensor.hpp"

namespace hypgan {

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Vectorized images N x 784 with pixels mapped to [-1, 1] (p/127.5 - 1,
// matching the generator's Tanh range) plus integer labels in [0, 9].
struct Dataset {
    Tensor images;
    std::vector<int> labels;

    std::int64_t size() const { return images.rows(); }
};

// IDX format: big-endian u32 magic 2051 (images: count, rows=28, cols=28,
// then count*784 bytes) / 2049 (labels: count, then count bytes). Gzip input
// is detected by its two-byte signature and inflated transparently.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

// Writes uncompressed IDX files; load followed by save reproduces the input
// byte-for-byte (modulo gzip framing).
void save_mnist_idx(const Dataset& ds, const std::string& images_path,
                    const std::string& labels_path);

Dataset take_subset(const Dataset& ds, std::int64_t n);

Tensor one_hot(const std::vector<int>& labels, int num_classes = 10);

// i.i.d. standard normal entries, B x dim.
Tensor sample_noise(std::int64_t batch, std::int64_t dim, RngState& rng);

// One epoch of shuffled batches: a seeded permutation of [0, n) chopped into
// batch-size chunks; the final short batch is included.
std::vector<std::vector<std::int64_t>> epoch_batches(std::int64_t n, std::int64_t batch_size,
                                                     RngState& rng);

struct Batch {
    Tensor images;
    Tensor labels_one_hot;
    std::vector<int> labels;
};

Batch gather(const Dataset& ds, const std::vector<std::int64_t>& indices);

}  // namespace hypgan
