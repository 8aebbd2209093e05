#include "hypgan/tensor.hpp"

#include <cmath>

namespace hypgan {

Tensor::Tensor(std::int64_t rows, std::int64_t cols) : Tensor(rows, cols, 0.0) {}

Tensor::Tensor(std::int64_t rows, std::int64_t cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {
    if (rows < 0 || cols < 0) {
        throw ShapeError("negative tensor extent");
    }
}

Tensor::Tensor(std::int64_t rows, std::int64_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows < 0 || cols < 0 || static_cast<std::int64_t>(data_.size()) != rows * cols) {
        throw ShapeError("tensor data length does not match shape " + shape_str());
    }
}

Tensor Tensor::row(std::initializer_list<double> values) {
    return {1, static_cast<std::int64_t>(values.size()), std::vector<double>(values)};
}

Tensor Tensor::identity(std::int64_t n) {
    Tensor t(n, n, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        t.at(i, i) = 1.0;
    }
    return t;
}

double Tensor::item() const {
    if (numel() != 1) {
        throw ShapeError("item() on non-scalar tensor " + shape_str());
    }
    return data_[0];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

std::string Tensor::shape_str() const {
    return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
    }
}

}  // namespace hypgan
