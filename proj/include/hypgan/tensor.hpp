#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypgan {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix of 64-bit floats. Scalars are 1x1, row vectors 1xn.
// Every public operation in the library keeps elements finite; NaN/Inf is
// reported as an error, never returned silently.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::int64_t rows, std::int64_t cols);
    Tensor(std::int64_t rows, std::int64_t cols, double fill);
    Tensor(std::int64_t rows, std::int64_t cols, std::vector<double> data);

    static Tensor zeros(std::int64_t rows, std::int64_t cols) { return {rows, cols, 0.0}; }
    static Tensor full(std::int64_t rows, std::int64_t cols, double v) { return {rows, cols, v}; }
    static Tensor scalar(double v) { return {1, 1, v}; }
    static Tensor row(std::initializer_list<double> values);
    static Tensor identity(std::int64_t n);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    std::int64_t numel() const { return rows_ * cols_; }
    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& at(std::int64_t r, std::int64_t c) { return data_[r * cols_ + c]; }
    double at(std::int64_t r, std::int64_t c) const { return data_[r * cols_ + c]; }
    double& operator[](std::int64_t i) { return data_[i]; }
    double operator[](std::int64_t i) const { return data_[i]; }

    // Value of a 1x1 tensor; throws on anything else.
    double item() const;

    bool all_finite() const;
    std::string shape_str() const;

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<double> data_;
};

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace hypgan
