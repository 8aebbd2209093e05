#pragma once

#include <cstdint>

namespace hypgan::kernels {

// Parallel kernels (OpenMP when compiled in). Every output element is
// accumulated in a fixed order independent of the thread count, so results
// are bit-identical across runs and thread configurations, and bit-identical
// to the serial reference below.

inline constexpr std::int64_t kElementwiseGrain = 1 << 14;

// C[m x n] = A[m x k] * B[k x n]; C must not alias A or B.
void matmul(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
            std::int64_t n);

// B[n x m] = transpose(A[m x n]).
void transpose(const double* a, double* b, std::int64_t m, std::int64_t n);

// Deterministic blocked total: fixed 1024-element blocks combined in index order.
double sum_all(const double* x, std::int64_t n);

// out[j] = sum_i x[i*cols + j]  (column sums, a 1 x cols row).
void sum_rows(const double* x, double* out, std::int64_t rows, std::int64_t cols);

// out[i] = sum_j x[i*cols + j]  (row sums, a rows x 1 column).
void sum_cols(const double* x, double* out, std::int64_t rows, std::int64_t cols);

template <class F>
void map(const double* x, double* dst, std::int64_t n, F f) {
#pragma omp parallel for if (n >= kElementwiseGrain)
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = f(x[i]);
    }
}

template <class F>
void zip(const double* a, const double* b, double* dst, std::int64_t n, F f) {
#pragma omp parallel for if (n >= kElementwiseGrain)
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = f(a[i], b[i]);
    }
}

// Serial reference implementations, kept for equivalence tests and the
// kernel benchmark. Same per-element arithmetic order as the parallel path.
namespace serial {

void matmul(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
            std::int64_t n);
void transpose(const double* a, double* b, std::int64_t m, std::int64_t n);
double sum_all(const double* x, std::int64_t n);
void sum_rows(const double* x, double* out, std::int64_t rows, std::int64_t cols);
void sum_cols(const double* x, double* out, std::int64_t rows, std::int64_t cols);

template <class F>
void map(const double* x, double* dst, std::int64_t n, F f) {
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = f(x[i]);
    }
}

template <class F>
void zip(const double* a, const double* b, double* dst, std::int64_t n, F f) {
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = f(a[i], b[i]);
    }
}

}  // namespace serial

}  // namespace hypgan::kernels
