#include "hypgan/kernels.hpp"

#include <vector>

namespace hypgan::kernels {

namespace {
constexpr std::int64_t kSumBlock = 1024;
constexpr std::int64_t kMatmulGrain = 1 << 15;
}  // namespace

void matmul(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
            std::int64_t n) {
    // i-k-j order: row c[i] accumulates b rows scaled by a[i][k], k ascending.
    // Each c[i][j] sees the same addition order as the serial reference, so the
    // result is bitwise reproducible for any thread count.
#pragma omp parallel for schedule(static) if (m * k * n >= kMatmulGrain)
    for (std::int64_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        for (std::int64_t j = 0; j < n; ++j) {
            ci[j] = 0.0;
        }
        const double* ai = a + i * k;
        for (std::int64_t kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            const double* bk = b + kk * n;
            for (std::int64_t j = 0; j < n; ++j) {
                ci[j] += aik * bk[j];
            }
        }
    }
}

void transpose(const double* a, double* b, std::int64_t m, std::int64_t n) {
#pragma omp parallel for schedule(static) if (m * n >= kElementwiseGrain)
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            b[j * m + i] = a[i * n + j];
        }
    }
}

double sum_all(const double* x, std::int64_t n) {
    const std::int64_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    if (nblocks <= 1) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            acc += x[i];
        }
        return acc;
    }
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static) if (n >= kElementwiseGrain)
    for (std::int64_t bidx = 0; bidx < nblocks; ++bidx) {
        const std::int64_t lo = bidx * kSumBlock;
        const std::int64_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
        double acc = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            acc += x[i];
        }
        partial[static_cast<std::size_t>(bidx)] = acc;
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

void sum_rows(const double* x, double* out, std::int64_t rows, std::int64_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols >= kElementwiseGrain)
    for (std::int64_t j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < rows; ++i) {
            acc += x[i * cols + j];
        }
        out[j] = acc;
    }
}

void sum_cols(const double* x, double* out, std::int64_t rows, std::int64_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols >= kElementwiseGrain)
    for (std::int64_t i = 0; i < rows; ++i) {
        const double* xi = x + i * cols;
        double acc = 0.0;
        for (std::int64_t j = 0; j < cols; ++j) {
            acc += xi[j];
        }
        out[i] = acc;
    }
}

namespace serial {

void matmul(const double* a, const double* b, double* c, std::int64_t m, std::int64_t k,
            std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        for (std::int64_t j = 0; j < n; ++j) {
            ci[j] = 0.0;
        }
        const double* ai = a + i * k;
        for (std::int64_t kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            const double* bk = b + kk * n;
            for (std::int64_t j = 0; j < n; ++j) {
                ci[j] += aik * bk[j];
            }
        }
    }
}

void transpose(const double* a, double* b, std::int64_t m, std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            b[j * m + i] = a[i * n + j];
        }
    }
}

double sum_all(const double* x, std::int64_t n) {
    const std::int64_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    double total = 0.0;
    for (std::int64_t bidx = 0; bidx < nblocks; ++bidx) {
        const std::int64_t lo = bidx * kSumBlock;
        const std::int64_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
        double acc = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            acc += x[i];
        }
        total += acc;
    }
    return total;
}

void sum_rows(const double* x, double* out, std::int64_t rows, std::int64_t cols) {
    for (std::int64_t j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < rows; ++i) {
            acc += x[i * cols + j];
        }
        out[j] = acc;
    }
}

void sum_cols(const double* x, double* out, std::int64_t rows, std::int64_t cols) {
    for (std::int64_t i = 0; i < rows; ++i) {
        const double* xi = x + i * cols;
        double acc = 0.0;
        for (std::int64_t j = 0; j < cols; ++j) {
            acc += xi[j];
        }
        out[i] = acc;
    }
}

}  // namespace serial

}  // namespace hypgan::kernels
