// Compares the OpenMP kernels against the serial reference and reports
// throughput plus the bitwise-equality guarantee the tests rely on.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "hypgan/kernels.hpp"
#include "hypgan/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F f) {
    double best = 1e100;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void bench_matmul(std::int64_t m, std::int64_t k, std::int64_t n, int reps) {
    hypgan::RngState rng(42);
    std::vector<double> a(static_cast<std::size_t>(m * k));
    std::vector<double> b(static_cast<std::size_t>(k * n));
    std::vector<double> c_par(static_cast<std::size_t>(m * n));
    std::vector<double> c_ser(static_cast<std::size_t>(m * n));
    rng.fill_gaussian(a.data(), a.size());
    rng.fill_gaussian(b.data(), b.size());

    const double t_ser = time_best_of(
        reps, [&] { hypgan::kernels::serial::matmul(a.data(), b.data(), c_ser.data(), m, k, n); });
    const double t_par = time_best_of(
        reps, [&] { hypgan::kernels::matmul(a.data(), b.data(), c_par.data(), m, k, n); });
    const bool bitwise =
        std::memcmp(c_par.data(), c_ser.data(), c_par.size() * sizeof(double)) == 0;
    const double flops = 2.0 * static_cast<double>(m) * k * n;
    std::printf("matmul %5lldx%5lldx%5lld  serial %7.2f ms (%5.2f GF/s)  omp %7.2f ms (%5.2f "
                "GF/s)  speedup %4.2fx  bitwise %s\n",
                static_cast<long long>(m), static_cast<long long>(k), static_cast<long long>(n),
                t_ser * 1e3, flops / t_ser * 1e-9, t_par * 1e3, flops / t_par * 1e-9,
                t_ser / t_par, bitwise ? "yes" : "NO");
}

void bench_map(std::int64_t n, int reps) {
    hypgan::RngState rng(7);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    rng.fill_gaussian(x.data(), x.size());
    auto f = [](double v) { return std::tanh(v); };
    const double t_ser =
        time_best_of(reps, [&] { hypgan::kernels::serial::map(x.data(), y.data(), n, f); });
    const double t_par = time_best_of(reps, [&] { hypgan::kernels::map(x.data(), y.data(), n, f); });
    std::printf("tanh map %10lld       serial %7.2f ms             omp %7.2f ms             "
                "speedup %4.2fx\n",
                static_cast<long long>(n), t_ser * 1e3, t_par * 1e3, t_ser / t_par);
}

void bench_sum(std::int64_t n, int reps) {
    hypgan::RngState rng(9);
    std::vector<double> x(static_cast<std::size_t>(n));
    rng.fill_gaussian(x.data(), x.size());
    double sink = 0.0;
    const double t_ser =
        time_best_of(reps, [&] { sink += hypgan::kernels::serial::sum_all(x.data(), n); });
    const double t_par = time_best_of(reps, [&] { sink += hypgan::kernels::sum_all(x.data(), n); });
    std::printf("sum       %10lld       serial %7.2f ms             omp %7.2f ms             "
                "speedup %4.2fx   (%.3g)\n",
                static_cast<long long>(n), t_ser * 1e3, t_par * 1e3, t_ser / t_par, sink);
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    bench_matmul(64, 784, 1024, reps);   // discriminator first layer at batch 64
    bench_matmul(64, 1024, 784, reps);   // generator last layer
    bench_matmul(256, 512, 512, reps);
    bench_map(1 << 20, reps);
    bench_sum(1 << 20, reps);
    return 0;
}
