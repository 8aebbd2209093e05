#pragma once

#include <cstddef>
#include <cstdint>

namespace hypgan {

// Counter-based random stream: output i is a pure function of (seed, counter+i),
// so identical seed + identical call sequence reproduces identical values on any
// platform with IEEE-754 doubles.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    RngState() = default;
    explicit RngState(std::uint64_t s) : seed(s) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_uniform();

    // Uniform in (0, 1]; safe as a log() argument.
    double next_uniform_open();

    // Standard normal via Box-Muller. Consumes two uniforms per pair of outputs
    // (an odd tail consumes two and discards the second output).
    double next_gaussian();
    void fill_gaussian(double* out, std::size_t n);

    // Uniform in [0, bound) for index shuffling.
    std::uint64_t next_below(std::uint64_t bound);

    // Derive an independent stream (for per-cell / per-eval substreams).
    RngState split(std::uint64_t stream_id) const;
};

}  // namespace hypgan
