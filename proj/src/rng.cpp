#include "hypgan/rng.hpp"

#include <cmath>

namespace hypgan {

namespace {

// splitmix64 output mix; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t RngState::next_u64() {
    ++counter;
    return mix64(seed + counter * kGolden);
}

double RngState::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::next_uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngState::next_gaussian() {
    const double u1 = next_uniform_open();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

void RngState::fill_gaussian(double* out, std::size_t n) {
    std::size_t i = 0;
    while (i + 1 < n) {
        const double u1 = next_uniform_open();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        out[i] = r * std::cos(th);
        out[i + 1] = r * std::sin(th);
        i += 2;
    }
    if (i < n) {
        out[i] = next_gaussian();
    }
}

std::uint64_t RngState::next_below(std::uint64_t bound) {
    // Lemire multiply-shift; bias is O(bound / 2^64), irrelevant here.
    const unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
    return static_cast<std::uint64_t>(m >> 64);
}

RngState RngState::split(std::uint64_t stream_id) const {
    RngState s;
    s.seed = mix64(seed ^ mix64(stream_id + kGolden));
    return s;
}

}  // namespace hypgan
