#pragma once

#include <cstdint>
#include <random>

namespace gamectl {

/// Seedable 64-bit generator with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The standard distributions are not (their algorithms are
/// implementation-defined), so the two draw primitives are spelled out here:
///   uniform()  -> (next() >> 11) * 2^-53, a double in [0, 1)
///   below(n)   -> Lemire's multiply-shift with rejection, unbiased in [0, n)
/// Together they make ABM trajectories reproducible across compilers.
__extension__ using uint128 = unsigned __int128;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n) {
        uint128 m = static_cast<uint128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<uint128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace gamectl
