#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace momgraph {

// SplitMix64 (Steele, Lea & Flood 2014). The state advances by the golden
// gamma 0x9e3779b97f4a7c15 and each output is the state passed through the
// variant-13 finalizer, so the generator is a pure function of
// (seed, draw index) and reproduces bit-exactly on every platform.
// Independent streams are derived by hashing a seed with integer tags.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Seed for the sub-stream identified by `tags`, e.g. (seed, block_a, block_b).
    static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept {
        std::uint64_t h = mix(seed + kGamma);
        for (std::uint64_t t : tags) h = mix(h ^ mix(t + kGamma));
        return h;
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0,1).
    double uniform_open() noexcept {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    // Number of failures before the next success of a Bernoulli(p) sequence,
    // by inversion: floor(log U / log(1-p)). Returns max() when p == 0.
    std::uint64_t geometric_skip(double p) noexcept {
        if (p >= 1.0) return 0;
        if (p <= 0.0) return max();
        const double g = std::floor(std::log(uniform_open()) / std::log1p(-p));
        if (!(g < 1.8e19)) return max();
        return static_cast<std::uint64_t>(g);
    }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

private:
    std::uint64_t state_;
};

}  // namespace momgraph
