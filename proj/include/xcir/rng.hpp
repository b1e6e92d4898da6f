#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace xcir {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/*! Seedable random source. Every sampler in the library takes an Rng&
    explicitly; nothing draws from hidden global state.

    Parallel work derives one stream per chunk via stream(master, index):
    the master seed and the chunk counter are mixed through splitmix64,
    so streams are reproducible and independent of thread scheduling. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = detail::splitmix64(s);
        s ^= 0x9E3779B97F4A7C15ULL * (stream_index + 1);
        std::uint64_t b = detail::splitmix64(s);
        return Rng(a ^ b);
    }

    // uniform on the open interval (0,1); never returns an endpoint
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return std::normal_distribution<double>()(gen_); }

    // Gamma(shape, rate); shape == 0 is the unit mass at zero
    double gamma(double shape, double rate) {
        if (!(shape >= 0.0) || !(rate > 0.0))
            throw std::invalid_argument("Rng::gamma: need shape >= 0, rate > 0");
        if (shape == 0.0) return 0.0;
        return std::gamma_distribution<double>(shape, 1.0 / rate)(gen_);
    }

    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0))
            throw std::invalid_argument("Rng::poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean > 1e15) {
            // beyond any statistical resolution; Gaussian limit
            double k = mean + std::sqrt(mean) * normal();
            return k <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(k));
        }
        return std::poisson_distribution<std::uint64_t>(mean)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

} // namespace xcir
