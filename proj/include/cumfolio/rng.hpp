#ifndef CUMFOLIO_RNG_HPP
#define CUMFOLIO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace cumfolio {

/// Seeded random generator with self-contained variate transforms.
///
/// The normal and exponential transforms are written out explicitly
/// (instead of std::*_distribution) so a given seed produces the same
/// stream on every standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t integer() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Marsaglia's polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate = 1.0) {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return -std::log(u) / rate;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cumfolio

#endif  // CUMFOLIO_RNG_HPP
