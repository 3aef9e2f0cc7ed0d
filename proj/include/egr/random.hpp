#pragma once

// Counter-based random streams. Each (seed, index) pair gets its own
// splitmix64 sequence, so draws do not depend on thread count or on how many
// values an earlier index consumed. Distributions are implemented here rather
// than taken from <random>, whose algorithms differ between standard libraries.

#include <cmath>
#include <cstdint>
#include <limits>

namespace growth {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ull))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal, Marsaglia polar method.
    double normal() noexcept {
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

    /// log of a Gamma(shape, 1) draw. Marsaglia-Tsang squeeze; shapes below one
    /// use G(a) = G(a+1) U^{1/a}, kept in log form so tiny shapes do not
    /// underflow to zero.
    double log_gamma_variate(double shape) noexcept {
        if (shape < 1.0) {
            const double lu = std::log(uniform());
            return log_gamma_variate(shape + 1.0) + lu / shape;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
        }
    }

    /// Gamma with shape a and rate b.
    double gamma(double shape, double rate) noexcept { return std::exp(log_gamma_variate(shape)) / rate; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace growth
