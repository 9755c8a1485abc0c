#ifndef PREDRISK_RNG_HPP
#define PREDRISK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Seeded, splittable random number generation. Each (seed, stream_id) pair
// yields an independent xoshiro256++ stream; replicate r of trial t uses
// stream_id = t*R + r, which makes every Monte Carlo result independent of
// thread count and execution order.

namespace predrisk {

struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

namespace detail {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// xoshiro256++ stream generator, seeded deterministically from (seed, stream_id).
class Rng {
  public:
    explicit Rng(RngState state) {
        std::uint64_t base = state.seed ^ detail::mix64(state.stream_id * 0x9E3779B97F4A7C15ULL
                                                        + 0xD1B54A32D192ED03ULL);
        for (auto& word : s_) word = detail::splitmix64_step(base);
        have_spare_normal_ = false;
        spare_normal_ = 0.0;
    }

    std::uint64_t next_u64() {
        std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    /// Uniform in (0,1].
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_normal_) {
            have_spare_normal_ = false;
            return spare_normal_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_normal_ = r * std::sin(theta);
        have_spare_normal_ = true;
        return r * std::cos(theta);
    }

    /// Gamma(shape, scale 1), Marsaglia-Tsang; the shape < 1 case goes through
    /// the Gamma(shape+1) boost with a U^{1/shape} correction.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape must be positive");
        if (shape < 1.0) {
            double u = uniform_pos();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Chi-square with (possibly non-integer) positive dof.
    double chi_square(double dof) {
        if (!(dof > 0.0)) throw std::domain_error("Rng::chi_square: dof must be positive");
        return 2.0 * gamma(0.5 * dof);
    }

    /// Poisson(mean), exact. Large means are drawn as sums of chunks with
    /// mean <= 16 so the Knuth product method never underflows.
    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw std::domain_error("Rng::poisson: mean must be nonnegative");
        std::uint64_t total = 0;
        while (mean > 16.0) {
            total += poisson_knuth(16.0);
            mean -= 16.0;
        }
        return total + poisson_knuth(mean);
    }

  private:
    std::uint64_t poisson_knuth(double mean) {
        if (mean <= 0.0) return 0;
        double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t s_[4];
    bool have_spare_normal_;
    double spare_normal_;
};

} // namespace predrisk

#endif // PREDRISK_RNG_HPP
