#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qmetric {

// splitmix64 (Steele, Lea, Vigna). Used to expand 64-bit seeds into engine
// state and to derive child seeds deterministically.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Worker/work-item streams use base_seed ^ index; the xor result is expanded
// through splitmix64 so neighboring seeds give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return base ^ index;
}

// Deeper derivations (trial -> level -> probe) mix the tag multiplicatively
// first so that xor chains cannot collide.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t x = base ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
    return splitmix64(x);
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
// Self-contained so that every platform and standard library produces the
// same stream for the same seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased integer in [0, n) (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        unsigned __int128 m = (unsigned __int128)next_u64() * n;
        auto lo = (std::uint64_t)m;
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = (unsigned __int128)next_u64() * n;
                lo = (std::uint64_t)m;
            }
        }
        return (std::uint64_t)(m >> 64);
    }

    // Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Exact binomial sampling: CDF inversion when the mean is small,
    // Hormann's BTRS transformed rejection otherwise.
    std::int64_t binomial(std::int64_t n, double p);

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::int64_t binomial_inversion(std::int64_t n, double p);
    std::int64_t binomial_btrs(std::int64_t n, double p);

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// --- binomial implementation -------------------------------------------------

namespace detail {

// log(k!) correction to the Stirling approximation, as used by BTRS.
inline double stirling_tail(std::int64_t k) {
    static const double table[10] = {
        0.08106146679532726, 0.04134069595540929, 0.02767792568499834,
        0.02079067210376509, 0.01664469118982119, 0.01387612882307075,
        0.01189670994589177, 0.01041126526197209, 0.009255462182712733,
        0.008330563433362871};
    if (k < 10) return table[k];
    const double kp = double(k) + 1.0;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * kp * kp)) / (kp * kp)) / kp;
}

}  // namespace detail

inline std::int64_t Rng::binomial_inversion(std::int64_t n, double p) {
    // Sequential search over the CDF; O(np) expected, used only for small means.
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = double(n + 1) * s;
    double r = std::pow(q, double(n));
    double u = uniform();
    std::int64_t x = 0;
    while (u > r) {
        u -= r;
        ++x;
        if (x > n) {  // guard against fp underflow of r
            return n;
        }
        r *= (a / double(x)) - s;
    }
    return x;
}

inline std::int64_t Rng::binomial_btrs(std::int64_t n, double p) {
    // Hormann (1993), "The generation of binomial random variates", BTRS.
    // Requires n*p >= 10 and p <= 0.5.
    const double np = double(n) * p;
    const double q = 1.0 - p;
    const double spq = std::sqrt(np * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = np + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double r = p / q;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor(double(n + 1) * p);

    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > double(n)) continue;
        if (us >= 0.07 && v <= vr) return std::int64_t(kd);

        const double k = kd;
        v = std::log(v * alpha / (a / (us * us) + b));
        const double ub =
            (m + 0.5) * std::log((m + 1.0) / (r * (double(n) - m + 1.0))) +
            (double(n) + 1.0) * std::log((double(n) - m + 1.0) / (double(n) - k + 1.0)) +
            (k + 0.5) * std::log(r * (double(n) - k + 1.0) / (k + 1.0)) +
            detail::stirling_tail(std::int64_t(m)) + detail::stirling_tail(n - std::int64_t(m)) -
            detail::stirling_tail(std::int64_t(k)) - detail::stirling_tail(n - std::int64_t(k));
        if (v <= ub) return std::int64_t(kd);
    }
}

inline std::int64_t Rng::binomial(std::int64_t n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0 || !std::isfinite(p))
        throw std::invalid_argument("Rng::binomial: bad parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    std::int64_t x;
    if (double(n) * pp < 10.0)
        x = binomial_inversion(n, pp);
    else
        x = binomial_btrs(n, pp);
    return flip ? n - x : x;
}

}  // namespace qmetric
