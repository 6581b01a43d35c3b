#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sdecoup {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Deterministic pseudo-random stream: splitmix64 sequence plus a
/// 128-layer ziggurat for standard normals.
class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        return splitmix64_mix(z);
    }

    /// Uniform on [0,1), 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1], safe as a log() argument.
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal draw (Marsaglia/Tsang ziggurat, 128 layers).
    double normal() {
        const Tables& t = tables();
        for (;;) {
            const std::uint64_t bits = next_u64();
            const int i = int(bits & 127);
            const bool neg = (bits >> 7) & 1;
            const double u = double(bits >> 11) * 0x1.0p-53;
            const double x = u * t.x[i];
            if (x < t.x[i + 1]) return neg ? -x : x;
            if (i == 0) {
                // tail beyond r
                double a, b;
                do {
                    a = -std::log(uniform_pos()) / Tables::r;
                    b = -std::log(uniform_pos());
                } while (b + b < a * a);
                return neg ? -(Tables::r + a) : (Tables::r + a);
            }
            const double y = t.f[i] + uniform() * (t.f[i + 1] - t.f[i]);
            if (y < std::exp(-0.5 * x * x)) return neg ? -x : x;
        }
    }

private:
    struct Tables {
        // r and v are the classic 128-layer constants: r is the base-strip
        // abscissa, v the common layer area under exp(-x^2/2).
        static constexpr double r = 3.442619855899;
        static constexpr double v = 9.91256303526217e-3;
        double x[129];
        double f[129];
        Tables() {
            x[0] = v / std::exp(-0.5 * r * r);
            x[1] = r;
            for (int i = 2; i < 128; ++i)
                x[i] = std::sqrt(-2.0 * std::log(v / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1])));
            x[128] = 0.0;
            for (int i = 0; i <= 128; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
        }
    };
    static const Tables& tables() {
        static const Tables t;
        return t;
    }

    std::uint64_t state_;
};

/// Counter-based stream coordinates: (master seed, experiment tag,
/// replication index) identify a reproducible, statistically independent
/// stream. Execution order never changes the draws a replication sees.
struct SeedStream {
    std::uint64_t master = 0;
    std::string_view tag = {};
    std::uint64_t replication = 0;

    std::uint64_t key() const {
        std::uint64_t k = splitmix64_mix(master + 0x9E3779B97F4A7C15ULL);
        k = splitmix64_mix(k ^ fnv1a64(tag));
        k = splitmix64_mix(k ^ (replication * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
        return k;
    }
    Rng rng() const { return Rng(key()); }
};

} // namespace sdecoup
