#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace darcy {

/// SplitMix64 scrambler, used to decorrelate nearby integer seeds before
/// they reach the engine.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Reproducible random source: mt19937_64 plus an explicit Box-Muller
/// transform. The standard library's normal_distribution is
/// implementation-defined, so normals are generated here to keep streams
/// identical across toolchains. Each normal pair consumes exactly two
/// engine outputs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Derived stream for sample `index` of a family rooted at `base`.
    static Rng stream(std::uint64_t base, std::uint64_t index) { return Rng(base + index); }

    /// Uniform on (0,1), never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    /// Independent standard normal pair (Box-Muller).
    std::pair<double, double> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [z0, z1] = normal_pair();
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace darcy
