#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "darcy/errors.hpp"

namespace darcy {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Integer wavevector. Unused trailing components are zero.
using Wavevector = std::array<int, 3>;

inline int abs_sq(const Wavevector& k, int d) {
    int s = 0;
    for (int i = 0; i < d; ++i) s += k[i] * k[i];
    return s;
}

/// Uniform periodic grid on [0,2pi)^d with n points per axis, n a power of
/// two. Row-major storage, last axis fastest.
struct GridSpec {
    int d = 1;
    int n = 8;

    GridSpec() = default;
    GridSpec(int d_, int n_) : d(d_), n(n_) {
        if (d < 1 || d > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
        if (n < 8 || (n & (n - 1)) != 0) throw ValidationError("grid points per axis must be a power of two >= 8");
    }

    double spacing() const { return two_pi / n; }

    std::size_t num_points() const {
        std::size_t p = 1;
        for (int i = 0; i < d; ++i) p *= static_cast<std::size_t>(n);
        return p;
    }

    /// Grid coordinate of multi-index component j.
    double coord(int j) const { return spacing() * j; }

    bool operator==(const GridSpec&) const = default;
};

/// Decompose flat row-major index into per-axis indices.
inline std::array<int, 3> unflatten(const GridSpec& g, std::size_t flat) {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = g.d - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % g.n);
        flat /= g.n;
    }
    return idx;
}

inline std::size_t flatten(const GridSpec& g, const std::array<int, 3>& idx) {
    std::size_t flat = 0;
    for (int a = 0; a < g.d; ++a) flat = flat * g.n + static_cast<std::size_t>(idx[a]);
    return flat;
}

/// Signed frequency of FFT bin b, in (-n/2, n/2].
inline int bin_to_freq(int b, int n) { return b <= n / 2 ? b : b - n; }

/// FFT bin of signed frequency k in (-n/2, n/2].
inline int freq_to_bin(int k, int n) { return k >= 0 ? k : k + n; }

/// Shortest periodic distance between two grid points given index offsets.
inline double torus_distance(const GridSpec& g, const std::array<int, 3>& di) {
    double s = 0;
    for (int a = 0; a < g.d; ++a) {
        int m = di[a] % g.n;
        if (m < 0) m += g.n;
        m = std::min(m, g.n - m);
        double dx = m * g.spacing();
        s += dx * dx;
    }
    return std::sqrt(s);
}

/// True if k is the canonical representative of the conjugate pair {k,-k}:
/// the first nonzero component is positive.
inline bool is_representative(const Wavevector& k, int d) {
    for (int i = 0; i < d; ++i) {
        if (k[i] > 0) return true;
        if (k[i] < 0) return false;
    }
    return false;  // zero vector
}

/// All wavevectors of the cube {k : |k_i| <= N, k != 0} in lexicographic
/// order, restricted to conjugate-pair representatives. This is the mode
/// order contract used everywhere random numbers are consumed.
inline std::vector<Wavevector> representative_modes(int d, int N) {
    if (N < 1) throw ValidationError("truncation level must be >= 1");
    std::vector<Wavevector> out;
    Wavevector k{0, 0, 0};
    std::array<int, 3> lo{-N, -N, -N}, hi{N, N, N};
    for (int i = d; i < 3; ++i) lo[i] = hi[i] = 0;
    for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
        for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
            for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2])
                if (is_representative(k, d)) out.push_back(k);
    return out;
}

}  // namespace darcy
