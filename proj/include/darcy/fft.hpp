#pragma once

#include <complex>
#include <unordered_map>
#include <vector>

#include "darcy/field.hpp"
#include "darcy/grid.hpp"

namespace darcy {

/// Fourier coefficients of a real field, indexed by FFT bin (row-major over
/// bins, last axis fastest). Value convention: f(x_j) = sum_k F_k e^{i k.x_j}
/// with signed frequencies k in (-n/2, n/2], so dft_inverse is a plain sum.
struct SpectralField {
    GridSpec grid;
    std::vector<std::complex<double>> coefficients;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coefficients(g.num_points()) {}

    std::complex<double>& at(const Wavevector& k) {
        return coefficients[bin_index(k)];
    }
    std::complex<double> at(const Wavevector& k) const {
        return coefficients[bin_index(k)];
    }

    std::size_t bin_index(const Wavevector& k) const {
        std::array<int, 3> b{0, 0, 0};
        for (int a = 0; a < grid.d; ++a) b[a] = freq_to_bin(k[a], grid.n);
        return flatten(grid, b);
    }
};

namespace detail {

/// Radix-2 plan: bit-reversal table and quarter-wave twiddles for length n.
struct FftPlan {
    int n = 0;
    std::vector<int> bitrev;
    std::vector<std::complex<double>> w;  // w[j] = exp(-2pi i j / n), j < n/2

    explicit FftPlan(int n_) : n(n_), bitrev(n_), w(n_ / 2) {
        int bits = 0;
        while ((1 << bits) < n) ++bits;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < bits; ++b)
                if (i & (1 << b)) r |= 1 << (bits - 1 - b);
            bitrev[i] = r;
        }
        for (int j = 0; j < n / 2; ++j) {
            const double a = -two_pi * j / n;
            w[j] = {std::cos(a), std::sin(a)};
        }
    }
};

inline const FftPlan& plan_for(int n) {
    thread_local std::unordered_map<int, FftPlan> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, FftPlan(n)).first;
    return it->second;
}

/// In-place contiguous radix-2 transform; inverse uses conjugated twiddles
/// and applies no scaling.
inline void fft(std::complex<double>* a, const FftPlan& p, bool inverse) {
    const int n = p.n;
    for (int i = 0; i < n; ++i) {
        const int r = p.bitrev[i];
        if (i < r) std::swap(a[i], a[r]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len >> 1;
        const int tstep = n / len;
        for (int start = 0; start < n; start += len) {
            for (int j = 0; j < half; ++j) {
                std::complex<double> w = p.w[j * tstep];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[start + j];
                const std::complex<double> t = w * a[start + j + half];
                a[start + j] = u + t;
                a[start + j + half] = u - t;
            }
        }
    }
}

/// Transform every line of a d-dimensional array along one axis.
inline void transform_axis(std::vector<std::complex<double>>& data, const GridSpec& g, int axis,
                           bool inverse) {
    const int n = g.n;
    const FftPlan& p = plan_for(n);
    std::size_t stride = 1;
    for (int a = g.d - 1; a > axis; --a) stride *= n;

    if (stride == 1) {
        for (std::size_t off = 0; off < data.size(); off += n) fft(&data[off], p, inverse);
        return;
    }
    std::vector<std::complex<double>> line(n);
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < data.size(); base += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            std::complex<double>* src = &data[base + inner];
            for (int j = 0; j < n; ++j) line[j] = src[j * stride];
            fft(line.data(), p, inverse);
            for (int j = 0; j < n; ++j) src[j * stride] = line[j];
        }
    }
}

inline void transform_all(std::vector<std::complex<double>>& data, const GridSpec& g, bool inverse) {
    for (int a = 0; a < g.d; ++a) transform_axis(data, g, a, inverse);
}

}  // namespace detail

inline SpectralField dft_forward(const Field& f) {
    SpectralField out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.coefficients[i] = f[i];
    detail::transform_all(out.coefficients, f.grid, /*inverse=*/false);
    const double scale = 1.0 / static_cast<double>(f.grid.num_points());
    for (auto& c : out.coefficients) c *= scale;
    return out;
}

inline Field dft_inverse(const SpectralField& F) {
    std::vector<std::complex<double>> data = F.coefficients;
    detail::transform_all(data, F.grid, /*inverse=*/true);
    Field out(F.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = data[i].real();
    return out;
}

/// Parseval sum (2pi)^d sum_k |F_k|^2; equals l2_norm(f)^2.
inline double spectral_l2_sq(const SpectralField& F) {
    double s = 0;
    for (const auto& c : F.coefficients) s += std::norm(c);
    return s * std::pow(two_pi, F.grid.d);
}

/// Spectral H1 norm sqrt(sum_k (1+|k|^2) |fhat_k|^2) with L2-normalized
/// coefficients fhat_k = (2pi)^{d/2} F_k.
inline double h1_norm(const Field& f) {
    const SpectralField F = dft_forward(f);
    const GridSpec& g = f.grid;
    double s = 0;
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        const auto b = unflatten(g, i);
        int k2 = 0;
        for (int a = 0; a < g.d; ++a) {
            const int k = bin_to_freq(b[a], g.n);
            k2 += k * k;
        }
        s += (1.0 + k2) * std::norm(F.coefficients[i]);
    }
    return std::sqrt(s * std::pow(two_pi, g.d));
}

/// Zero every coefficient outside the cube {|k_i| <= N}; inverse transform.
inline Field band_limit(const Field& f, int N) {
    SpectralField F = dft_forward(f);
    const GridSpec& g = f.grid;
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        const auto b = unflatten(g, i);
        for (int a = 0; a < g.d; ++a) {
            const int k = bin_to_freq(b[a], g.n);
            if (k < -N || k > N) {
                F.coefficients[i] = 0;
                break;
            }
        }
    }
    return dft_inverse(F);
}

}  // namespace darcy
