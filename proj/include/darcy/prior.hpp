#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "darcy/fft.hpp"
#include "darcy/field.hpp"
#include "darcy/rng.hpp"

namespace darcy {

/// Gaussian prior N(0, (-Delta)^{-s}) on zero-mean functions of T^d,
/// truncated to the mode cube {k : |k_i| <= N, k != 0}.
struct PriorSpec {
    int d = 1;
    double s = 2.0;
    int truncation_level = 1;  // N
    std::uint64_t seed = 0;

    PriorSpec() = default;
    PriorSpec(int d_, double s_, int N, std::uint64_t seed_ = 0)
        : d(d_), s(s_), truncation_level(N), seed(seed_) {
        if (d < 1 || d > 3) throw ValidationError("prior dimension must be 1, 2 or 3");
        if (!(s > d / 2.0)) throw ValidationError("prior smoothness requires s > d/2");
        if (N < 1) throw ValidationError("truncation level must be >= 1");
    }
};

/// Per-mode variance of the prior: eigenvalue (|k|^2)^{-s} of (-Delta)^{-s}.
inline double kl_variance(const Wavevector& k, int d, double s) {
    if (!(s > 0)) throw ValidationError("kl_variance requires s > 0");
    const int k2 = abs_sq(k, d);
    if (k2 == 0) throw ValidationError("zero mode is excluded by the zero-mean constraint");
    return std::pow(static_cast<double>(k2), -s);
}

/// One prior draw in the real cosine/sine parametrization
///   u = sum_k sigma_k (a_k c_k + b_k s_k),  sigma_k^2 = (|k|^2)^{-s},
/// over conjugate-pair representatives k of the truncation cube, with
/// c_k, s_k the L2-orthonormal cosine/sine basis. Amplitudes (a_k, b_k) are
/// iid standard normal, consumed in lexicographic mode order.
struct KLSample {
    PriorSpec spec;
    std::vector<Wavevector> modes;     // representatives, lex order
    std::vector<double> cos_amp;       // a_k
    std::vector<double> sin_amp;       // b_k

    std::size_t mode_count() const { return modes.size(); }
};

inline KLSample draw_coefficients(const PriorSpec& spec, Rng& rng) {
    KLSample out;
    out.spec = spec;
    out.modes = representative_modes(spec.d, spec.truncation_level);
    out.cos_amp.resize(out.modes.size());
    out.sin_amp.resize(out.modes.size());
    for (std::size_t i = 0; i < out.modes.size(); ++i) {
        auto [a, b] = rng.normal_pair();
        out.cos_amp[i] = a;
        out.sin_amp[i] = b;
    }
    return out;
}

/// Drop every mode outside the cube {|k_i| <= N}. Exact projection P^N in
/// coefficient space.
inline KLSample truncate_coefficients(const KLSample& ks, int N) {
    KLSample out;
    out.spec = ks.spec;
    out.spec.truncation_level = N;
    for (std::size_t i = 0; i < ks.modes.size(); ++i) {
        bool keep = true;
        for (int a = 0; a < ks.spec.d; ++a)
            if (ks.modes[i][a] < -N || ks.modes[i][a] > N) keep = false;
        if (!keep) continue;
        out.modes.push_back(ks.modes[i]);
        out.cos_amp.push_back(ks.cos_amp[i]);
        out.sin_amp.push_back(ks.sin_amp[i]);
    }
    return out;
}

/// Realize the KL sum on a grid. Fills the conjugate-symmetric spectrum and
/// inverse-transforms; requires N < n/2 so every mode is representable.
inline Field realize(const KLSample& ks, const GridSpec& grid) {
    if (grid.d != ks.spec.d) throw ValidationError("grid dimension does not match prior");
    if (ks.spec.truncation_level >= grid.n / 2)
        throw ValidationError("truncation level must satisfy N < n/2");
    SpectralField F(grid);
    const double norm = 1.0 / (std::sqrt(2.0) * std::pow(two_pi, grid.d / 2.0));
    for (std::size_t i = 0; i < ks.modes.size(); ++i) {
        const Wavevector& k = ks.modes[i];
        const double sigma = std::sqrt(kl_variance(k, grid.d, ks.spec.s));
        const std::complex<double> c{ks.cos_amp[i], -ks.sin_amp[i]};
        Wavevector mk{-k[0], -k[1], -k[2]};
        F.at(k) = sigma * norm * c;
        F.at(mk) = std::conj(F.at(k));
    }
    return dft_inverse(F);
}

/// Draw a prior sample and realize it. Deterministic given the rng state.
inline std::pair<KLSample, Field> sample_prior(const PriorSpec& spec, const GridSpec& grid, Rng& rng) {
    KLSample ks = draw_coefficients(spec, rng);
    Field f = realize(ks, grid);
    return {std::move(ks), std::move(f)};
}

/// Seeded convenience: sample index i uses the stream spec.seed + i.
inline std::pair<KLSample, Field> sample_prior_at(const PriorSpec& spec, const GridSpec& grid,
                                                  std::uint64_t index) {
    Rng rng = Rng::stream(spec.seed, index);
    return sample_prior(spec, grid, rng);
}

/// Orthogonal projection P^N of a grid field onto the mode cube.
inline Field truncate(const Field& f, int N) {
    if (N >= f.grid.n / 2) throw ValidationError("truncation level must satisfy N < n/2");
    return band_limit(f, N);
}

/// Analytic E ||u^N||_{L2}^2 = sum over the cube (k != 0) of (|k|^2)^{-s}.
inline double expected_l2_energy(const PriorSpec& spec, int N) {
    double sum = 0;
    Wavevector k{0, 0, 0};
    std::array<int, 3> lo{-N, -N, -N}, hi{N, N, N};
    for (int i = spec.d; i < 3; ++i) lo[i] = hi[i] = 0;
    for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
        for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
            for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
                const int k2 = abs_sq(k, spec.d);
                if (k2 == 0) continue;
                sum += std::pow(static_cast<double>(k2), -spec.s);
            }
    return sum;
}

/// CSV with columns k_1..k_d,a,b, one row per representative mode.
inline void kl_write_csv(const KLSample& ks, std::ostream& os) {
    const int d = ks.spec.d;
    for (int a = 0; a < d; ++a) os << "k_" << (a + 1) << ",";
    os << "a,b\n";
    char buf[64];
    for (std::size_t i = 0; i < ks.modes.size(); ++i) {
        for (int a = 0; a < d; ++a) os << ks.modes[i][a] << ",";
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ks.cos_amp[i], ks.sin_amp[i]);
        os << buf;
    }
}

inline void kl_write_csv(const KLSample& ks, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DecodeError("cannot open for writing: " + path);
    kl_write_csv(ks, os);
}

}  // namespace darcy
