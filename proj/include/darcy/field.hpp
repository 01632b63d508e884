#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "darcy/grid.hpp"

namespace darcy {

/// Real scalar function sampled on a periodic grid. Row-major values,
/// last axis fastest.
struct Field {
    GridSpec grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0) : grid(g), values(g.num_points(), fill) {}
    Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != g.num_points()) throw ValidationError("field value count does not match grid");
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Sample a function of physical coordinates onto a grid.
template <typename F>
Field make_field(const GridSpec& g, F&& f) {
    Field out(g);
    const double h = g.spacing();
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto idx = unflatten(g, i);
        double x[3] = {idx[0] * h, idx[1] * h, idx[2] * h};
        out[i] = f(x[0], x[1], x[2]);
    }
    return out;
}

inline double sup_norm(const Field& f) {
    double m = 0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

/// L2 norm with the h^d quadrature weight, so constants have norm
/// |c| (2pi)^{d/2}.
inline double l2_norm(const Field& f) {
    double s = 0;
    for (double v : f.values) s += v * v;
    const double h = f.grid.spacing();
    return std::sqrt(s) * std::pow(h, f.grid.d / 2.0);
}

inline double mean_value(const Field& f) {
    double s = 0;
    for (double v : f.values) s += v;
    return s / static_cast<double>(f.size());
}

/// Subtract the grid mean. Idempotent linear projection.
inline Field zero_mean_project(const Field& f) {
    Field out = f;
    const double m = mean_value(f);
    for (double& v : out.values) v -= m;
    return out;
}

inline Field& operator+=(Field& a, const Field& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Field& operator-=(Field& a, const Field& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Field& operator*=(Field& a, double c) {
    for (double& v : a.values) v *= c;
    return a;
}

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(double c, Field a) { return a *= c; }

/// Grid estimate of the Hoelder C^t seminorm: max over sampled point pairs
/// of |f(x)-f(y)| / dist(x,y)^t with the torus metric. Pairs follow a fixed
/// stride pattern, at most ~1e6 of them: every base point (strided if
/// needed) against power-of-two index offsets along each axis combination.
inline double holder_seminorm_estimate(const Field& f, double t) {
    if (!(t > 0.0) || t > 1.0) throw ValidationError("Hoelder exponent must lie in (0,1]");
    const GridSpec& g = f.grid;
    const int n = g.n;

    // Offsets: every combination of {0,1,2,4,...,n/2} per axis, not all zero.
    std::vector<int> steps{0};
    for (int s = 1; s <= n / 2; s *= 2) steps.push_back(s);
    std::vector<std::array<int, 3>> offsets;
    std::array<std::size_t, 3> count{1, 1, 1};
    for (int a = 0; a < g.d; ++a) count[a] = steps.size();
    for (std::size_t i0 = 0; i0 < count[0]; ++i0)
        for (std::size_t i1 = 0; i1 < count[1]; ++i1)
            for (std::size_t i2 = 0; i2 < count[2]; ++i2) {
                std::array<int, 3> off{steps[i0], g.d > 1 ? steps[i1] : 0, g.d > 2 ? steps[i2] : 0};
                if (off[0] == 0 && off[1] == 0 && off[2] == 0) continue;
                offsets.push_back(off);
            }

    constexpr std::size_t pair_budget = 1'000'000;
    std::size_t stride = 1;
    while (f.size() / stride * offsets.size() > pair_budget) stride *= 2;

    double best = 0;
    for (std::size_t flat = 0; flat < f.size(); flat += stride) {
        const auto idx = unflatten(g, flat);
        for (const auto& off : offsets) {
            std::array<int, 3> jdx = idx;
            for (int a = 0; a < g.d; ++a) jdx[a] = (jdx[a] + off[a]) % n;
            const double num = std::abs(f[flat] - f[flatten(g, jdx)]);
            const double den = std::pow(torus_distance(g, off), t);
            best = std::max(best, num / den);
        }
    }
    return best;
}

}  // namespace darcy
