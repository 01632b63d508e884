#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "darcy/fft.hpp"
#include "darcy/field.hpp"

namespace darcy {

/// Right-hand side data of the divergence-form problem: source f plus the
/// flux source div(g), all on one grid.
struct ProblemData {
    Field f;
    std::vector<Field> g;  // empty, or d components

    void check(const GridSpec& grid) const {
        if (f.grid != grid) throw ValidationError("source grid does not match");
        if (!g.empty() && static_cast<int>(g.size()) != grid.d)
            throw ValidationError("flux source needs one component per axis");
        for (const auto& gi : g)
            if (gi.grid != grid) throw ValidationError("flux source grid does not match");
    }
};

struct SolverConfig {
    double rel_tol = 1e-10;
    long max_iter = 0;  // 0: use 10 * n^d

    long effective_max_iter(const GridSpec& g) const {
        return max_iter > 0 ? max_iter : static_cast<long>(10 * g.num_points());
    }
};

struct SolveReport {
    long iterations = 0;
    double final_relative_residual = 0;
    bool converged = false;
};

class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& msg, SolveReport rep) : std::runtime_error(msg), report_(rep) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

namespace detail {

/// Periodic neighbor index tables per axis, cached per grid shape.
struct NeighborTable {
    std::vector<std::vector<std::int32_t>> plus;   // [axis][flat]
    std::vector<std::vector<std::int32_t>> minus;  // [axis][flat]

    explicit NeighborTable(const GridSpec& g) {
        const std::size_t total = g.num_points();
        plus.assign(g.d, std::vector<std::int32_t>(total));
        minus.assign(g.d, std::vector<std::int32_t>(total));
        for (int a = 0; a < g.d; ++a) {
            std::size_t stride = 1;
            for (int b = g.d - 1; b > a; --b) stride *= g.n;
            for (std::size_t j = 0; j < total; ++j) {
                const int pos = static_cast<int>((j / stride) % g.n);
                plus[a][j] = static_cast<std::int32_t>(pos + 1 < g.n ? j + stride : j + stride - stride * g.n);
                minus[a][j] = static_cast<std::int32_t>(pos > 0 ? j - stride : j - stride + stride * g.n);
            }
        }
    }
};

inline const NeighborTable& neighbors(const GridSpec& g) {
    thread_local GridSpec cached_grid;
    thread_local std::unique_ptr<NeighborTable> cached;
    if (!cached || !(cached_grid == g)) {
        cached = std::make_unique<NeighborTable>(g);
        cached_grid = g;
    }
    return *cached;
}

}  // namespace detail

/// Matrix-free discretization of p -> -div(e^u grad p) in conservative flux
/// form: per axis, midpoint coefficient exp((u_j + u_{j+e})/2) times the
/// one-sided difference, differenced back. Symmetric, positive semidefinite,
/// kernel = constants.
class EllipticOperator {
public:
    EllipticOperator(const Field& u) : grid_(u.grid), mid_(u.grid.d) {
        const auto& nb = detail::neighbors(grid_);
        const std::size_t total = grid_.num_points();
        for (int a = 0; a < grid_.d; ++a) {
            mid_[a].resize(total);
            const auto& plus = nb.plus[a];
            for (std::size_t j = 0; j < total; ++j)
                mid_[a][j] = std::exp(0.5 * (u[j] + u[plus[j]]));
        }
    }

    const GridSpec& grid() const { return grid_; }

    void apply(const Field& p, Field& out) const {
        const auto& nb = detail::neighbors(grid_);
        const std::size_t total = grid_.num_points();
        const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
        flux_.assign(total, 0.0);
        for (std::size_t j = 0; j < total; ++j) out[j] = 0.0;
        for (int a = 0; a < grid_.d; ++a) {
            const auto& plus = nb.plus[a];
            const auto& minus = nb.minus[a];
            const auto& mid = mid_[a];
            for (std::size_t j = 0; j < total; ++j) flux_[j] = mid[j] * (p[plus[j]] - p[j]);
            for (std::size_t j = 0; j < total; ++j) out[j] += flux_[minus[j]] - flux_[j];
        }
        for (std::size_t j = 0; j < total; ++j) out[j] *= inv_h2;
    }

    Field apply(const Field& p) const {
        Field out(grid_);
        apply(p, out);
        return out;
    }

private:
    GridSpec grid_;
    std::vector<std::vector<double>> mid_;
    mutable std::vector<double> flux_;
};

inline Field apply_operator(const Field& u, const Field& p) {
    if (u.grid != p.grid) throw ValidationError("operator grids do not match");
    return EllipticOperator(u).apply(p);
}

/// f + div(g) with midpoint-averaged g differenced compatibly with the
/// operator, projected to zero mean for solvability.
inline Field assemble_rhs(const ProblemData& data) {
    const GridSpec& g = data.f.grid;
    data.check(g);
    Field b = data.f;
    if (!data.g.empty()) {
        const auto& nb = detail::neighbors(g);
        const double inv_h = 1.0 / g.spacing();
        const std::size_t total = g.num_points();
        std::vector<double> mid(total);
        for (int a = 0; a < g.d; ++a) {
            const auto& plus = nb.plus[a];
            const auto& minus = nb.minus[a];
            const Field& ga = data.g[a];
            for (std::size_t j = 0; j < total; ++j) mid[j] = 0.5 * (ga[j] + ga[plus[j]]);
            for (std::size_t j = 0; j < total; ++j) b[j] += (mid[j] - mid[minus[j]]) * inv_h;
        }
    }
    return zero_mean_project(b);
}

/// lambda = exp(min u), Lambda = exp(max u).
inline std::pair<double, double> coefficient_bounds(const Field& u) {
    double lo = u[0], hi = u[0];
    for (double v : u.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {std::exp(lo), std::exp(hi)};
}

namespace detail {

/// Spectral pseudo-inverse of the constant-coefficient discrete Laplacian:
/// divide by the flux-form symbol sum_a (2-2cos(k_a h))/h^2, zero mode to 0.
class SpectralPreconditioner {
public:
    explicit SpectralPreconditioner(const GridSpec& g) : grid_(g), inv_symbol_(g.num_points()) {
        const double h = g.spacing();
        const double inv_h2 = 1.0 / (h * h);
        for (std::size_t i = 0; i < inv_symbol_.size(); ++i) {
            const auto b = unflatten(g, i);
            double sym = 0;
            for (int a = 0; a < g.d; ++a) {
                const int k = bin_to_freq(b[a], g.n);
                sym += (2.0 - 2.0 * std::cos(k * h)) * inv_h2;
            }
            inv_symbol_[i] = sym > 0 ? 1.0 / sym : 0.0;
        }
        work_.resize(g.num_points());
    }

    void apply(const Field& r, Field& z) const {
        const std::size_t total = grid_.num_points();
        for (std::size_t i = 0; i < total; ++i) work_[i] = r[i];
        transform_all(work_, grid_, /*inverse=*/false);
        for (std::size_t i = 0; i < total; ++i) work_[i] *= inv_symbol_[i];
        transform_all(work_, grid_, /*inverse=*/true);
        const double scale = 1.0 / static_cast<double>(total);
        for (std::size_t i = 0; i < total; ++i) z[i] = work_[i].real() * scale;
    }

private:
    GridSpec grid_;
    std::vector<double> inv_symbol_;
    mutable std::vector<std::complex<double>> work_;
};

inline double dot(const Field& a, const Field& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// Conjugate gradient on the zero-mean subspace, preconditioned by the
/// spectral Laplacian pseudo-inverse. Iteration stops when both the
/// preconditioned and the plain relative residual (L2) reach rel_tol.
/// Throws SolveError on NaN or non-convergence, carrying the report.
inline std::pair<Field, SolveReport> solve(const Field& u, const ProblemData& data,
                                           const SolverConfig& cfg = {}) {
    const GridSpec& grid = u.grid;
    data.check(grid);
    if (!(cfg.rel_tol > 0 && cfg.rel_tol < 1)) throw ValidationError("rel_tol must lie in (0,1)");

    const EllipticOperator A(u);
    const detail::SpectralPreconditioner M(grid);
    const Field b = assemble_rhs(data);

    const double b_norm = std::sqrt(detail::dot(b, b));
    SolveReport rep;
    if (b_norm == 0) {
        rep.converged = true;
        return {Field(grid), rep};
    }

    Field x(grid), r(grid), z(grid), p(grid), Ap(grid);
    M.apply(b, x);  // constant-coefficient solve as initial guess
    const double zb_ref = std::sqrt(std::max(detail::dot(x, x), 1e-300));
    A.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    M.apply(r, z);
    p = z;
    double rho = detail::dot(r, z);

    const long max_iter = cfg.effective_max_iter(grid);
    for (long it = 0; it <= max_iter; ++it) {
        const double r_norm = std::sqrt(detail::dot(r, r));
        const double z_norm = std::sqrt(detail::dot(z, z));
        rep.iterations = it;
        rep.final_relative_residual = r_norm / b_norm;
        if (!std::isfinite(r_norm) || !std::isfinite(rho))
            throw SolveError("elliptic solve diverged (non-finite residual)", rep);
        if (r_norm / b_norm <= cfg.rel_tol && z_norm / zb_ref <= cfg.rel_tol) {
            rep.converged = true;
            break;
        }
        if (it == max_iter) break;

        A.apply(p, Ap);
        const double pAp = detail::dot(p, Ap);
        if (!(pAp > 0)) throw SolveError("elliptic operator lost positivity", rep);
        const double alpha = rho / pAp;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * Ap[i];
        M.apply(r, z);
        const double rho_new = detail::dot(r, z);
        const double beta = rho_new / rho;
        rho = rho_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }

    if (!rep.converged)
        throw SolveError("elliptic solve did not converge within max_iter", rep);

    // The gauge: pressure is defined up to a constant; pin the mean to zero.
    x = zero_mean_project(x);
    return {std::move(x), rep};
}

}  // namespace darcy
