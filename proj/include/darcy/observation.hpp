#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "darcy/elliptic.hpp"
#include "darcy/field.hpp"
#include "darcy/field_io.hpp"
#include "darcy/rng.hpp"

namespace darcy {

/// Pointwise evaluation of the pressure via multilinear periodic
/// interpolation at x in [0,2pi)^d.
struct PointEval {
    std::array<double, 3> x{0, 0, 0};
};

/// h^d-weighted grid quadrature of w * p.
struct WeightedAverage {
    Field w;
};

/// The K linear observation functionals l_j. An empty setup (K = 0) is the
/// no-data case: the potential is identically zero and the posterior is the
/// prior. File-loaded setups always have K >= 1.
class ObservationSetup {
public:
    using Functional = std::variant<PointEval, WeightedAverage>;

    ObservationSetup() = default;
    ObservationSetup(std::vector<Functional> fns, const GridSpec& grid) : fns_(std::move(fns)) {
        for (const auto& fn : fns_) {
            if (const auto* pe = std::get_if<PointEval>(&fn)) {
                for (int a = 0; a < grid.d; ++a)
                    if (pe->x[a] < 0 || pe->x[a] >= two_pi)
                        throw ValidationError("observation point outside [0,2pi)^d");
            } else {
                const auto& wa = std::get<WeightedAverage>(fn);
                if (wa.w.grid != grid) throw ValidationError("weight field grid does not match");
            }
        }
    }

    std::size_t size() const { return fns_.size(); }
    const std::vector<Functional>& functionals() const { return fns_; }

private:
    std::vector<Functional> fns_;
};

namespace detail {

inline double interpolate_periodic(const Field& p, const std::array<double, 3>& x) {
    const GridSpec& g = p.grid;
    const double h = g.spacing();
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
        const double t = x[a] / h;
        const double fl = std::floor(t);
        base[a] = static_cast<int>(fl) % g.n;
        if (base[a] < 0) base[a] += g.n;
        frac[a] = t - fl;
    }
    double acc = 0;
    const int corners = 1 << g.d;
    for (int c = 0; c < corners; ++c) {
        double wgt = 1;
        std::array<int, 3> idx{0, 0, 0};
        for (int a = 0; a < g.d; ++a) {
            const int up = (c >> a) & 1;
            idx[a] = (base[a] + up) % g.n;
            wgt *= up ? frac[a] : 1.0 - frac[a];
        }
        acc += wgt * p[flatten(g, idx)];
    }
    return acc;
}

}  // namespace detail

/// Apply every functional to the pressure field; linear in p.
inline std::vector<double> observe(const Field& p, const ObservationSetup& setup) {
    std::vector<double> out;
    out.reserve(setup.size());
    const double hd = std::pow(p.grid.spacing(), p.grid.d);
    for (const auto& fn : setup.functionals()) {
        if (const auto* pe = std::get_if<PointEval>(&fn)) {
            out.push_back(detail::interpolate_periodic(p, pe->x));
        } else {
            const auto& wa = std::get<WeightedAverage>(fn);
            if (wa.w.grid != p.grid) throw ValidationError("weight field grid does not match pressure");
            double s = 0;
            for (std::size_t i = 0; i < p.size(); ++i) s += wa.w[i] * p[i];
            out.push_back(s * hd);
        }
    }
    return out;
}

/// Gaussian noise covariance Gamma with its precomputed lower Cholesky
/// factor. Gamma must be symmetric to 1e-12 and positive definite.
class NoiseModel {
public:
    explicit NoiseModel(std::vector<std::vector<double>> gamma) : gamma_(std::move(gamma)) {
        const std::size_t K = gamma_.size();
        for (const auto& row : gamma_)
            if (row.size() != K) throw ValidationError("noise covariance must be square");
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs(gamma_[i][j] - gamma_[j][i]) > 1e-12)
                    throw ValidationError("noise covariance must be symmetric to 1e-12");
        chol_ = gamma_;
        for (std::size_t j = 0; j < K; ++j) {
            double diag = chol_[j][j];
            for (std::size_t r = 0; r < j; ++r) diag -= chol_[j][r] * chol_[j][r];
            if (!(diag > 0)) throw ValidationError("noise covariance is not positive definite");
            chol_[j][j] = std::sqrt(diag);
            for (std::size_t i = j + 1; i < K; ++i) {
                double s = chol_[i][j];
                for (std::size_t r = 0; r < j; ++r) s -= chol_[i][r] * chol_[j][r];
                chol_[i][j] = s / chol_[j][j];
            }
            for (std::size_t i = 0; i < j; ++i) chol_[i][j] = 0;
        }
    }

    static NoiseModel isotropic(double sigma, std::size_t K) {
        if (!(sigma > 0)) throw ValidationError("noise sigma must be positive");
        std::vector<std::vector<double>> gamma(K, std::vector<double>(K, 0.0));
        for (std::size_t i = 0; i < K; ++i) gamma[i][i] = sigma * sigma;
        return NoiseModel(std::move(gamma));
    }

    std::size_t size() const { return gamma_.size(); }
    const std::vector<std::vector<double>>& gamma() const { return gamma_; }

    /// Solve L t = v (forward substitution), giving Gamma^{-1/2} v.
    std::vector<double> whiten(const std::vector<double>& v) const {
        const std::size_t K = size();
        if (v.size() != K) throw ValidationError("residual length does not match noise covariance");
        std::vector<double> t(K);
        for (std::size_t i = 0; i < K; ++i) {
            double s = v[i];
            for (std::size_t j = 0; j < i; ++j) s -= chol_[i][j] * t[j];
            t[i] = s / chol_[i][i];
        }
        return t;
    }

    /// L xi: colored noise from iid standard normals.
    std::vector<double> color(const std::vector<double>& xi) const {
        const std::size_t K = size();
        std::vector<double> out(K, 0.0);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j <= i; ++j) out[i] += chol_[i][j] * xi[j];
        return out;
    }

private:
    std::vector<std::vector<double>> gamma_;
    std::vector<std::vector<double>> chol_;
};

struct DataVector {
    std::vector<double> y;
};

struct PotentialValue {
    double phi = 0;
    std::vector<double> residual;
};

/// G(u): solve the forward problem at u and observe the pressure.
inline std::vector<double> forward_map(const Field& u, const ProblemData& data,
                                       const ObservationSetup& setup, const SolverConfig& cfg = {}) {
    auto [p, rep] = solve(u, data, cfg);
    return observe(p, setup);
}

/// Misfit potential Phi(u;y) = 1/2 |Gamma^{-1/2}(y - G(u))|^2 of an already
/// computed observation vector.
inline PotentialValue potential_of_observation(const std::vector<double>& gu, const NoiseModel& noise,
                                               const std::vector<double>& y) {
    if (gu.size() != y.size()) throw ValidationError("data and observation dimensions disagree");
    PotentialValue out;
    out.residual.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out.residual[i] = y[i] - gu[i];
    const auto t = noise.whiten(out.residual);
    double s = 0;
    for (double v : t) s += v * v;
    out.phi = 0.5 * s;
    return out;
}

inline PotentialValue potential(const Field& u, const ProblemData& data, const ObservationSetup& setup,
                                const NoiseModel& noise, const DataVector& y,
                                const SolverConfig& cfg = {}) {
    return potential_of_observation(forward_map(u, data, setup, cfg), noise, y.y);
}

/// Synthetic data y = G(u_true) + L xi with xi standard normal.
inline DataVector generate_data(const Field& u_true, const ProblemData& data,
                                const ObservationSetup& setup, const NoiseModel& noise, Rng& rng,
                                const SolverConfig& cfg = {}) {
    std::vector<double> gu = forward_map(u_true, data, setup, cfg);
    std::vector<double> xi(gu.size());
    for (auto& v : xi) v = rng.normal();
    const auto eta = noise.color(xi);
    DataVector out;
    out.y.resize(gu.size());
    for (std::size_t i = 0; i < gu.size(); ++i) out.y[i] = gu[i] + eta[i];
    return out;
}

/// |Phi(u;y1) - Phi(u;y2)| / |y1 - y2|, the data-Lipschitz ratio.
inline double potential_data_lipschitz_check(const Field& u, const ProblemData& data,
                                             const ObservationSetup& setup, const NoiseModel& noise,
                                             const DataVector& y1, const DataVector& y2,
                                             const SolverConfig& cfg = {}) {
    double diff2 = 0;
    for (std::size_t i = 0; i < y1.y.size(); ++i) {
        const double dv = y1.y[i] - y2.y[i];
        diff2 += dv * dv;
    }
    if (diff2 == 0) throw ValidationError("data vectors must differ");
    const auto gu = forward_map(u, data, setup, cfg);
    const double p1 = potential_of_observation(gu, noise, y1.y).phi;
    const double p2 = potential_of_observation(gu, noise, y2.y).phi;
    return std::abs(p1 - p2) / std::sqrt(diff2);
}

// ---- CSV interfaces -------------------------------------------------------

/// Setup file: one functional per line, either
///   point,x1[,x2[,x3]]
///   weight,<field-file-path>
/// Relative weight paths resolve against the setup file's directory.
inline ObservationSetup load_observation_setup(const std::string& path, const GridSpec& grid);

inline std::vector<std::vector<double>> load_matrix_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DecodeError("cannot open CSV: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw DecodeError(path + ":" + std::to_string(lineno) + ": not a number: " + cell);
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

inline DataVector load_data_csv(const std::string& path) {
    DataVector out;
    for (const auto& row : load_matrix_csv(path)) {
        if (row.size() != 1) throw DecodeError(path + ": data vector expects one value per line");
        out.y.push_back(row[0]);
    }
    if (out.y.empty()) throw DecodeError(path + ": empty data vector");
    return out;
}

inline void write_data_csv(const DataVector& y, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DecodeError("cannot open for writing: " + path);
    char buf[40];
    for (double v : y.y) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os << buf;
    }
}

inline ObservationSetup load_observation_setup(const std::string& path, const GridSpec& grid,
                                               const std::string& base_dir) {
    std::ifstream is(path);
    if (!is) throw DecodeError("cannot open observation setup: " + path);
    std::vector<ObservationSetup::Functional> fns;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string kind;
        std::getline(ss, kind, ',');
        if (kind == "point") {
            PointEval pe;
            std::string cell;
            int a = 0;
            while (std::getline(ss, cell, ',')) {
                if (a >= grid.d)
                    throw DecodeError(path + ":" + std::to_string(lineno) + ": too many coordinates");
                try {
                    pe.x[a++] = std::stod(cell);
                } catch (...) {
                    throw DecodeError(path + ":" + std::to_string(lineno) + ": not a number: " + cell);
                }
            }
            if (a != grid.d)
                throw DecodeError(path + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(grid.d) + " coordinates");
            fns.emplace_back(pe);
        } else if (kind == "weight") {
            std::string wpath;
            std::getline(ss, wpath);
            if (wpath.empty()) throw DecodeError(path + ":" + std::to_string(lineno) + ": missing weight path");
            if (wpath[0] != '/' && !base_dir.empty()) wpath = base_dir + "/" + wpath;
            fns.emplace_back(WeightedAverage{field_read(wpath)});
        } else {
            throw DecodeError(path + ":" + std::to_string(lineno) + ": unknown functional kind: " + kind);
        }
    }
    if (fns.empty()) throw DecodeError(path + ": observation setup needs at least one functional");
    return ObservationSetup(std::move(fns), grid);
}

inline ObservationSetup load_observation_setup(const std::string& path, const GridSpec& grid) {
    const auto slash = path.find_last_of('/');
    return load_observation_setup(path, grid, slash == std::string::npos ? "" : path.substr(0, slash));
}

}  // namespace darcy
