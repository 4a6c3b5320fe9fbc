#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "bqsos/eigen_util.hpp"
#include "bqsos/forms.hpp"
#include "bqsos/parallel.hpp"
#include "bqsos/rng.hpp"
#include "bqsos/tripartite.hpp"

namespace bqsos {

struct OracleOptions {
    uint64_t seed = 2024;
    int restarts = 50;
    int iters = 200;     // per restart
    double tol = 1e-8;   // relative psd threshold
};

enum class Verdict { PsdLikely, NegativeWitness };

struct PsdVerdict {
    double min_value = 0.0;
    std::vector<double> x, y;   // argmin; y holds the y block
    std::optional<double> z;    // set for tripartite minimization
    Verdict verdict = Verdict::PsdLikely;
    long budget_used = 0;       // total inner iterations across restarts
};

/// Minimum of a biquadratic form over the product of unit spheres via
/// alternating least-eigenvector descent with seeded multi-start. The
/// reported min_value is a fresh evaluation at the argmin. Deterministic per
/// seed; restarts combine by best-value reduction (ties: lowest restart
/// index).
inline PsdVerdict min_on_spheres(const BiquadraticForm<double>& f, const OracleOptions& opts = {}) {
    if (opts.restarts < 1) throw InvalidInput("min_on_spheres: restarts must be >= 1");
    const int m = f.m(), n = f.n();

    struct Local {
        double val;
        std::vector<double> x, y;
        long used;
    };
    std::vector<Local> results((size_t)opts.restarts);
    parallel_for(opts.restarts, [&](int r) {
        Rng rng = Rng::derived(opts.seed, (uint64_t)r);
        Eigen::VectorXd x(m);
        double nrm = 0;
        do {
            for (int i = 0; i < m; ++i) x[i] = rng.normal();
            nrm = x.norm();
        } while (nrm < 1e-12);
        x /= nrm;
        std::vector<double> xv(m), yv(n);
        for (int i = 0; i < m; ++i) xv[i] = x[i];
        double prev = std::numeric_limits<double>::infinity();
        double val = prev;
        long used = 0;
        for (int it = 0; it < opts.iters; ++it) {
            ++used;
            auto [ly, vy] = least_eigenpair(to_eigen(f.contract_x(xv).M));
            for (int k = 0; k < n; ++k) yv[k] = vy[k];
            auto [lx, vx] = least_eigenpair(to_eigen(f.contract_y(yv).M));
            for (int i = 0; i < m; ++i) xv[i] = vx[i];
            val = lx;
            if (std::abs(prev - val) <= 1e-12) break;
            prev = val;
        }
        results[(size_t)r] = {f.evaluate(xv, yv), std::move(xv), std::move(yv), used};
    });

    PsdVerdict best;
    best.min_value = std::numeric_limits<double>::infinity();
    for (const auto& loc : results) {
        best.budget_used += loc.used;
        if (loc.val < best.min_value) {
            best.min_value = loc.val;
            best.x = loc.x;
            best.y = loc.y;
        }
    }
    best.verdict = best.min_value >= -opts.tol * (1.0 + scalar_traits<double>::to_double(f.norm_inf()))
                       ? Verdict::PsdLikely
                       : Verdict::NegativeWitness;
    return best;
}

namespace detail {

/// Minimum of a quartic polynomial over the unit sphere of its listed
/// variables: projected gradient with backtracking, seeded multi-start.
inline PsdVerdict min_on_unit_sphere(const Polynomial<double>& p, const std::vector<Var>& vars,
                                     const OracleOptions& opts) {
    const int d = (int)vars.size();
    std::vector<Polynomial<double>> grads;
    grads.reserve(d);
    for (const auto& v : vars) grads.push_back(p.derivative(v));

    auto value = [&](const Eigen::VectorXd& v) {
        return p.evaluate([&](const Var& var) {
            for (int i = 0; i < d; ++i)
                if (vars[i] == var) return v[i];
            throw InvalidInput("unexpected variable in polynomial");
        });
    };

    struct Local {
        double val;
        Eigen::VectorXd v;
        long used;
    };
    std::vector<Local> results((size_t)opts.restarts);
    parallel_for(opts.restarts, [&](int r) {
        Rng rng = Rng::derived(opts.seed, (uint64_t)r);
        Eigen::VectorXd v(d);
        double nrm = 0;
        do {
            for (int i = 0; i < d; ++i) v[i] = rng.normal();
            nrm = v.norm();
        } while (nrm < 1e-12);
        v /= nrm;
        double val = value(v);
        double eta = 0.1;
        long used = 0;
        for (int it = 0; it < opts.iters; ++it) {
            ++used;
            Eigen::VectorXd g(d);
            for (int i = 0; i < d; ++i)
                g[i] = grads[i].evaluate([&](const Var& var) {
                    for (int k = 0; k < d; ++k)
                        if (vars[k] == var) return v[k];
                    throw InvalidInput("unexpected variable in polynomial");
                });
            Eigen::VectorXd gt = g - g.dot(v) * v;
            if (gt.norm() <= 1e-14) break;
            bool moved = false;
            while (eta > 1e-14) {
                Eigen::VectorXd w = (v - eta * gt).normalized();
                const double wal = value(w);
                if (wal < val) {
                    const bool stagnant = val - wal <= 1e-14 * (1.0 + std::abs(val));
                    v = std::move(w);
                    val = wal;
                    moved = true;
                    eta *= 1.3;
                    if (stagnant) moved = false;  // converged
                    break;
                }
                eta *= 0.5;
            }
            if (!moved) break;
        }
        results[(size_t)r] = {val, std::move(v), used};
    });

    PsdVerdict best;
    best.min_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd arg;
    for (const auto& loc : results) {
        best.budget_used += loc.used;
        if (loc.val < best.min_value) {
            best.min_value = loc.val;
            arg = loc.v;
        }
    }
    best.x.clear();
    best.y.clear();
    for (int i = 0; i < d; ++i) {
        switch (vars[i].block) {
            case VarBlock::X: best.x.push_back(arg[i]); break;
            case VarBlock::Y: best.y.push_back(arg[i]); break;
            case VarBlock::Z: best.z = arg[i]; break;
        }
    }
    return best;
}

}  // namespace detail

/// Minimum of a tripartite form over the unit sphere of (x, y, z).
inline PsdVerdict min_on_sphere(const TripartiteForm<double>& h, const OracleOptions& opts = {}) {
    std::vector<Var> vars;
    for (int i = 0; i < h.mx; ++i) vars.push_back({VarBlock::X, i});
    for (int k = 0; k < h.ny; ++k) vars.push_back({VarBlock::Y, k});
    vars.push_back({VarBlock::Z, 0});
    PsdVerdict v = detail::min_on_unit_sphere(h.to_polynomial(), vars, opts);
    v.verdict = v.min_value >= -opts.tol * (1.0 + h.norm_inf()) ? Verdict::PsdLikely
                                                                : Verdict::NegativeWitness;
    return v;
}

inline std::pair<bool, PsdVerdict> is_psd(const BiquadraticForm<double>& f,
                                          const OracleOptions& opts = {}) {
    PsdVerdict v = min_on_spheres(f, opts);
    return {v.verdict == Verdict::PsdLikely, v};
}

inline std::pair<bool, PsdVerdict> is_psd(const TripartiteForm<double>& h,
                                          const OracleOptions& opts = {}) {
    PsdVerdict v = min_on_sphere(h, opts);
    return {v.verdict == Verdict::PsdLikely, v};
}

inline std::pair<bool, PsdVerdict> is_psd(const M11Form<double>& h, const OracleOptions& opts = {}) {
    return is_psd(h.to_tripartite(), opts);
}

inline std::pair<bool, PsdVerdict> is_psd(const Form211<double>& h, const OracleOptions& opts = {}) {
    return is_psd(h.m11(), opts);
}

/// A unit-norm pair with f(x, y) <= tol (absolute), when the oracle's best
/// minimum reaches it; none suggests f is pd. Intended for psd f.
inline std::optional<std::pair<std::vector<double>, std::vector<double>>> find_nontrivial_zero(
    const BiquadraticForm<double>& f, double tol = 1e-9, const OracleOptions& opts = {}) {
    PsdVerdict v = min_on_spheres(f, opts);
    if (v.min_value <= tol) return std::make_pair(v.x, v.y);
    return std::nullopt;
}

}  // namespace bqsos
