#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "bqsos/bases.hpp"
#include "bqsos/certificate.hpp"
#include "bqsos/eigen_util.hpp"
#include "bqsos/errors.hpp"
#include "bqsos/forms.hpp"
#include "bqsos/psd_oracle.hpp"
#include "bqsos/tripartite.hpp"

namespace bqsos {

/// Invertible coordinate changes applied per block: the transformed form is
/// f'(x', y') = f(Px x', Py y').
template <class T>
struct LinearChange {
    std::vector<std::vector<T>> Px, Py;  // row-major, square

    static std::vector<std::vector<T>> identity_matrix(int d) {
        std::vector<std::vector<T>> a(d, std::vector<T>(d, scalar_traits<T>::zero()));
        for (int i = 0; i < d; ++i) a[i][i] = scalar_traits<T>::one();
        return a;
    }
    static LinearChange identity(int m, int n) { return {identity_matrix(m), identity_matrix(n)}; }

    LinearChange inverse() const {
        auto inv = [](const std::vector<std::vector<T>>& a) {
            const size_t d = a.size();
            std::vector<std::vector<T>> r(d, std::vector<T>(d));
            for (size_t c = 0; c < d; ++c) {
                std::vector<T> e(d, scalar_traits<T>::zero());
                e[c] = scalar_traits<T>::one();
                std::vector<T> col = solve_linear(a, e);
                for (size_t i = 0; i < d; ++i) r[i][c] = col[i];
            }
            return r;
        };
        return {inv(Px), inv(Py)};
    }

    /// Condition numbers (Px, Py) via singular values.
    std::pair<double, double> cond() const {
        auto c = [](const std::vector<std::vector<T>>& a) {
            const int d = (int)a.size();
            Eigen::MatrixXd m(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) m(i, j) = scalar_traits<T>::to_double(a[i][j]);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
            const auto& s = svd.singularValues();
            return s[s.size() - 1] > 0 ? s[0] / s[s.size() - 1]
                                       : std::numeric_limits<double>::infinity();
        };
        return {c(Px), c(Py)};
    }
};

template <class T>
BiquadraticForm<T> apply_change(const BiquadraticForm<T>& f, const LinearChange<T>& ch) {
    if ((int)ch.Px.size() != f.m() || (int)ch.Py.size() != f.n())
        throw InvalidShape("apply_change: matrix sizes must match (m, n)");
    std::map<Var, Polynomial<T>> subs;
    for (int i = 0; i < f.m(); ++i) {
        Polynomial<T> p;
        for (int a = 0; a < f.m(); ++a)
            p.add_term(Monomial::var({VarBlock::X, a}), ch.Px[i][a]);
        subs[{VarBlock::X, i}] = std::move(p);
    }
    for (int k = 0; k < f.n(); ++k) {
        Polynomial<T> p;
        for (int a = 0; a < f.n(); ++a)
            p.add_term(Monomial::var({VarBlock::Y, a}), ch.Py[k][a]);
        subs[{VarBlock::Y, k}] = std::move(p);
    }
    Polynomial<T> q = f.to_polynomial().substitute(subs);
    q.prune();
    return BiquadraticForm<T>::from_polynomial(f.m(), f.n(), q);
}

/// Pushes a biquadratic certificate through a coordinate change: each square
/// is a bilinear form x^T Q y, which becomes x'^T (Px^T Q Py) y'. K is
/// preserved exactly.
template <class T>
SosCertificate<T> apply_change(const SosCertificate<T>& cert, const LinearChange<T>& ch) {
    const int m = (int)ch.Px.size(), n = (int)ch.Py.size();
    if (cert.basis != biquadratic_basis(m, n))
        throw InvalidCertificate("apply_change: certificate basis is not the bilinear basis");
    SosCertificate<T> out;
    out.basis = cert.basis;
    out.weights = cert.weights;
    for (const auto& row : cert.squares) {
        std::vector<T> nrow((size_t)m * n, scalar_traits<T>::zero());
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < n; ++b) {
                T s = scalar_traits<T>::zero();
                for (int i = 0; i < m; ++i)
                    for (int k = 0; k < n; ++k) s += ch.Px[i][a] * row[(size_t)i * n + k] * ch.Py[k][b];
                nrow[(size_t)a * n + b] = s;
            }
        out.squares.push_back(std::move(nrow));
    }
    return out;
}

/// g(x, y) = f((x, 1), (y, 1)): the last variable of each block is set to 1.
template <class T>
Polynomial<T> dehomogenize(const BiquadraticForm<T>& f) {
    if (f.m() < 2 || f.n() < 2) throw InvalidShape("dehomogenize needs m >= 2 and n >= 2");
    std::map<Var, Polynomial<T>> subs;
    subs[{VarBlock::X, f.m() - 1}] = Polynomial<T>(scalar_traits<T>::one());
    subs[{VarBlock::Y, f.n() - 1}] = Polynomial<T>(scalar_traits<T>::one());
    return f.to_polynomial().substitute(subs);
}

/// Sets z = 1 in a tripartite form.
template <class T>
Polynomial<T> dehomogenize(const TripartiteForm<T>& h) {
    std::map<Var, Polynomial<T>> subs;
    subs[{VarBlock::Z, 0}] = Polynomial<T>(scalar_traits<T>::one());
    return h.to_polynomial().substitute(subs);
}

/// Multiplies each term by the power of z that restores total degree 4.
template <class T>
TripartiteForm<T> homogenize(const Polynomial<T>& g, int mx, int ny) {
    Polynomial<T> h;
    const Var z{VarBlock::Z, 0};
    for (const auto& [mono, c] : g.terms()) {
        const int d = mono.total_degree();
        if (d > 4 || mono.degree_in(VarBlock::X) > 2 || mono.degree_in(VarBlock::Y) > 2 ||
            mono.degree_in(VarBlock::Z) > 0)
            throw NotTripartite("homogenize: inadmissible term " + to_string(mono));
        h.add_term(mono * Monomial::var(z, 4 - d), c);
    }
    return extract_components(mx, ny, h);
}

/// h(x, y, z) = f((x, z), (y, z)); realized as homogenize after
/// dehomogenize, shape (m-1) x (n-1) x 1.
template <class T>
TripartiteForm<T> biquadratic_to_tripartite(const BiquadraticForm<T>& f) {
    return homogenize(dehomogenize(f), f.m() - 1, f.n() - 1);
}

/// Exact inverse of biquadratic_to_tripartite: set z = 1, then restore
/// bidegree (2, 2) with powers of x_m and y_n.
template <class T>
BiquadraticForm<T> tripartite_to_biquadratic(const TripartiteForm<T>& h) {
    const int m = h.mx + 1, n = h.ny + 1;
    Polynomial<T> g = dehomogenize(h);
    Polynomial<T> f;
    for (const auto& [mono, c] : g.terms()) {
        const int dx = mono.degree_in(VarBlock::X), dy = mono.degree_in(VarBlock::Y);
        f.add_term(mono * Monomial::var({VarBlock::X, m - 1}, 2 - dx) *
                       Monomial::var({VarBlock::Y, n - 1}, 2 - dy),
                   c);
    }
    return BiquadraticForm<T>::from_polynomial(m, n, f);
}

namespace detail {

template <class T>
void check_source_certificate(const SosCertificate<T>& c, const Polynomial<T>& target) {
    if (!c.verify(target, 1e-9).pass)
        throw InvalidCertificate("transport: certificate does not verify against its source form");
}

}  // namespace detail

/// Certificate transport for biquadratic -> tripartite: each bilinear square
/// is dehomogenized (x_m = y_n = 1) and re-homogenized with z, which is the
/// basis relabeling x_i y_k -> x_i y_k, x_i y_n -> x_i z, x_m y_k -> y_k z,
/// x_m y_n -> z^2. K is preserved.
template <class T>
SosCertificate<T> transport_certificate(const SosCertificate<T>& c, const BiquadraticForm<T>& f) {
    const int m = f.m(), n = f.n();
    if (m < 2 || n < 2) throw InvalidShape("transport needs m >= 2 and n >= 2");
    if (c.basis != biquadratic_basis(m, n))
        throw InvalidCertificate("transport: certificate basis is not the bilinear basis");
    detail::check_source_certificate(c, f.to_polynomial());
    const std::vector<Monomial> hbasis = tripartite_basis(m - 1, n - 1);
    // Position of each f-basis monomial (i, k) in the h-basis.
    auto hpos = [&](int i, int k) -> size_t {
        const int mm = m - 1, nn = n - 1;
        if (i < mm && k < nn) return (size_t)i * nn + k;
        if (i < mm) return (size_t)mm * nn + i;           // x_i z
        if (k < nn) return (size_t)mm * nn + mm + k;      // y_k z
        return hbasis.size() - 1;                         // z^2
    };
    SosCertificate<T> out;
    out.basis = hbasis;
    out.weights = c.weights;
    for (const auto& row : c.squares) {
        std::vector<T> nrow(hbasis.size(), scalar_traits<T>::zero());
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < n; ++k) nrow[hpos(i, k)] = row[(size_t)i * n + k];
        out.squares.push_back(std::move(nrow));
    }
    return out;
}

/// Inverse transport, tripartite -> biquadratic (z = 1, re-homogenize with
/// x_m and y_n).
template <class T>
SosCertificate<T> transport_certificate(const SosCertificate<T>& c, const TripartiteForm<T>& h) {
    const int mm = h.mx, nn = h.ny;
    if (c.basis != tripartite_basis(mm, nn))
        throw InvalidCertificate("transport: certificate basis is not the tripartite basis");
    detail::check_source_certificate(c, h.to_polynomial());
    const int m = mm + 1, n = nn + 1;
    SosCertificate<T> out;
    out.basis = biquadratic_basis(m, n);
    out.weights = c.weights;
    for (const auto& row : c.squares) {
        std::vector<T> nrow((size_t)m * n, scalar_traits<T>::zero());
        for (int i = 0; i < mm; ++i)
            for (int k = 0; k < nn; ++k) nrow[(size_t)i * n + k] = row[(size_t)i * nn + k];
        for (int i = 0; i < mm; ++i) nrow[(size_t)i * n + (n - 1)] = row[(size_t)mm * nn + i];
        for (int k = 0; k < nn; ++k) nrow[(size_t)(m - 1) * n + k] = row[(size_t)mm * nn + mm + k];
        nrow[(size_t)(m - 1) * n + (n - 1)] = row[c.basis.size() - 1];
        out.squares.push_back(std::move(nrow));
    }
    return out;
}

/// Orthogonal reflection-based change moving a known zero (xstar, ystar) of a
/// psd form to the axis pair (e_m, e_n).
inline std::pair<BiquadraticForm<double>, LinearChange<double>> shift_zero_to_axis(
    const BiquadraticForm<double>& f, const std::vector<double>& xstar,
    const std::vector<double>& ystar) {
    if ((int)xstar.size() != f.m() || (int)ystar.size() != f.n())
        throw InvalidInput("shift_zero_to_axis: vector sizes must be (m, n)");
    auto norm2 = [](const std::vector<double>& v) {
        double s = 0;
        for (double t : v) s += t * t;
        return s;
    };
    const double nx2 = norm2(xstar), ny2 = norm2(ystar);
    if (nx2 <= 0 || ny2 <= 0) throw InvalidInput("shift_zero_to_axis: zero vector");
    const double val = f.evaluate(xstar, ystar);
    if (std::abs(val) > 1e-8 * scalar_traits<double>::to_double(f.norm_inf()) * nx2 * ny2)
        throw NotAZero("shift_zero_to_axis: form does not vanish at the given point");

    // Householder mapping the last axis vector to u; the sign choice keeps
    // the reflection vector well away from zero.
    auto axis_to = [](const std::vector<double>& target) {
        const int d = (int)target.size();
        Eigen::VectorXd u(d);
        for (int i = 0; i < d; ++i) u[i] = target[i];
        u.normalize();
        const double s = u[d - 1] >= 0 ? 1.0 : -1.0;
        Eigen::VectorXd v = u;
        v[d - 1] += s;
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d) - (2.0 / v.squaredNorm()) * v * v.transpose();
        H.col(d - 1) *= -s;  // now H maps e_d to u
        std::vector<std::vector<double>> P(d, std::vector<double>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) P[i][j] = H(i, j);
        return P;
    };
    LinearChange<double> ch{axis_to(xstar), axis_to(ystar)};
    return {apply_change(f, ch), ch};
}

struct PdReduction {
    double c = 0.0;                  // minimum of f on the sphere product
    LinearChange<double> change;     // orthogonal change used for the shift
    TripartiteForm<double> hhat;     // monic tripartite reduction (h0 = 1)
    M11Form<double> h;               // hhat - z^4, degenerated
};

/// Constructive reduction of a pd m x 2 form to a degenerated psd form with
/// one-dimensional y block: scale so the sphere-product minimum is 1, move
/// the minimizer to the axes, pass to the tripartite picture, and drop z^4.
inline PdReduction pd_reduce(const BiquadraticForm<double>& f, const OracleOptions& opts = {}) {
    if (f.n() != 2) throw InvalidShape("pd_reduce requires n = 2");
    if (f.m() < 2) throw InvalidShape("pd_reduce requires m >= 2");
    PsdVerdict v = min_on_spheres(f, opts);
    const double scale = 1.0 + scalar_traits<double>::to_double(f.norm_inf());
    if (v.min_value <= opts.tol * scale)
        throw NotPositiveDefinite("pd_reduce: sphere-product minimum is not positive");

    // Polish the minimizer to a mutual-eigenvector fixed point so that the
    // reduced form's z^3 component (the gradient at the minimizer) vanishes
    // to machine precision.
    std::vector<double> x = v.x, y = v.y;
    for (int it = 0; it < 100; ++it) {
        auto [ly, vy] = least_eigenpair(to_eigen(f.contract_x(x).M));
        std::vector<double> yn(vy.data(), vy.data() + vy.size());
        auto [lx, vx] = least_eigenpair(to_eigen(f.contract_y(yn).M));
        std::vector<double> xn(vx.data(), vx.data() + vx.size());
        double delta = 0;
        for (size_t i = 0; i < xn.size(); ++i) delta += std::abs(xn[i] - x[i]);
        for (size_t k = 0; k < yn.size(); ++k) delta += std::abs(yn[k] - y[k]);
        x = std::move(xn);
        y = std::move(yn);
        if (delta <= 1e-13) break;
    }
    const double c = f.evaluate(x, y);

    BiquadraticForm<double> fs = f;
    {
        BiquadraticForm<double> scaled(f.m(), f.n());
        for (const auto& [idx, val] : f.coeffs())
            scaled.set_coeff(idx.i, idx.j, idx.k, idx.l, val / c);
        fs = std::move(scaled);
    }
    // fs - (sum x_i^2)(sum y_k^2) is psd with an unconstrained zero at (x, y).
    BiquadraticForm<double> g = fs;
    for (int i = 0; i < f.m(); ++i)
        for (int k = 0; k < f.n(); ++k) g.add_coeff(i, i, k, k, -1.0);
    auto [gshift, ch] = shift_zero_to_axis(g, x, y);
    (void)gshift;  // the change is what we need; apply it to the scaled form
    BiquadraticForm<double> f1 = apply_change(fs, ch);

    PdReduction out;
    out.c = c;
    out.change = ch;
    out.hhat = biquadratic_to_tripartite(f1);
    const double hscale = 1.0 + out.hhat.norm_inf();
    if (std::abs(out.hhat.h0 - 1.0) > 1e-6 * hscale)
        throw Error("pd_reduce: reduced form is not monic (minimizer did not converge)");
    if (out.hhat.h1.norm_inf() > 1e-6 * hscale)
        throw Error("pd_reduce: z^3 component did not vanish (minimizer did not converge)");
    TripartiteForm<double> ht = out.hhat;
    ht.h0 = 0.0;
    ht.h1 = Polynomial<double>();
    out.h = M11Form<double>::from_tripartite(ht);
    return out;
}

}  // namespace bqsos
