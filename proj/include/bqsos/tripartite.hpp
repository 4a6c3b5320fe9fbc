#pragma once

#include <vector>

#include "bqsos/errors.hpp"
#include "bqsos/forms.hpp"
#include "bqsos/linalg.hpp"
#include "bqsos/polynomial.hpp"

namespace bqsos {

/// Homogeneous quartic in (x, y, z) with per-term x-degree <= 2 and
/// y-degree <= 2, stored graded by z-degree:
///   h = h0 z^4 + h1 z^3 + h2 z^2 + h3 z + h4,
/// where h_d is a degree-d polynomial in (x, y) alone and h4 is biquadratic.
template <class T>
struct TripartiteForm {
    int mx = 0, ny = 0;
    T h0 = scalar_traits<T>::zero();
    Polynomial<T> h1, h2, h3;
    BiquadraticForm<T> h4;

    /// Degenerated means no z^4 term.
    bool is_degenerated() const {
        if constexpr (scalar_traits<T>::is_exact) return h0 == 0;
        return scalar_traits<T>::abs(h0) <= 1e-12 * (1.0 + scalar_traits<T>::to_double(norm_inf()));
    }

    T norm_inf() const {
        T r = scalar_traits<T>::abs(h0);
        r = std::max(r, h1.norm_inf());
        r = std::max(r, h2.norm_inf());
        r = std::max(r, h3.norm_inf());
        r = std::max(r, h4.norm_inf());
        return r;
    }

    Polynomial<T> to_polynomial() const {
        const Var z{VarBlock::Z, 0};
        auto zp = [&](int e) { return Polynomial<T>::monomial_term(Monomial::var(z, e), scalar_traits<T>::one()); };
        Polynomial<T> p = Polynomial<T>(h0) * zp(4);
        p += h1 * zp(3);
        p += h2 * zp(2);
        p += h3 * zp(1);
        p += h4.to_polynomial();
        return p;
    }

    T evaluate(const std::vector<T>& x, const std::vector<T>& y, const T& z) const {
        if ((int)x.size() != mx || (int)y.size() != ny) throw InvalidShape("evaluate: bad vector sizes");
        auto at = [&](const Var& v) -> T {
            switch (v.block) {
                case VarBlock::X: return x[v.index];
                case VarBlock::Y: return y[v.index];
                case VarBlock::Z: return z;
            }
            throw InvalidInput("bad variable");
        };
        const T z2 = z * z;
        return h0 * z2 * z2 + h1.evaluate(at) * z2 * z + h2.evaluate(at) * z2 + h3.evaluate(at) * z +
               h4.evaluate(x, y);
    }

    template <class U>
    TripartiteForm<U> convert() const {
        TripartiteForm<U> r;
        r.mx = mx;
        r.ny = ny;
        if constexpr (scalar_traits<T>::is_exact && !scalar_traits<U>::is_exact)
            r.h0 = scalar_traits<T>::to_double(h0);
        else if constexpr (!scalar_traits<T>::is_exact && scalar_traits<U>::is_exact)
            r.h0 = scalar_traits<U>::from_double(h0);
        else
            r.h0 = h0;
        r.h1 = h1.template convert<U>();
        r.h2 = h2.template convert<U>();
        r.h3 = h3.template convert<U>();
        r.h4 = h4.template convert<U>();
        return r;
    }
};

/// Splits a polynomial into z-graded tripartite components. Throws
/// NotTripartite when any term is not quartic, has x-degree > 2, or has
/// y-degree > 2.
template <class T>
TripartiteForm<T> extract_components(int mx, int ny, const Polynomial<T>& p) {
    if (mx < 1 || ny < 1) throw InvalidShape("extract_components: need mx >= 1, ny >= 1");
    TripartiteForm<T> h;
    h.mx = mx;
    h.ny = ny;
    h.h4 = BiquadraticForm<T>(mx, ny);
    Polynomial<T> h4p;
    for (const auto& [m, c] : p.terms()) {
        if (m.total_degree() != 4) throw NotTripartite("term of degree != 4: " + to_string(m));
        if (m.degree_in(VarBlock::X) > 2) throw NotTripartite("term with x-degree > 2: " + to_string(m));
        if (m.degree_in(VarBlock::Y) > 2) throw NotTripartite("term with y-degree > 2: " + to_string(m));
        for (const auto& [v, e] : m.factors()) {
            if (v.block == VarBlock::X && v.index >= mx) throw NotTripartite("x index out of range");
            if (v.block == VarBlock::Y && v.index >= ny) throw NotTripartite("y index out of range");
        }
        const int dz = m.degree_in(VarBlock::Z);
        std::vector<std::pair<Var, int>> rest;
        for (const auto& [v, e] : m.factors())
            if (v.block != VarBlock::Z) rest.push_back({v, e});
        const Monomial xy(std::move(rest));
        switch (dz) {
            case 4: h.h0 += c; break;
            case 3: h.h1.add_term(xy, c); break;
            case 2: h.h2.add_term(xy, c); break;
            case 1: h.h3.add_term(xy, c); break;
            case 0: h4p.add_term(xy, c); break;
        }
    }
    h.h4 = BiquadraticForm<T>::from_polynomial(mx, ny, h4p);
    return h;
}

/// Degenerated psd-style tripartite form with a one-dimensional y block:
///   h = x^T H2 x z^2 + x^T H3 x yz + x^T H4 x y^2
///     + (h5 . x) yz^2 + (h6 . x) y^2 z + h7 y^2 z^2.
/// Quadratic forms use the matrix convention, so the expanded coefficient of
/// x_i x_j (i < j) is twice the stored off-diagonal entry.
template <class T>
struct M11Form {
    int dim = 0;
    SymMatrix<T> H2, H3, H4;
    std::vector<T> h5, h6;
    T h7 = scalar_traits<T>::zero();

    static M11Form zero(int dim) {
        M11Form f;
        f.dim = dim;
        f.H2 = SymMatrix<T>(dim);
        f.H3 = SymMatrix<T>(dim);
        f.H4 = SymMatrix<T>(dim);
        f.h5.assign(dim, scalar_traits<T>::zero());
        f.h6.assign(dim, scalar_traits<T>::zero());
        return f;
    }

    /// Requires a degenerated form (h0 = 0), no z^3 part, and ny == 1.
    static M11Form from_tripartite(const TripartiteForm<T>& t) {
        if (t.ny != 1) throw InvalidShape("from_tripartite: y block must be one-dimensional");
        if (!(t.h0 == scalar_traits<T>::zero()) || !t.h1.is_zero())
            throw InvalidShape("from_tripartite: form must be degenerated with no z^3 part");
        M11Form f = zero(t.mx);
        const Var y{VarBlock::Y, 0};
        auto split_quadratic = [&](const Polynomial<T>& q, int want_ydeg, SymMatrix<T>& M,
                                   std::vector<T>* lin, T* cst) {
            for (const auto& [m, c] : q.terms()) {
                const int dy = m.exponent(y);
                const int dx = m.degree_in(VarBlock::X);
                int xi[2], nx = 0;
                for (const auto& [v, e] : m.factors())
                    if (v.block == VarBlock::X)
                        for (int k = 0; k < e; ++k) xi[nx++] = v.index;
                if (dy == 0 && dx == 2) {
                    if (xi[0] == xi[1])
                        M.add(xi[0], xi[0], c);
                    else
                        M.add(xi[0], xi[1], c / T(2));
                } else if (dy == want_ydeg && dx == 2 - want_ydeg && want_ydeg == 1 && lin) {
                    (*lin)[xi[0]] += c;
                } else if (dy == 2 && dx == 0 && cst) {
                    *cst += c;
                } else {
                    throw InvalidShape("from_tripartite: unexpected term " + to_string(m));
                }
            }
        };
        // z^2 coefficient: x-quadratic + (h5 . x) y + h7 y^2.
        split_quadratic(t.h2, 1, f.H2, &f.h5, &f.h7);
        // z coefficient: x^T H3 x * y + (h6 . x) y^2.
        for (const auto& [m, c] : t.h3.terms()) {
            const int dy = m.exponent(y);
            int xi[2], nx = 0;
            for (const auto& [v, e] : m.factors())
                if (v.block == VarBlock::X)
                    for (int k = 0; k < e; ++k) xi[nx++] = v.index;
            if (dy == 1 && nx == 2) {
                if (xi[0] == xi[1])
                    f.H3.add(xi[0], xi[0], c);
                else
                    f.H3.add(xi[0], xi[1], c / T(2));
            } else if (dy == 2 && nx == 1) {
                f.h6[xi[0]] += c;
            } else {
                throw InvalidShape("from_tripartite: unexpected term " + to_string(m));
            }
        }
        // z^0 part: x^T H4 x * y^2.
        for (const auto& [idx, c] : t.h4.coeffs()) {
            if (idx.i == idx.j)
                f.H4.add(idx.i, idx.i, c);
            else
                f.H4.add(idx.i, idx.j, c / T(2));
        }
        return f;
    }

    TripartiteForm<T> to_tripartite() const {
        TripartiteForm<T> t;
        t.mx = dim;
        t.ny = 1;
        t.h4 = BiquadraticForm<T>(dim, 1);
        const Var y{VarBlock::Y, 0};
        auto quad_poly = [&](const SymMatrix<T>& M) {
            Polynomial<T> q;
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j) {
                    const T full = (i == j) ? M(i, i) : T(2) * M(i, j);
                    if (full == scalar_traits<T>::zero()) continue;
                    q.add_term(Monomial::var({VarBlock::X, i}) * Monomial::var({VarBlock::X, j}), full);
                }
            return q;
        };
        const Polynomial<T> yp = Polynomial<T>::variable(y);
        Polynomial<T> lin5, lin6;
        for (int i = 0; i < dim; ++i) {
            lin5 += Polynomial<T>::monomial_term(Monomial::var({VarBlock::X, i}), h5[i]);
            lin6 += Polynomial<T>::monomial_term(Monomial::var({VarBlock::X, i}), h6[i]);
        }
        t.h2 = quad_poly(H2) + lin5 * yp + Polynomial<T>(h7) * yp * yp;
        t.h3 = quad_poly(H3) * yp + lin6 * yp * yp;
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const T full = (i == j) ? H4(i, i) : T(2) * H4(i, j);
                if (!(full == scalar_traits<T>::zero())) t.h4.add_coeff(i, j, 0, 0, full);
            }
        return t;
    }

    Polynomial<T> to_polynomial() const { return to_tripartite().to_polynomial(); }

    T evaluate(const std::vector<T>& x, const T& y, const T& z) const {
        return to_tripartite().evaluate(x, {y}, z);
    }

    /// Keeps only the x-quadratic components and reads (y, z) as a
    /// two-dimensional block: coefficient of x_i x_j y^2 from H4, of
    /// x_i x_j yz from H3, of x_i x_j z^2 from H2.
    BiquadraticForm<T> pure_slice() const {
        BiquadraticForm<T> f(dim, 2);
        auto put = [&](const SymMatrix<T>& M, int k, int l) {
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j) {
                    const T full = (i == j) ? M(i, i) : T(2) * M(i, j);
                    if (!(full == scalar_traits<T>::zero())) f.add_coeff(i, j, k, l, full);
                }
        };
        put(H4, 0, 0);
        put(H3, 0, 1);
        put(H2, 1, 1);
        return f;
    }

    /// Substitutes x = P x' (old variables in terms of new); quadratic forms
    /// map H -> P^T H P, linear parts map h -> P^T h.
    M11Form apply_x_change(const std::vector<std::vector<T>>& P) const {
        if ((int)P.size() != dim) throw InvalidShape("apply_x_change: bad matrix size");
        M11Form r = zero(dim);
        r.h7 = h7;
        auto congruence = [&](const SymMatrix<T>& M, SymMatrix<T>& out) {
            for (int a = 0; a < dim; ++a)
                for (int b = a; b < dim; ++b) {
                    T s = scalar_traits<T>::zero();
                    for (int i = 0; i < dim; ++i)
                        for (int j = 0; j < dim; ++j) s += P[i][a] * M(i, j) * P[j][b];
                    out.set(a, b, s);
                }
        };
        congruence(H2, r.H2);
        congruence(H3, r.H3);
        congruence(H4, r.H4);
        for (int a = 0; a < dim; ++a) {
            T s5 = scalar_traits<T>::zero(), s6 = scalar_traits<T>::zero();
            for (int i = 0; i < dim; ++i) {
                s5 += P[i][a] * h5[i];
                s6 += P[i][a] * h6[i];
            }
            r.h5[a] = s5;
            r.h6[a] = s6;
        }
        return r;
    }

    /// Swapping the roles of y and z fixes H3 and h7, exchanges H2 with H4,
    /// and exchanges h5 with h6.
    M11Form swap_yz() const {
        M11Form r = *this;
        std::swap(r.H2, r.H4);
        std::swap(r.h5, r.h6);
        return r;
    }

    T norm_inf() const { return to_tripartite().norm_inf(); }

    template <class U>
    M11Form<U> convert() const {
        return M11Form<U>::from_tripartite(to_tripartite().template convert<U>());
    }
};

/// Two-dimensional x block with the fourteen coefficients named:
///   hbar2 = b11 x1^2 + b12 x1 x2 + b22 x2^2        (z^2 part)
///   yz part = c11 x1^2 + c12 x1 x2 + c22 x2^2
///   c1y, c2y: coefficients of x_i y^2 z
///   c1z, c2z: coefficients of x_i y z^2
///   hbar4 = d11 x1^2 + d12 x1 x2 + d22 x2^2        (y^2 part)
///   h7: coefficient of y^2 z^2.
template <class T>
class Form211 {
   public:
    Form211() : m_(M11Form<T>::zero(2)) {}
    explicit Form211(M11Form<T> m) : m_(std::move(m)) {
        if (m_.dim != 2) throw InvalidShape("Form211 needs a two-dimensional x block");
    }
    Form211(T b11, T b12, T b22, T c11, T c12, T c22, T c1y, T c2y, T c1z, T c2z, T d11, T d12, T d22,
            T h7)
        : m_(M11Form<T>::zero(2)) {
        const T half = scalar_traits<T>::one() / T(2);
        m_.H2.set(0, 0, b11);
        m_.H2.set(0, 1, b12 * half);
        m_.H2.set(1, 1, b22);
        m_.H3.set(0, 0, c11);
        m_.H3.set(0, 1, c12 * half);
        m_.H3.set(1, 1, c22);
        m_.h6 = {c1y, c2y};
        m_.h5 = {c1z, c2z};
        m_.H4.set(0, 0, d11);
        m_.H4.set(0, 1, d12 * half);
        m_.H4.set(1, 1, d22);
        m_.h7 = h7;
    }

    const M11Form<T>& m11() const { return m_; }

    T b11() const { return m_.H2(0, 0); }
    T b12() const { return T(2) * m_.H2(0, 1); }
    T b22() const { return m_.H2(1, 1); }
    T c11() const { return m_.H3(0, 0); }
    T c12() const { return T(2) * m_.H3(0, 1); }
    T c22() const { return m_.H3(1, 1); }
    T c1y() const { return m_.h6[0]; }
    T c2y() const { return m_.h6[1]; }
    T c1z() const { return m_.h5[0]; }
    T c2z() const { return m_.h5[1]; }
    T d11() const { return m_.H4(0, 0); }
    T d12() const { return T(2) * m_.H4(0, 1); }
    T d22() const { return m_.H4(1, 1); }
    T h7() const { return m_.h7; }

    Form211 swap_yz() const { return Form211(m_.swap_yz()); }
    Form211 apply_x_change(const std::vector<std::vector<T>>& P) const {
        return Form211(m_.apply_x_change(P));
    }

    Polynomial<T> to_polynomial() const { return m_.to_polynomial(); }
    T evaluate(const std::vector<T>& x, const T& y, const T& z) const { return m_.evaluate(x, y, z); }

    Polynomial<T> hbar2_poly() const { return quad_poly(m_.H2); }
    Polynomial<T> hbar4_poly() const { return quad_poly(m_.H4); }

    /// Full z-coefficient of h divided by y: quadratic in (x1, x2, y).
    Polynomial<T> hbar3_poly() const {
        Polynomial<T> p = quad_poly(m_.H3);
        const Var y{VarBlock::Y, 0};
        for (int i = 0; i < 2; ++i)
            p.add_term(Monomial::var({VarBlock::X, i}) * Monomial::var(y), m_.h6[i]);
        return p;
    }

    /// Full z^2-coefficient of h: quadratic in (x1, x2, y).
    Polynomial<T> h2_full_poly() const {
        Polynomial<T> p = quad_poly(m_.H2);
        const Var y{VarBlock::Y, 0};
        for (int i = 0; i < 2; ++i)
            p.add_term(Monomial::var({VarBlock::X, i}) * Monomial::var(y), m_.h5[i]);
        p.add_term(Monomial::var(y, 2), m_.h7);
        return p;
    }

   private:
    M11Form<T> m_;

    static Polynomial<T> quad_poly(const SymMatrix<T>& M) {
        Polynomial<T> q;
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                const T full = (i == j) ? M(i, i) : T(2) * M(i, j);
                if (!(full == scalar_traits<T>::zero()))
                    q.add_term(Monomial::var({VarBlock::X, i}) * Monomial::var({VarBlock::X, j}), full);
            }
        return q;
    }
};

}  // namespace bqsos
