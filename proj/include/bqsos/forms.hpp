#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "bqsos/errors.hpp"
#include "bqsos/linalg.hpp"
#include "bqsos/polynomial.hpp"
#include "bqsos/scalar.hpp"
#include "bqsos/variable.hpp"

namespace bqsos {

/// Canonical coefficient index of a biquadratic form: i <= j, k <= l, 0-based.
struct Idx4 {
    int i, j, k, l;
    friend auto operator<=>(const Idx4&, const Idx4&) = default;
};

/// A quadratic form v^T M v over an ordered variable list.
template <class T>
struct QuadraticForm {
    std::vector<Var> vars;
    SymMatrix<T> M;

    T value(const std::vector<T>& v) const {
        if (v.size() != vars.size()) throw InvalidInput("quadratic form: dimension mismatch");
        T r = scalar_traits<T>::zero();
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = 0; j < v.size(); ++j) r += v[i] * M(i, j) * v[j];
        return r;
    }

    Polynomial<T> to_polynomial() const {
        Polynomial<T> p;
        for (size_t i = 0; i < vars.size(); ++i)
            for (size_t j = i; j < vars.size(); ++j) {
                const T full = (i == j) ? M(i, i) : T(2) * M(i, j);
                if (!(full == scalar_traits<T>::zero()))
                    p.add_term(Monomial::var(vars[i]) * Monomial::var(vars[j]), full);
            }
        return p;
    }
};

struct CoeffEntry {
    Idx4 idx;
    double value;
};

/// f(x, y) = sum over i<=j, k<=l of a_{ijkl} * x_i x_j y_k y_l, where the
/// stored a_{ijkl} is the full coefficient of the expanded monomial.
template <class T>
class BiquadraticForm {
   public:
    BiquadraticForm() = default;
    BiquadraticForm(int m, int n) : m_(m), n_(n) {
        if (m < 1 || n < 1) throw InvalidShape("biquadratic form needs m >= 1, n >= 1");
    }

    /// Builds from (possibly unordered, possibly repeated) index entries;
    /// repeated canonical indices accumulate.
    static BiquadraticForm from_entries(int m, int n, const std::vector<std::pair<Idx4, T>>& entries) {
        BiquadraticForm f(m, n);
        for (const auto& [idx, v] : entries) f.add_coeff(idx.i, idx.j, idx.k, idx.l, v);
        return f;
    }

    int m() const { return m_; }
    int n() const { return n_; }
    const std::map<Idx4, T>& coeffs() const { return a_; }

    /// Symmetric query: index order within each pair does not matter.
    T coeff(int i, int j, int k, int l) const {
        auto it = a_.find(canonical(i, j, k, l));
        return it == a_.end() ? scalar_traits<T>::zero() : it->second;
    }

    void set_coeff(int i, int j, int k, int l, const T& v) {
        const Idx4 c = canonical(i, j, k, l);
        if (v == scalar_traits<T>::zero())
            a_.erase(c);
        else
            a_[c] = v;
    }

    void add_coeff(int i, int j, int k, int l, const T& v) {
        const Idx4 c = canonical(i, j, k, l);
        auto [it, inserted] = a_.try_emplace(c, v);
        if (!inserted) {
            it->second += v;
            if (it->second == scalar_traits<T>::zero()) a_.erase(it);
        } else if (v == scalar_traits<T>::zero()) {
            a_.erase(it);
        }
    }

    T norm_inf() const {
        T r = scalar_traits<T>::zero();
        for (const auto& [idx, v] : a_) r = std::max(r, scalar_traits<T>::abs(v));
        return r;
    }

    bool is_zero() const { return a_.empty(); }

    T evaluate(const std::vector<T>& x, const std::vector<T>& y) const {
        if ((int)x.size() != m_ || (int)y.size() != n_)
            throw InvalidInput("evaluate: vector sizes must be (m, n)");
        T r = scalar_traits<T>::zero();
        for (const auto& [idx, v] : a_) r += v * x[idx.i] * x[idx.j] * y[idx.k] * y[idx.l];
        return r;
    }

    /// Quadratic form in y after fixing x: y^T A(x) y = f(x, y).
    QuadraticForm<T> contract_x(const std::vector<T>& x) const {
        if ((int)x.size() != m_) throw InvalidInput("contract_x: |x| != m");
        QuadraticForm<T> q;
        for (int k = 0; k < n_; ++k) q.vars.push_back({VarBlock::Y, k});
        q.M = SymMatrix<T>(n_);
        const T half = scalar_traits<T>::one() / T(2);
        for (const auto& [idx, v] : a_) {
            const T w = v * x[idx.i] * x[idx.j];
            if (idx.k == idx.l)
                q.M.add(idx.k, idx.k, w);
            else
                q.M.add(idx.k, idx.l, w * half);  // symmetric add splits across (k,l),(l,k)
        }
        return q;
    }

    /// Quadratic form in x after fixing y: x^T B(y) x = f(x, y).
    QuadraticForm<T> contract_y(const std::vector<T>& y) const {
        if ((int)y.size() != n_) throw InvalidInput("contract_y: |y| != n");
        QuadraticForm<T> q;
        for (int i = 0; i < m_; ++i) q.vars.push_back({VarBlock::X, i});
        q.M = SymMatrix<T>(m_);
        const T half = scalar_traits<T>::one() / T(2);
        for (const auto& [idx, v] : a_) {
            const T w = v * y[idx.k] * y[idx.l];
            if (idx.i == idx.j)
                q.M.add(idx.i, idx.i, w);
            else
                q.M.add(idx.i, idx.j, w * half);
        }
        return q;
    }

    Polynomial<T> to_polynomial() const {
        Polynomial<T> p;
        for (const auto& [idx, v] : a_) {
            Monomial mono = Monomial::var({VarBlock::X, idx.i}) * Monomial::var({VarBlock::X, idx.j}) *
                            Monomial::var({VarBlock::Y, idx.k}) * Monomial::var({VarBlock::Y, idx.l});
            p.add_term(mono, v);
        }
        return p;
    }

    /// Inverse of to_polynomial for polynomials that are exactly biquadratic
    /// (every term of degree 2 in the x-block and 2 in the y-block).
    static BiquadraticForm from_polynomial(int m, int n, const Polynomial<T>& p) {
        BiquadraticForm f(m, n);
        for (const auto& [mono, c] : p.terms()) {
            int xi[2], yi[2];
            int nx = 0, ny = 0;
            for (const auto& [v, e] : mono.factors()) {
                for (int t = 0; t < e; ++t) {
                    if (v.block == VarBlock::X) {
                        if (nx == 2) throw InvalidShape("term has x-degree > 2");
                        xi[nx++] = v.index;
                    } else if (v.block == VarBlock::Y) {
                        if (ny == 2) throw InvalidShape("term has y-degree > 2");
                        yi[ny++] = v.index;
                    } else {
                        throw InvalidShape("term mentions z");
                    }
                }
            }
            if (nx != 2 || ny != 2) throw InvalidShape("term is not bidegree (2,2)");
            f.add_coeff(xi[0], xi[1], yi[0], yi[1], c);
        }
        return f;
    }

    template <class U>
    BiquadraticForm<U> convert() const {
        BiquadraticForm<U> r(m_, n_);
        for (const auto& [idx, v] : a_) {
            if constexpr (scalar_traits<T>::is_exact && !scalar_traits<U>::is_exact)
                r.add_coeff(idx.i, idx.j, idx.k, idx.l, scalar_traits<T>::to_double(v));
            else if constexpr (!scalar_traits<T>::is_exact && scalar_traits<U>::is_exact)
                r.add_coeff(idx.i, idx.j, idx.k, idx.l, scalar_traits<U>::from_double(v));
            else
                r.add_coeff(idx.i, idx.j, idx.k, idx.l, v);
        }
        return r;
    }

    friend bool operator==(const BiquadraticForm&, const BiquadraticForm&) = default;

   private:
    int m_ = 0, n_ = 0;
    std::map<Idx4, T> a_;

    Idx4 canonical(int i, int j, int k, int l) const {
        if (i < 0 || j < 0 || i >= m_ || j >= m_) throw InvalidIndex("x index out of range");
        if (k < 0 || l < 0 || k >= n_ || l >= n_) throw InvalidIndex("y index out of range");
        if (i > j) std::swap(i, j);
        if (k > l) std::swap(k, l);
        return {i, j, k, l};
    }
};

template <class T>
BiquadraticForm<T> canonicalize(int m, int n, const std::vector<std::pair<Idx4, T>>& entries) {
    return BiquadraticForm<T>::from_entries(m, n, entries);
}

}  // namespace bqsos
