#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "bqsos/errors.hpp"
#include "bqsos/scalar.hpp"

namespace bqsos {

/// Dense square symmetric matrix with explicit full storage. Used for the
/// small exact-arithmetic paths; floating-point numerics go through Eigen.
template <class T>
class SymMatrix {
   public:
    SymMatrix() = default;
    explicit SymMatrix(size_t n) : n_(n), a_(n * n, scalar_traits<T>::zero()) {}

    size_t size() const { return n_; }
    const T& operator()(size_t i, size_t j) const { return a_[i * n_ + j]; }

    void set(size_t i, size_t j, const T& v) {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }
    void add(size_t i, size_t j, const T& v) {
        a_[i * n_ + j] += v;
        if (i != j) a_[j * n_ + i] += v;
    }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

    template <class U>
    SymMatrix<U> convert() const {
        SymMatrix<U> r(n_);
        for (size_t i = 0; i < n_; ++i)
            for (size_t j = i; j < n_; ++j) {
                if constexpr (scalar_traits<T>::is_exact && !scalar_traits<U>::is_exact)
                    r.set(i, j, scalar_traits<T>::to_double((*this)(i, j)));
                else if constexpr (!scalar_traits<T>::is_exact && scalar_traits<U>::is_exact)
                    r.set(i, j, scalar_traits<U>::from_double((*this)(i, j)));
                else
                    r.set(i, j, (*this)(i, j));
            }
        return r;
    }

   private:
    size_t n_ = 0;
    std::vector<T> a_;
};

/// One square from a pivoted LDL^T factorization: weight * (linear form)^2
/// where the form's coefficients are over the original (unpermuted) basis.
template <class T>
struct WeightedSquare {
    T weight;               // strictly positive pivot
    std::vector<T> coeffs;  // length n, the row of L^T mapped back through the permutation
};

/// Exact pivoted LDL^T for a psd matrix: A = sum_k w_k q_k q_k^T with w_k > 0.
/// Pivots on the largest diagonal entry. Throws NotPsd when a negative pivot
/// or a nonzero row under a zero pivot shows up (both certify A is not psd).
template <class T>
std::vector<WeightedSquare<T>> ldlt_psd(SymMatrix<T> a) {
    const size_t n = a.size();
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;

    std::vector<WeightedSquare<T>> out;
    // Work on a plain copy indexed through perm.
    std::vector<std::vector<T>> m(n, std::vector<T>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) m[i][j] = a(i, j);

    for (size_t k = 0; k < n; ++k) {
        // Find largest remaining diagonal entry.
        size_t piv = k;
        for (size_t i = k + 1; i < n; ++i)
            if (m[perm[i]][perm[i]] > m[perm[piv]][perm[piv]]) piv = i;
        std::swap(perm[k], perm[piv]);
        const size_t p = perm[k];
        const T d = m[p][p];
        if (d < scalar_traits<T>::zero()) throw NotPsd("negative pivot in ldlt_psd");
        if (d == scalar_traits<T>::zero()) {
            // Remaining diagonal is <= d = 0; any nonzero off-diagonal row
            // entry would make a 2x2 principal minor negative.
            for (size_t i = k; i < n; ++i)
                for (size_t j = k; j < n; ++j)
                    if (!(m[perm[i]][perm[j]] == scalar_traits<T>::zero()))
                        throw NotPsd("zero pivot with nonzero residual in ldlt_psd");
            break;
        }
        WeightedSquare<T> sq;
        sq.weight = d;
        sq.coeffs.assign(n, scalar_traits<T>::zero());
        sq.coeffs[p] = scalar_traits<T>::one();
        for (size_t i = k + 1; i < n; ++i) {
            const size_t q = perm[i];
            sq.coeffs[q] = m[p][q] / d;
        }
        // Schur complement update on the trailing block.
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                const size_t qi = perm[i], qj = perm[j];
                m[qi][qj] -= sq.coeffs[qi] * d * sq.coeffs[qj];
            }
        out.push_back(std::move(sq));
    }
    return out;
}

/// Exact linear solve A x = b via Gaussian elimination with partial pivoting
/// (by "nonzero", exact arithmetic). Throws InvalidInput on singular A.
template <class T>
std::vector<T> solve_linear(std::vector<std::vector<T>> a, std::vector<T> b) {
    const size_t n = b.size();
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        if constexpr (scalar_traits<T>::is_exact) {
            while (piv < n && a[piv][k] == scalar_traits<T>::zero()) ++piv;
            if (piv == n) throw InvalidInput("singular system in solve_linear");
        } else {
            for (size_t i = k + 1; i < n; ++i)
                if (scalar_traits<T>::abs(a[i][k]) > scalar_traits<T>::abs(a[piv][k])) piv = i;
            if (scalar_traits<T>::abs(a[piv][k]) == scalar_traits<T>::zero())
                throw InvalidInput("singular system in solve_linear");
        }
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (size_t i = k + 1; i < n; ++i) {
            if (a[i][k] == scalar_traits<T>::zero()) continue;
            const T f = a[i][k] / a[k][k];
            for (size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<T> x(n, scalar_traits<T>::zero());
    for (size_t i = n; i-- > 0;) {
        T s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace bqsos
