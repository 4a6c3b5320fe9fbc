#pragma once

#include <vector>

#include "bqsos/variable.hpp"

namespace bqsos {

/// Gram basis for an m x n biquadratic form: the bilinear monomials x_i y_k,
/// ordered with i outermost.
inline std::vector<Monomial> biquadratic_basis(int m, int n) {
    std::vector<Monomial> b;
    b.reserve((size_t)m * n);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < n; ++k)
            b.push_back(Monomial::var({VarBlock::X, i}) * Monomial::var({VarBlock::Y, k}));
    return b;
}

/// Gram basis for a tripartite quartic: {x_i y_k} then {x_i z} then {y_k z}
/// then {z^2}. Squares from this basis hit exactly the admissible monomials
/// (x-degree <= 2, y-degree <= 2).
inline std::vector<Monomial> tripartite_basis(int mx, int ny) {
    std::vector<Monomial> b = biquadratic_basis(mx, ny);
    const Monomial z = Monomial::var({VarBlock::Z, 0});
    for (int i = 0; i < mx; ++i) b.push_back(Monomial::var({VarBlock::X, i}) * z);
    for (int k = 0; k < ny; ++k) b.push_back(Monomial::var({VarBlock::Y, k}) * z);
    b.push_back(z * z);
    return b;
}

/// Gram basis for the one-dimensional-y degenerated case:
/// {x_1 z, ..., x_d z, x_1 y, ..., x_d y, yz}.
inline std::vector<Monomial> m11_basis(int dim) {
    std::vector<Monomial> b;
    const Monomial z = Monomial::var({VarBlock::Z, 0});
    const Monomial y = Monomial::var({VarBlock::Y, 0});
    for (int i = 0; i < dim; ++i) b.push_back(Monomial::var({VarBlock::X, i}) * z);
    for (int i = 0; i < dim; ++i) b.push_back(Monomial::var({VarBlock::X, i}) * y);
    b.push_back(y * z);
    return b;
}

/// All quadratic monomials in (x1, x2, y) — the fallback basis for quartic
/// discriminant-style polynomials in those three variables.
inline std::vector<Monomial> ternary_quadratic_basis() {
    const Monomial x1 = Monomial::var({VarBlock::X, 0});
    const Monomial x2 = Monomial::var({VarBlock::X, 1});
    const Monomial y = Monomial::var({VarBlock::Y, 0});
    return {x1 * x1, x1 * x2, x2 * x2, x1 * y, x2 * y, y * y};
}

}  // namespace bqsos
