#pragma once

#include <string>
#include <vector>

#include "bqsos/errors.hpp"
#include "bqsos/polynomial.hpp"
#include "bqsos/variable.hpp"

namespace bqsos {

struct ResidualReport {
    double max_abs = 0.0;
    double l2 = 0.0;
    bool pass = false;
};

/// A sum-of-squares certificate: target = sum_k w_k * (squares[k] . basis)^2.
/// Weights default to 1 when the list is empty; exact-arithmetic
/// factorizations produce genuinely weighted squares, the floating path folds
/// sqrt(w) into the rows.
template <class T>
struct SosCertificate {
    std::vector<Monomial> basis;
    std::vector<std::vector<T>> squares;  // each row has basis.size() entries
    std::vector<T> weights;               // empty, or one positive weight per row

    size_t length() const { return squares.size(); }

    void validate() const {
        for (const auto& row : squares)
            if (row.size() != basis.size()) throw InvalidCertificate("square row size != basis size");
        if (!weights.empty()) {
            if (weights.size() != squares.size())
                throw InvalidCertificate("weight count != square count");
            for (const auto& w : weights)
                if (!(w > scalar_traits<T>::zero())) throw InvalidCertificate("weights must be positive");
        }
    }

    Polynomial<T> expand() const {
        validate();
        Polynomial<T> total;
        for (size_t k = 0; k < squares.size(); ++k) {
            Polynomial<T> g;
            for (size_t b = 0; b < basis.size(); ++b)
                g.add_term(basis[b], squares[k][b]);
            Polynomial<T> sq = g * g;
            if (!weights.empty()) sq *= weights[k];
            total += sq;
        }
        return total;
    }

    ResidualReport verify(const Polynomial<T>& target, double tol = 1e-8) const {
        const Polynomial<T> diff = expand() - target;
        ResidualReport rep;
        double l2sq = 0.0;
        for (const auto& [m, c] : diff.terms()) {
            const double a = std::abs(scalar_traits<T>::to_double(c));
            rep.max_abs = std::max(rep.max_abs, a);
            l2sq += a * a;
        }
        rep.l2 = std::sqrt(l2sq);
        const double scale = 1.0 + scalar_traits<T>::to_double(target.norm_inf());
        rep.pass = rep.max_abs <= tol * scale;
        return rep;
    }

    template <class U>
    SosCertificate<U> convert() const {
        auto conv = [](const T& v) {
            if constexpr (scalar_traits<T>::is_exact && !scalar_traits<U>::is_exact)
                return scalar_traits<T>::to_double(v);
            else if constexpr (!scalar_traits<T>::is_exact && scalar_traits<U>::is_exact)
                return scalar_traits<U>::from_double(v);
            else
                return v;
        };
        SosCertificate<U> r;
        r.basis = basis;
        for (const auto& row : squares) {
            std::vector<U> out;
            out.reserve(row.size());
            for (const auto& v : row) out.push_back(conv(v));
            r.squares.push_back(std::move(out));
        }
        for (const auto& w : weights) r.weights.push_back(conv(w));
        return r;
    }
};

}  // namespace bqsos
