#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bqsos/scalar.hpp"
#include "bqsos/variable.hpp"

namespace bqsos {

/// Sparse multivariate polynomial over T with graded-lex ordered terms.
/// Coefficients that become zero are erased on the spot; in floating point a
/// coefficient counts as zero when |c| <= 1e-14 * (largest |coeff|).
template <class T>
class Polynomial {
   public:
    using TermMap = std::map<Monomial, T, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(T constant) {
        if (!(constant == scalar_traits<T>::zero())) terms_[Monomial()] = std::move(constant);
    }

    static Polynomial variable(Var v) { return monomial_term(Monomial::var(v), scalar_traits<T>::one()); }
    static Polynomial monomial_term(const Monomial& m, T coeff) {
        Polynomial p;
        if (!(coeff == scalar_traits<T>::zero())) p.terms_[m] = std::move(coeff);
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    T coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? scalar_traits<T>::zero() : it->second;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
        return d;
    }

    int degree_in(VarBlock b) const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(b));
        return d;
    }

    T norm_inf() const {
        T r = scalar_traits<T>::zero();
        for (const auto& [m, c] : terms_) r = std::max(r, scalar_traits<T>::abs(c));
        return r;
    }

    void add_term(const Monomial& m, const T& c) {
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == scalar_traits<T>::zero()) terms_.erase(it);
        } else if (c == scalar_traits<T>::zero()) {
            terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r;
        for (const auto& [m, c] : a.terms_) r.terms_[m] = -c;
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }

    Polynomial& operator*=(const T& s) {
        if (s == scalar_traits<T>::zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }
    friend Polynomial operator*(Polynomial p, const T& s) { return p *= s; }
    friend Polynomial operator*(const T& s, Polynomial p) { return p *= s; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    /// Substitutes each variable via `subs` (variables not in the map stay
    /// themselves). Substitution values are full polynomials.
    Polynomial substitute(const std::map<Var, Polynomial>& subs) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            Polynomial term(c);
            for (const auto& [v, e] : m.factors()) {
                auto it = subs.find(v);
                Polynomial base = (it == subs.end()) ? variable(v) : it->second;
                for (int k = 0; k < e; ++k) term = term * base;
            }
            r += term;
        }
        return r;
    }

    /// Evaluation with a total assignment; missing variables are an error.
    T evaluate(const std::function<T(const Var&)>& value_of) const {
        T r = scalar_traits<T>::zero();
        for (const auto& [m, c] : terms_) {
            T t = c;
            for (const auto& [v, e] : m.factors()) {
                const T x = value_of(v);
                for (int k = 0; k < e; ++k) t *= x;
            }
            r += t;
        }
        return r;
    }

    Polynomial derivative(const Var& v) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            const int e = m.exponent(v);
            if (e == 0) continue;
            std::vector<std::pair<Var, int>> rest;
            for (const auto& [w, k] : m.factors()) rest.push_back({w, w == v ? k - 1 : k});
            r.add_term(Monomial(std::move(rest)), c * T(e));
        }
        return r;
    }

    /// Collects the polynomial as coefficients of powers of one variable:
    /// result[d] multiplies v^d and does not mention v.
    std::vector<Polynomial> coefficients_in(const Var& v) const {
        std::vector<Polynomial> out;
        for (const auto& [m, c] : terms_) {
            const int d = m.exponent(v);
            std::vector<std::pair<Var, int>> rest;
            for (const auto& [w, e] : m.factors())
                if (!(w == v)) rest.push_back({w, e});
            if ((int)out.size() <= d) out.resize(d + 1);
            out[d].add_term(Monomial(std::move(rest)), c);
        }
        if (out.empty()) out.resize(1);
        return out;
    }

    /// Drops floating-point dust: terms with |c| <= 1e-14 * max |coeff|.
    void prune() {
        if constexpr (scalar_traits<T>::is_exact) return;
        if (terms_.empty()) return;
        const T cutoff = norm_inf() * T(1e-14);
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (scalar_traits<T>::abs(it->second) <= cutoff)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    template <class U>
    Polynomial<U> convert() const {
        Polynomial<U> r;
        for (const auto& [m, c] : terms_) {
            if constexpr (scalar_traits<T>::is_exact && !scalar_traits<U>::is_exact)
                r.add_term(m, scalar_traits<T>::to_double(c));
            else if constexpr (!scalar_traits<T>::is_exact && scalar_traits<U>::is_exact)
                r.add_term(m, scalar_traits<U>::from_double(c));
            else
                r.add_term(m, c);
        }
        return r;
    }

    friend std::string to_string(const Polynomial& p) {
        if (p.terms_.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : p.terms_) {
            if (!s.empty()) s += " + ";
            s += scalar_traits<T>::to_string(c);
            if (!m.is_one()) s += "*" + to_string(m);
        }
        return s;
    }

   private:
    TermMap terms_;
};

}  // namespace bqsos
