#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bqsos/errors.hpp"

namespace bqsos {

/// Variable blocks for the tripartite setting: x_1..x_m, y_1..y_n, and the
/// single homogenizing/dehomogenizing variable z.
enum class VarBlock : uint8_t { X = 0, Y = 1, Z = 2 };

struct Var {
    VarBlock block;
    int index;  // 0-based; always 0 for Z

    friend auto operator<=>(const Var&, const Var&) = default;
};

inline std::string to_string(const Var& v) {
    switch (v.block) {
        case VarBlock::X: return "x" + std::to_string(v.index + 1);
        case VarBlock::Y: return "y" + std::to_string(v.index + 1);
        case VarBlock::Z: return "z";
    }
    throw InvalidInput("bad variable block");
}

/// A monomial as a sorted exponent vector: pairs (var, exp) with exp >= 1,
/// variables strictly increasing. The empty monomial is the constant 1.
class Monomial {
   public:
    Monomial() = default;
    explicit Monomial(std::vector<std::pair<Var, int>> factors) : factors_(std::move(factors)) {
        normalize();
    }

    static Monomial var(Var v, int exp = 1) {
        if (exp < 0) throw InvalidInput("negative exponent");
        if (exp == 0) return Monomial();
        return Monomial({{v, exp}});
    }

    const std::vector<std::pair<Var, int>>& factors() const { return factors_; }
    bool is_one() const { return factors_.empty(); }

    int total_degree() const {
        int d = 0;
        for (const auto& [v, e] : factors_) d += e;
        return d;
    }

    int degree_in(VarBlock b) const {
        int d = 0;
        for (const auto& [v, e] : factors_)
            if (v.block == b) d += e;
        return d;
    }

    int exponent(const Var& v) const {
        for (const auto& [w, e] : factors_)
            if (w == v) return e;
        return 0;
    }

    Monomial operator*(const Monomial& other) const {
        Monomial r;
        auto a = factors_.begin(), ae = factors_.end();
        auto b = other.factors_.begin(), be = other.factors_.end();
        while (a != ae && b != be) {
            if (a->first < b->first)
                r.factors_.push_back(*a++);
            else if (b->first < a->first)
                r.factors_.push_back(*b++);
            else {
                r.factors_.push_back({a->first, a->second + b->second});
                ++a, ++b;
            }
        }
        r.factors_.insert(r.factors_.end(), a, ae);
        r.factors_.insert(r.factors_.end(), b, be);
        return r;
    }

    friend bool operator==(const Monomial&, const Monomial&) = default;

    friend std::string to_string(const Monomial& m) {
        if (m.factors_.empty()) return "1";
        std::string s;
        for (const auto& [v, e] : m.factors_) {
            if (!s.empty()) s += "*";
            s += to_string(v);
            if (e > 1) s += "^" + std::to_string(e);
        }
        return s;
    }

   private:
    std::vector<std::pair<Var, int>> factors_;

    void normalize() {
        std::sort(factors_.begin(), factors_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<Var, int>> out;
        for (const auto& [v, e] : factors_) {
            if (e < 0) throw InvalidInput("negative exponent");
            if (e == 0) continue;
            if (!out.empty() && out.back().first == v)
                out.back().second += e;
            else
                out.push_back({v, e});
        }
        factors_ = std::move(out);
    }
};

/// Graded lexicographic order: compare total degree first, then the exponent
/// vectors lexicographically over variables in their natural order (x-block
/// before y-block before z).
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const int da = a.total_degree(), db = b.total_degree();
        if (da != db) return da < db;
        auto ai = a.factors().begin(), ae = a.factors().end();
        auto bi = b.factors().begin(), be = b.factors().end();
        while (ai != ae && bi != be) {
            if (ai->first != bi->first) return ai->first < bi->first;
            if (ai->second != bi->second) return ai->second > bi->second;
            ++ai, ++bi;
        }
        return false;  // equal
    }
};

/// Parses the format produced by to_string: "x1^2*y3", "z", "1".
inline Monomial parse_monomial(const std::string& s) {
    if (s == "1") return Monomial();
    std::vector<std::pair<Var, int>> factors;
    size_t pos = 0;
    while (pos < s.size()) {
        const size_t star = s.find('*', pos);
        const std::string tok = s.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
        pos = star == std::string::npos ? s.size() : star + 1;
        if (tok.empty()) throw InvalidInput("empty monomial factor in '" + s + "'");
        const size_t caret = tok.find('^');
        const std::string base = tok.substr(0, caret);
        int exp = 1;
        if (caret != std::string::npos) {
            try {
                exp = std::stoi(tok.substr(caret + 1));
            } catch (const std::exception&) {
                throw InvalidInput("bad exponent in '" + tok + "'");
            }
        }
        Var v{};
        if (base == "z") {
            v = {VarBlock::Z, 0};
        } else if (base.size() >= 2 && (base[0] == 'x' || base[0] == 'y')) {
            int idx;
            try {
                idx = std::stoi(base.substr(1));
            } catch (const std::exception&) {
                throw InvalidInput("bad variable '" + base + "'");
            }
            if (idx < 1) throw InvalidInput("variable index must be >= 1 in '" + base + "'");
            v = {base[0] == 'x' ? VarBlock::X : VarBlock::Y, idx - 1};
        } else {
            throw InvalidInput("bad variable '" + base + "'");
        }
        factors.push_back({v, exp});
    }
    return Monomial(std::move(factors));
}

}  // namespace bqsos
