#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bqsos/certificate.hpp"
#include "bqsos/forms.hpp"
#include "bqsos/scalar.hpp"
#include "bqsos/tripartite.hpp"
#include "bqsos/version.hpp"

namespace bqsos {

/// Insertion-ordered JSON keeps emitted documents stable for digesting.
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scalars: doubles as numbers, rationals as "p/q" strings.
// ---------------------------------------------------------------------------

inline Json scalar_to_json(double v) { return v; }
inline Json scalar_to_json(const Rational& v) { return scalar_traits<Rational>::to_string(v); }

template <class T>
T scalar_from_json(const Json& j, const std::string& path) {
    if constexpr (scalar_traits<T>::is_exact) {
        if (j.is_number_integer()) return Rational(j.get<long long>());
        if (j.is_number()) {
            // Integral floats pass through exactly; anything else would
            // silently pick one of many representable rationals.
            const double d = j.get<double>();
            if (d == std::floor(d) && std::abs(d) < 9.0e15) return Rational((long long)d);
            throw InvalidInput(path + ": exact mode needs an integer or a \"p/q\" string");
        }
        if (j.is_string()) {
            try {
                return parse_rational(j.get<std::string>());
            } catch (const Error& e) {
                throw InvalidInput(path + ": " + e.what());
            }
        }
        throw InvalidInput(path + ": exact mode needs an integer or a \"p/q\" string");
    } else {
        if (j.is_number()) return j.get<double>();
        if (j.is_string()) {
            // Accept the rational wire format in float mode too.
            return scalar_traits<Rational>::to_double(parse_rational(j.get<std::string>()));
        }
        throw InvalidInput(path + ": expected a number");
    }
}

namespace detail {

inline const Json& member(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw InvalidInput(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(path + ": missing field '" + key + "'");
    return *it;
}

inline int int_member(const Json& j, const char* key, const std::string& path) {
    const Json& v = member(j, key, path);
    if (!v.is_number_integer()) throw InvalidInput(path + "." + key + ": expected an integer");
    return v.get<int>();
}

inline std::string kind_of(const Json& j, const std::string& path) {
    const Json& v = member(j, "kind", path);
    if (!v.is_string()) throw InvalidInput(path + ".kind: expected a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Polynomials as term lists: [{"mono": "x1^2*y1", "v": ...}, ...].
// ---------------------------------------------------------------------------

template <class T>
Json poly_to_json(const Polynomial<T>& p) {
    Json terms = Json::array();
    for (const auto& [mono, c] : p.terms())
        terms.push_back(Json{{"mono", to_string(mono)}, {"v", scalar_to_json(c)}});
    return terms;
}

template <class T>
Polynomial<T> poly_from_json(const Json& j, const std::string& path) {
    if (!j.is_array()) throw InvalidInput(path + ": expected an array of terms");
    Polynomial<T> p;
    for (size_t t = 0; t < j.size(); ++t) {
        const std::string tp = path + "[" + std::to_string(t) + "]";
        const Json& mono = detail::member(j[t], "mono", tp);
        if (!mono.is_string()) throw InvalidInput(tp + ".mono: expected a string");
        Monomial m;
        try {
            m = parse_monomial(mono.get<std::string>());
        } catch (const Error& e) {
            throw InvalidInput(tp + ".mono: " + e.what());
        }
        p.add_term(m, scalar_from_json<T>(detail::member(j[t], "v", tp), tp + ".v"));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Forms. All user-facing indices are 1-based.
// ---------------------------------------------------------------------------

template <class T>
Json to_json(const BiquadraticForm<T>& f) {
    Json coeffs = Json::array();
    for (const auto& [idx, v] : f.coeffs())
        coeffs.push_back(Json{{"i", idx.i + 1},
                              {"j", idx.j + 1},
                              {"k", idx.k + 1},
                              {"l", idx.l + 1},
                              {"v", scalar_to_json(v)}});
    return Json{{"kind", "biquadratic"}, {"m", f.m()}, {"n", f.n()}, {"coeffs", std::move(coeffs)}};
}

template <class T>
BiquadraticForm<T> biquadratic_from_json(const Json& j, const std::string& path = "$") {
    if (detail::kind_of(j, path) != "biquadratic")
        throw InvalidInput(path + ".kind: expected \"biquadratic\"");
    const int m = detail::int_member(j, "m", path), n = detail::int_member(j, "n", path);
    if (m < 1 || n < 1) throw InvalidInput(path + ": m and n must be >= 1");
    BiquadraticForm<T> f(m, n);
    const Json& coeffs = detail::member(j, "coeffs", path);
    if (!coeffs.is_array()) throw InvalidInput(path + ".coeffs: expected an array");
    for (size_t t = 0; t < coeffs.size(); ++t) {
        const std::string tp = path + ".coeffs[" + std::to_string(t) + "]";
        const int i = detail::int_member(coeffs[t], "i", tp), jj = detail::int_member(coeffs[t], "j", tp);
        const int k = detail::int_member(coeffs[t], "k", tp), l = detail::int_member(coeffs[t], "l", tp);
        try {
            f.add_coeff(i - 1, jj - 1, k - 1, l - 1,
                        scalar_from_json<T>(detail::member(coeffs[t], "v", tp), tp + ".v"));
        } catch (const InvalidIndex& e) {
            throw InvalidInput(tp + ": " + e.what());
        }
    }
    return f;
}

template <class T>
Json to_json(const TripartiteForm<T>& h) {
    return Json{{"kind", "tripartite"}, {"mx", h.mx},           {"ny", h.ny},
                {"h0", scalar_to_json(h.h0)}, {"h1", poly_to_json(h.h1)}, {"h2", poly_to_json(h.h2)},
                {"h3", poly_to_json(h.h3)},   {"h4", to_json(h.h4)}};
}

template <class T>
TripartiteForm<T> tripartite_from_json(const Json& j, const std::string& path = "$") {
    if (detail::kind_of(j, path) != "tripartite")
        throw InvalidInput(path + ".kind: expected \"tripartite\"");
    TripartiteForm<T> h;
    h.mx = detail::int_member(j, "mx", path);
    h.ny = detail::int_member(j, "ny", path);
    h.h0 = scalar_from_json<T>(detail::member(j, "h0", path), path + ".h0");
    h.h1 = poly_from_json<T>(detail::member(j, "h1", path), path + ".h1");
    h.h2 = poly_from_json<T>(detail::member(j, "h2", path), path + ".h2");
    h.h3 = poly_from_json<T>(detail::member(j, "h3", path), path + ".h3");
    h.h4 = biquadratic_from_json<T>(detail::member(j, "h4", path), path + ".h4");
    if (h.h4.m() != h.mx || h.h4.n() != h.ny)
        throw InvalidInput(path + ".h4: shape differs from (mx, ny)");
    return h;
}

namespace detail {

template <class T>
Json sym_to_json(const SymMatrix<T>& a) {
    Json rows = Json::array();
    for (size_t i = 0; i < a.size(); ++i) {
        Json row = Json::array();
        for (size_t j = 0; j < a.size(); ++j) row.push_back(scalar_to_json(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
SymMatrix<T> sym_from_json(const Json& j, int dim, const std::string& path) {
    if (!j.is_array() || (int)j.size() != dim)
        throw InvalidInput(path + ": expected " + std::to_string(dim) + " rows");
    SymMatrix<T> a((size_t)dim);
    for (int r = 0; r < dim; ++r) {
        if (!j[(size_t)r].is_array() || (int)j[(size_t)r].size() != dim)
            throw InvalidInput(path + "[" + std::to_string(r) + "]: expected " + std::to_string(dim) +
                               " entries");
        for (int c = 0; c < dim; ++c) {
            const T v = scalar_from_json<T>(j[(size_t)r][(size_t)c], path + "[" + std::to_string(r) +
                                                                         "][" + std::to_string(c) + "]");
            if (c < r) {
                if (!(v == a((size_t)r, (size_t)c)))
                    throw InvalidInput(path + ": matrix is not symmetric at (" + std::to_string(r + 1) +
                                       "," + std::to_string(c + 1) + ")");
            } else {
                a.set((size_t)r, (size_t)c, v);
            }
        }
    }
    return a;
}

template <class T>
std::vector<T> vec_from_json(const Json& j, int dim, const std::string& path) {
    if (!j.is_array() || (int)j.size() != dim)
        throw InvalidInput(path + ": expected " + std::to_string(dim) + " entries");
    std::vector<T> v((size_t)dim);
    for (int i = 0; i < dim; ++i)
        v[(size_t)i] = scalar_from_json<T>(j[(size_t)i], path + "[" + std::to_string(i) + "]");
    return v;
}

}  // namespace detail

template <class T>
Json to_json(const M11Form<T>& h) {
    Json j5 = Json::array(), j6 = Json::array();
    for (const T& v : h.h5) j5.push_back(scalar_to_json(v));
    for (const T& v : h.h6) j6.push_back(scalar_to_json(v));
    return Json{{"kind", "m11"},
                {"dim", h.dim},
                {"H2", detail::sym_to_json(h.H2)},
                {"H3", detail::sym_to_json(h.H3)},
                {"H4", detail::sym_to_json(h.H4)},
                {"h5", std::move(j5)},
                {"h6", std::move(j6)},
                {"h7", scalar_to_json(h.h7)}};
}

template <class T>
M11Form<T> m11_from_json(const Json& j, const std::string& path = "$") {
    if (detail::kind_of(j, path) != "m11") throw InvalidInput(path + ".kind: expected \"m11\"");
    const int dim = detail::int_member(j, "dim", path);
    if (dim < 1) throw InvalidInput(path + ".dim: must be >= 1");
    M11Form<T> h = M11Form<T>::zero(dim);
    h.H2 = detail::sym_from_json<T>(detail::member(j, "H2", path), dim, path + ".H2");
    h.H3 = detail::sym_from_json<T>(detail::member(j, "H3", path), dim, path + ".H3");
    h.H4 = detail::sym_from_json<T>(detail::member(j, "H4", path), dim, path + ".H4");
    h.h5 = detail::vec_from_json<T>(detail::member(j, "h5", path), dim, path + ".h5");
    h.h6 = detail::vec_from_json<T>(detail::member(j, "h6", path), dim, path + ".h6");
    h.h7 = scalar_from_json<T>(detail::member(j, "h7", path), path + ".h7");
    return h;
}

/// Named-scalar layout for the two-dimensional form, accepted wherever an
/// m11 of dim 2 is.
template <class T>
Form211<T> form211_from_json(const Json& j, const std::string& path = "$") {
    const std::string kind = detail::kind_of(j, path);
    if (kind == "m11") {
        M11Form<T> m = m11_from_json<T>(j, path);
        if (m.dim != 2) throw InvalidInput(path + ".dim: classify needs dim 2");
        return Form211<T>(std::move(m));
    }
    if (kind != "form211") throw InvalidInput(path + ".kind: expected \"form211\" or \"m11\"");
    auto s = [&](const char* key) {
        return scalar_from_json<T>(detail::member(j, key, path), path + "." + key);
    };
    return Form211<T>(s("b11"), s("b12"), s("b22"), s("c11"), s("c12"), s("c22"), s("c1y"), s("c2y"),
                      s("c1z"), s("c2z"), s("d11"), s("d12"), s("d22"), s("h7"));
}

using FormVariant =
    std::variant<BiquadraticForm<double>, TripartiteForm<double>, M11Form<double>>;

/// Kind-dispatched parse for subcommands that accept any form shape.
inline FormVariant form_from_json(const Json& j, const std::string& path = "$") {
    const std::string kind = detail::kind_of(j, path);
    if (kind == "biquadratic") return biquadratic_from_json<double>(j, path);
    if (kind == "tripartite") return tripartite_from_json<double>(j, path);
    if (kind == "m11") return m11_from_json<double>(j, path);
    if (kind == "form211") return form211_from_json<double>(j, path).m11();
    throw InvalidInput(path + ".kind: unknown form kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Certificates.
// ---------------------------------------------------------------------------

template <class T>
Json to_json(const SosCertificate<T>& c) {
    Json basis = Json::array(), squares = Json::array();
    for (const auto& m : c.basis) basis.push_back(to_string(m));
    for (const auto& row : c.squares) {
        Json r = Json::array();
        for (const T& v : row) r.push_back(scalar_to_json(v));
        squares.push_back(std::move(r));
    }
    Json j{{"kind", "certificate"}, {"basis", std::move(basis)}, {"squares", std::move(squares)}};
    if (!c.weights.empty()) {
        Json w = Json::array();
        for (const T& v : c.weights) w.push_back(scalar_to_json(v));
        j["weights"] = std::move(w);
    }
    return j;
}

template <class T>
SosCertificate<T> certificate_from_json(const Json& j, const std::string& path = "$") {
    if (detail::kind_of(j, path) != "certificate")
        throw InvalidInput(path + ".kind: expected \"certificate\"");
    SosCertificate<T> c;
    const Json& basis = detail::member(j, "basis", path);
    if (!basis.is_array()) throw InvalidInput(path + ".basis: expected an array");
    for (size_t i = 0; i < basis.size(); ++i) {
        if (!basis[i].is_string())
            throw InvalidInput(path + ".basis[" + std::to_string(i) + "]: expected a string");
        try {
            c.basis.push_back(parse_monomial(basis[i].get<std::string>()));
        } catch (const Error& e) {
            throw InvalidInput(path + ".basis[" + std::to_string(i) + "]: " + e.what());
        }
    }
    const Json& squares = detail::member(j, "squares", path);
    if (!squares.is_array()) throw InvalidInput(path + ".squares: expected an array");
    for (size_t r = 0; r < squares.size(); ++r)
        c.squares.push_back(detail::vec_from_json<T>(squares[r], (int)c.basis.size(),
                                                     path + ".squares[" + std::to_string(r) + "]"));
    if (j.contains("weights"))
        c.weights = detail::vec_from_json<T>(j["weights"], (int)c.squares.size(), path + ".weights");
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Digests and manifests.
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out.write(bytes.data(), (std::streamsize)bytes.size());
}

/// Record of one CLI run: enough to re-execute it and compare outputs
/// byte-for-byte. Deliberately carries no timestamps -- identical runs must
/// produce identical manifests.
struct RunManifest {
    std::string subcommand;
    std::string version = kVersion;
    Json parameters = Json::object();                       // effective flag values
    std::map<std::string, std::string> input_digests;       // label -> sha256
    std::map<std::string, std::string> output_digests;

    Json to_json() const {
        Json in = Json::object(), out = Json::object();
        for (const auto& [k, v] : input_digests) in[k] = v;
        for (const auto& [k, v] : output_digests) out[k] = v;
        return Json{{"kind", "manifest"},     {"subcommand", subcommand},
                    {"version", version},     {"parameters", parameters},
                    {"input_digests", in},    {"output_digests", out}};
    }

    static RunManifest from_json(const Json& j, const std::string& path = "$") {
        if (detail::kind_of(j, path) != "manifest")
            throw InvalidInput(path + ".kind: expected \"manifest\"");
        RunManifest m;
        m.subcommand = detail::member(j, "subcommand", path).get<std::string>();
        m.version = detail::member(j, "version", path).get<std::string>();
        m.parameters = detail::member(j, "parameters", path);
        for (const auto& [k, v] : detail::member(j, "input_digests", path).items())
            m.input_digests[k] = v.get<std::string>();
        for (const auto& [k, v] : detail::member(j, "output_digests", path).items())
            m.output_digests[k] = v.get<std::string>();
        return m;
    }
};

/// Canonical serialization used for files and digests.
inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bqsos
