#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bqsos/bases.hpp"
#include "bqsos/certificate.hpp"
#include "bqsos/forms.hpp"
#include "bqsos/rng.hpp"
#include "bqsos/tripartite.hpp"

namespace bqsos {

namespace detail {

inline SosCertificate<double> random_certificate(const std::vector<Monomial>& basis, int K, Rng& rng) {
    SosCertificate<double> cert;
    cert.basis = basis;
    for (int k = 0; k < K; ++k) {
        std::vector<double> row(basis.size());
        for (auto& v : row) v = rng.normal();
        cert.squares.push_back(std::move(row));
    }
    return cert;
}

}  // namespace detail

/// Random biquadratic sum of K squares of bilinear forms; returns the form
/// together with the certificate that planted it.
inline std::pair<BiquadraticForm<double>, SosCertificate<double>> random_sos_biquadratic(int m, int n,
                                                                                         int K,
                                                                                         uint64_t seed) {
    Rng rng(seed);
    SosCertificate<double> cert = detail::random_certificate(biquadratic_basis(m, n), K, rng);
    auto f = BiquadraticForm<double>::from_polynomial(m, n, cert.expand());
    return {std::move(f), std::move(cert)};
}

/// Random degenerated one-dimensional-y form as a sum of K squares over the
/// basis {x_i z, x_i y, yz}.
inline std::pair<M11Form<double>, SosCertificate<double>> random_sos_m11(int dim, int K, uint64_t seed) {
    Rng rng(seed);
    SosCertificate<double> cert = detail::random_certificate(m11_basis(dim), K, rng);
    Polynomial<double> p = cert.expand();
    p.prune();
    auto h = M11Form<double>::from_tripartite(extract_components(dim, 1, p));
    return {std::move(h), std::move(cert)};
}

inline std::pair<Form211<double>, SosCertificate<double>> random_sos_form211(int K, uint64_t seed) {
    auto [m11, cert] = random_sos_m11(2, K, seed);
    return {Form211<double>(std::move(m11)), std::move(cert)};
}

/// Psd biquadratic with a planted zero: every planted square is projected to
/// vanish at a random point on the product of unit spheres. Returns the form
/// and the zero (x0, y0).
struct PlantedZero {
    BiquadraticForm<double> form;
    std::vector<double> x0, y0;
};

inline PlantedZero random_psd_with_zero(int m, int n, int K, uint64_t seed) {
    Rng rng(seed);
    auto unit = [&](int d) {
        std::vector<double> v(d);
        double norm = 0;
        do {
            norm = 0;
            for (auto& t : v) {
                t = rng.normal();
                norm += t * t;
            }
        } while (norm < 1e-12);
        norm = std::sqrt(norm);
        for (auto& t : v) t /= norm;
        return v;
    };
    PlantedZero out;
    out.x0 = unit(m);
    out.y0 = unit(n);
    const auto basis = biquadratic_basis(m, n);
    std::vector<double> point(basis.size());  // basis evaluated at (x0, y0)
    double pnorm2 = 0;
    for (size_t b = 0; b < basis.size(); ++b) {
        double v = 1;
        for (const auto& [var, e] : basis[b].factors())
            for (int t = 0; t < e; ++t)
                v *= var.block == VarBlock::X ? out.x0[var.index] : out.y0[var.index];
        point[b] = v;
        pnorm2 += v * v;
    }
    SosCertificate<double> cert;
    cert.basis = basis;
    for (int k = 0; k < K; ++k) {
        std::vector<double> row(basis.size());
        for (auto& v : row) v = rng.normal();
        double dot = 0;
        for (size_t b = 0; b < basis.size(); ++b) dot += row[b] * point[b];
        for (size_t b = 0; b < basis.size(); ++b) row[b] -= dot / pnorm2 * point[b];
        cert.squares.push_back(std::move(row));
    }
    out.form = BiquadraticForm<double>::from_polynomial(m, n, cert.expand());
    return out;
}

/// Positive definite biquadratic: a random sum of squares plus
/// eps * (sum x_i^2)(sum y_k^2).
inline BiquadraticForm<double> random_pd_biquadratic(int m, int n, int K, double eps, uint64_t seed) {
    auto [f, cert] = random_sos_biquadratic(m, n, K, seed);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < n; ++k) f.add_coeff(i, i, k, k, eps);
    return f;
}

}  // namespace bqsos
