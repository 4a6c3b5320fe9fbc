#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bqsos/dual_witness.hpp"
#include "bqsos/generators.hpp"
#include "bqsos/gram.hpp"
#include "bqsos/psd_oracle.hpp"
#include "bqsos/rank_search.hpp"
#include "bqsos/tripartite.hpp"

namespace bqsos {

// ---------------------------------------------------------------------------
// Property suite for degenerated one-dimensional-y psd forms.
// ---------------------------------------------------------------------------

struct PropertyStatus {
    bool pass = false;
    std::string evidence;
};

struct PropertyReport {
    PropertyStatus psd_precondition;  // oracle check of the suite's hypothesis
    PropertyStatus i, ii, iii, iv, v, vi;
    bool all_pass() const {
        return psd_precondition.pass && i.pass && ii.pass && iii.pass && iv.pass && v.pass && vi.pass;
    }
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline Eigen::MatrixXd sym_to_eigen(const SymMatrix<double>& a) { return to_eigen(a); }

/// Quadratic in (x, y) multiplying z^2: [[H2, h5/2], [h5^T/2, h7]].
inline Eigen::MatrixXd bordered_z2(const M11Form<double>& h) {
    const int d = h.dim;
    Eigen::MatrixXd Q(d + 1, d + 1);
    Q.topLeftCorner(d, d) = to_eigen(h.H2);
    for (int i = 0; i < d; ++i) Q(i, d) = Q(d, i) = 0.5 * h.h5[(size_t)i];
    Q(d, d) = h.h7;
    return Q;
}

/// Quadratic in (x, z) multiplying y^2: [[H4, h6/2], [h6^T/2, h7]].
inline Eigen::MatrixXd bordered_y2(const M11Form<double>& h) {
    const int d = h.dim;
    Eigen::MatrixXd Q(d + 1, d + 1);
    Q.topLeftCorner(d, d) = to_eigen(h.H4);
    for (int i = 0; i < d; ++i) Q(i, d) = Q(d, i) = 0.5 * h.h6[(size_t)i];
    Q(d, d) = h.h7;
    return Q;
}

inline double max_abs(const std::vector<double>& v) {
    double r = 0;
    for (double t : v) r = std::max(r, std::abs(t));
    return r;
}

inline double mat_max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace detail

/// Checks the six structural properties every degenerated psd form with a
/// one-dimensional y block satisfies. Each status carries numeric evidence;
/// a failed psd precondition is reported, not thrown.
inline PropertyReport m11_property_suite(const M11Form<double>& h, double tol = 1e-8,
                                         const OracleOptions& opts = {},
                                         const RankSearchOptions& ropts = {}) {
    PropertyReport rep;
    const int d = h.dim;
    const double scale = 1.0 + h.norm_inf();
    const double eps = tol * scale;

    {
        auto [ok, v] = is_psd(h, opts);
        rep.psd_precondition.pass = ok;
        rep.psd_precondition.evidence = "sphere min " + detail::fmt(v.min_value);
    }

    // (i) h7 >= 0; h7 = 0 forces the linear parts h5, h6 to vanish.
    {
        const double n5 = detail::max_abs(h.h5), n6 = detail::max_abs(h.h6);
        bool ok = h.h7 >= -eps;
        if (std::abs(h.h7) <= eps) ok = ok && n5 <= eps && n6 <= eps;
        rep.i.pass = ok;
        rep.i.evidence =
            "h7 " + detail::fmt(h.h7) + ", |h5| " + detail::fmt(n5) + ", |h6| " + detail::fmt(n6);
    }

    // (ii) H2 psd, a sum of at most dim squares; H2 = 0 forces H3 and h5 to 0.
    // (iii) the same for H4 with h6.
    auto quad_check = [&](const Eigen::MatrixXd& Q, const Eigen::MatrixXd& companion,
                          const std::vector<double>& lin, PropertyStatus& st) {
        const double lmin = least_eigenvalue(Q);
        bool ok = lmin >= -eps;
        std::string ev = "lmin " + detail::fmt(lmin);
        if (ok) {
            try {
                const auto rows = spectral_factor_psd(Q, 1e-12);
                Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(Q.rows(), Q.cols());
                for (const auto& r : rows) rec += r * r.transpose();
                const double res = detail::mat_max_abs(rec - Q);
                ok = ok && (int)rows.size() <= d && res <= eps;
                ev += ", " + std::to_string(rows.size()) + " forms, factor residual " + detail::fmt(res);
            } catch (const NotPsd&) {
                ok = false;
                ev += ", factorization rejected";
            }
        }
        if (detail::mat_max_abs(Q) <= eps) {
            const double nc = detail::mat_max_abs(companion), nl = detail::max_abs(lin);
            ok = ok && nc <= eps && nl <= eps;
            ev += ", zero block: |H3| " + detail::fmt(nc) + ", |lin| " + detail::fmt(nl);
        }
        st.pass = ok;
        st.evidence = ev;
    };
    quad_check(to_eigen(h.H2), to_eigen(h.H3), h.h5, rep.ii);
    quad_check(to_eigen(h.H4), to_eigen(h.H3), h.h6, rep.iii);

    // (iv) the bordered quadratics in (x, y) and (x, z) are psd, each a sum
    // of at most dim + 1 squares.
    {
        const Eigen::MatrixXd Qz = detail::bordered_z2(h), Qy = detail::bordered_y2(h);
        const double l1 = least_eigenvalue(Qz), l2 = least_eigenvalue(Qy);
        bool ok = l1 >= -eps && l2 >= -eps;
        size_t n1 = 0, n2 = 0;
        if (ok) {
            try {
                n1 = spectral_factor_psd(Qz, 1e-12).size();
                n2 = spectral_factor_psd(Qy, 1e-12).size();
                ok = n1 <= (size_t)d + 1 && n2 <= (size_t)d + 1;
            } catch (const NotPsd&) {
                ok = false;
            }
        }
        rep.iv.pass = ok;
        rep.iv.evidence = "lmin " + detail::fmt(l1) + " / " + detail::fmt(l2) + ", squares " +
                          std::to_string(n1) + " / " + std::to_string(n2);
    }

    // (v) the x-quadratic slice, read as a dim x 2 biquadratic in (x, (y, z)),
    // is psd with sos rank at most 2*dim.
    {
        const BiquadraticForm<double> slice = h.pure_slice();
        auto [ok_psd, v] = is_psd(slice, opts);
        auto cert = rank_k_search(slice, 2 * d, opts.seed, ropts);
        if (!cert) {
            RankSearchOptions more = ropts;
            more.restarts *= 10;
            cert = rank_k_search(slice, 2 * d, mix_seed(opts.seed, 97), more);
        }
        rep.v.pass = ok_psd && cert.has_value();
        rep.v.evidence = "slice min " + detail::fmt(v.min_value) + ", rank-" + std::to_string(2 * d) +
                         " search " + (cert ? "succeeded" : "failed");
    }

    // (vi) exact zeros at (x, y, z) = (0, 1, 0) and (0, 0, 1): no pure y^4 or
    // z^4 monomial exists in this layout, so both values are exactly zero.
    {
        const std::vector<double> x0((size_t)d, 0.0);
        const double vy = h.evaluate(x0, 1.0, 0.0), vz = h.evaluate(x0, 0.0, 1.0);
        rep.vi.pass = vy == 0.0 && vz == 0.0;
        rep.vi.evidence = "h(0,1,0) = " + detail::fmt(vy) + ", h(0,0,1) = " + detail::fmt(vz);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Discriminant-style quartic attached to a two-dimensional form.
// ---------------------------------------------------------------------------

/// Delta = 4 * h2 * hbar4 - hbar3^2, a quartic in (x1, x2, y) with y-degree
/// at most 2, split as Delta0 y^2 + Delta1 y + Delta2 (binary quadratic /
/// cubic / quartic).
template <class T>
struct DeltaForm {
    Polynomial<T> delta;
    Polynomial<T> delta0, delta1, delta2;  // coefficients of y^2, y, 1
};

template <class T>
DeltaForm<T> delta_211(const Form211<T>& h) {
    DeltaForm<T> d;
    const Polynomial<T> h2 = h.h2_full_poly();
    const Polynomial<T> h4 = h.hbar4_poly();
    const Polynomial<T> h3 = h.hbar3_poly();
    d.delta = T(4) * h2 * h4 - h3 * h3;
    const Var y{VarBlock::Y, 0};
    auto parts = d.delta.coefficients_in(y);
    parts.resize(3);
    d.delta2 = parts[0];
    d.delta1 = parts[1];
    d.delta0 = parts[2];
    return d;
}

// ---------------------------------------------------------------------------
// Three-square decomposition of a psd Delta.
// ---------------------------------------------------------------------------

struct DeltaDecomposition {
    bool structured = false;          // xi^2 + (s1 + l1 y)^2 + (s2 + l2 y)^2 shape
    SosCertificate<double> cert;      // over the quadratic monomials in (x1, x2, y)
    double residual = 0.0;            // max-abs coefficient residual
};

namespace detail {

/// Basis for the structured ansatz: quadratics without y^2.
inline std::vector<Monomial> delta_ansatz_basis() {
    auto b = ternary_quadratic_basis();
    b.pop_back();  // drop y^2
    return b;
}

/// LM fit of the 13-parameter structured shape. Column 0 of the 5 x 3 factor
/// is constrained to the pure-x quadratic slots.
inline std::optional<std::pair<Eigen::MatrixXd, double>> fit_structured_delta(
    const GramProblem& gp, uint64_t seed, const Eigen::MatrixXd* init, int restarts, int max_iters) {
    const int B = 5, K = 3;
    // Free parameters: all entries except rows 3..4 of column 0.
    std::vector<std::pair<int, int>> free_slots;
    for (int i = 0; i < B; ++i)
        for (int c = 0; c < K; ++c)
            if (!(c == 0 && i >= 3)) free_slots.push_back({i, c});
    const int P = (int)free_slots.size();  // 13
    const int M = (int)gp.classes().size();
    const double tol_res = 1e-8 * gp.scale();

    double best_res = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_R;
    for (int start = 0; start < restarts; ++start) {
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(B, K);
        if (start == 0 && init) {
            R = *init;
            for (int i = 3; i < B; ++i) R(i, 0) = 0.0;
        } else {
            Rng rng = Rng::derived(seed, (uint64_t)start);
            const double amp = std::pow(gp.scale(), 0.25);
            for (const auto& [i, c] : free_slots) R(i, c) = amp * rng.normal();
        }
        Eigen::VectorXd r = rank_residual(gp, R);
        double f = 0.5 * r.squaredNorm();
        double lam = 1e-3;
        for (int it = 0; it < max_iters; ++it) {
            Eigen::MatrixXd Jfull = Eigen::MatrixXd::Zero(M, B * K);
            for (int m = 0; m < M; ++m)
                for (const auto& [p, q] : gp.classes()[(size_t)m].pairs) {
                    if (p == q) {
                        Jfull.block(m, p * K, 1, K) += 2.0 * R.row(p);
                    } else {
                        Jfull.block(m, p * K, 1, K) += 2.0 * R.row(q);
                        Jfull.block(m, q * K, 1, K) += 2.0 * R.row(p);
                    }
                }
            Eigen::MatrixXd J(M, P);
            for (int j = 0; j < P; ++j)
                J.col(j) = Jfull.col(free_slots[(size_t)j].first * K + free_slots[(size_t)j].second);
            const Eigen::VectorXd g = J.transpose() * r;
            const Eigen::MatrixXd A = J.transpose() * J;
            bool moved = false;
            for (int tries = 0; tries < 20; ++tries) {
                Eigen::MatrixXd Areg = A;
                Areg.diagonal().array() += lam;
                const Eigen::VectorXd dx = Areg.ldlt().solve(-g);
                Eigen::MatrixXd Rn = R;
                for (int j = 0; j < P; ++j) Rn(free_slots[(size_t)j].first, free_slots[(size_t)j].second) += dx[j];
                const Eigen::VectorXd rn = rank_residual(gp, Rn);
                const double fn = 0.5 * rn.squaredNorm();
                if (fn < f) {
                    R = std::move(Rn);
                    r = rn;
                    f = fn;
                    lam = std::max(lam * 0.3, 1e-12);
                    moved = true;
                    break;
                }
                lam *= 10.0;
            }
            if (!moved) break;
            if (r.lpNorm<Eigen::Infinity>() <= tol_res) break;
        }
        const double mres = r.lpNorm<Eigen::Infinity>();
        if (mres < best_res) {
            best_res = mres;
            best_R = R;
        }
        if (best_res <= tol_res) break;
    }
    if (best_res > tol_res) return std::nullopt;
    return std::make_pair(best_R, best_res);
}

}  // namespace detail

/// Fits Delta = xi(x)^2 + (s1(x) + l1(x) y)^2 + (s2(x) + l2(x) y)^2 (13 free
/// coefficients), seeded first from the column-rotated unstructured rank-3
/// factor, then random restarts. Falls back to an unstructured rank-3 search
/// over all six quadratic monomials. Inputs with y-degree above 2 cannot come
/// from a two-dimensional form and are rejected; failure of both searches is
/// Indeterminate (nullopt), not a disproof.
inline std::optional<DeltaDecomposition> decompose_delta(const DeltaForm<double>& d, uint64_t seed,
                                                         int restarts = 30, int max_iters = 500) {
    if (d.delta.degree_in(VarBlock::Y) > 2)
        throw NotFromForm211("decompose_delta: y-degree exceeds 2");
    const auto basis5 = detail::delta_ansatz_basis();
    const GramProblem gp5 = GramProblem::from(d.delta, basis5);

    // Unstructured solution, used both as the structured initializer and as
    // the fallback result.
    const auto basis6 = ternary_quadratic_basis();
    RankSearchOptions uopts;
    uopts.restarts = restarts;
    uopts.max_iters = max_iters;
    uopts.tol = 1e-8;
    auto unstructured = rank_k_search(d.delta, basis6, 3, mix_seed(seed, 1), uopts);

    std::optional<Eigen::MatrixXd> init;
    if (unstructured) {
        // Rotate columns so one column is (nearly) free of y-monomial mass,
        // then drop the y^2 row.
        Eigen::MatrixXd R6(6, 3);
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 6; ++i)
                R6(i, c) = c < (int)unstructured->squares.size() ? unstructured->squares[(size_t)c][(size_t)i] : 0.0;
        const Eigen::MatrixXd Y3 = R6.bottomRows(3);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y3, Eigen::ComputeFullV);
        Eigen::MatrixXd V = svd.matrixV();  // singular values descending
        Eigen::MatrixXd rotated = R6 * V;
        Eigen::MatrixXd R5(5, 3);
        R5.col(0) = rotated.col(2).topRows(5);  // least y-mass first
        R5.col(1) = rotated.col(0).topRows(5);
        R5.col(2) = rotated.col(1).topRows(5);
        init = R5;
    }

    if (auto fit = detail::fit_structured_delta(gp5, mix_seed(seed, 2), init ? &*init : nullptr,
                                                restarts, max_iters)) {
        DeltaDecomposition out;
        out.structured = true;
        out.residual = fit->second;
        out.cert.basis = basis6;
        for (int c = 0; c < 3; ++c) {
            std::vector<double> row(6, 0.0);
            for (int i = 0; i < 5; ++i) row[(size_t)i] = fit->first(i, c);
            out.cert.squares.push_back(std::move(row));
        }
        return out;
    }
    if (unstructured) {
        DeltaDecomposition out;
        out.structured = false;
        out.cert = std::move(*unstructured);
        out.residual = out.cert.verify(d.delta, 1e-8).max_abs;
        return out;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Constructive four-square decomposition when hbar4 is a perfect square.
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<double> scalar_sqrt(double v) {
    if (v < 0) return std::nullopt;
    return std::sqrt(v);
}
inline std::optional<Rational> scalar_sqrt(const Rational& v) { return rational_sqrt(v); }

}  // namespace detail

/// Result of the perfect-square-side construction h = (g1 y + g2 z)^2 +
/// (h2 - g2^2) z^2 with the residual quadratic factored further.
template <class T>
struct CaseII {
    std::array<T, 2> g1;       // g1 = g1[0] x1 + g1[1] x2 (hbar4 = g1^2)
    std::array<T, 3> g2;       // g2 = g2[0] x1 + g2[1] x2 + g2[2] y
    std::array<T, 2> remainder;  // leftover of hbar3 - 2 g1 g2 (non-pivot slots)
    SymMatrix<T> residual_quadratic;  // h2 - g2^2 over (x1, x2, y)
    SosCertificate<T> cert;           // over {x1 z, x2 z, x1 y, x2 y, yz}
};

/// Decomposes a form whose hbar4 is a perfect square: pivot on the larger of
/// d11/d22, derive g1 from the square root, solve 2 g1 g2 = hbar3 by matching
/// the pivot-variable coefficients, and spectrally factor the residual
/// quadratic (exact LDL^T with positive weights in rational mode). The
/// certificate has at most four squares. Rational inputs must have a rational
/// square root at the pivot; a nonzero remainder or a non-psd residual means
/// the input violates the case hypotheses and raises NotPsd/InvalidInput.
template <class T>
CaseII<T> case_ii_decompose(const Form211<T>& h) {
    const T zero = scalar_traits<T>::zero();
    const T d11 = h.d11(), d12 = h.d12(), d22 = h.d22();
    CaseII<T> out;
    const bool pivot1 = !(d11 < d22);
    const T piv = pivot1 ? d11 : d22;
    if (piv == zero) throw InvalidInput("case_ii_decompose: hbar4 vanishes (not this case)");
    auto root = detail::scalar_sqrt(piv);
    if (!root) throw InvalidInput("case_ii_decompose: pivot is not a representable square");
    // With zero discriminant the other coefficient is d12^2 / (4 piv).
    if (pivot1) {
        out.g1 = {*root, d12 / (T(2) * *root)};
    } else {
        out.g1 = {d12 / (T(2) * *root), *root};
    }

    const T c11 = h.c11(), c12 = h.c12(), c22 = h.c22(), c1y = h.c1y(), c2y = h.c2y();
    if (pivot1) {
        // Match x1^2, x1 x2, x1 y; the rest is the remainder.
        out.g2[0] = c11 / (T(2) * out.g1[0]);
        out.g2[1] = (c12 - T(2) * out.g1[1] * out.g2[0]) / (T(2) * out.g1[0]);
        out.g2[2] = c1y / (T(2) * out.g1[0]);
        out.remainder = {c22 - T(2) * out.g1[1] * out.g2[1], c2y - T(2) * out.g1[1] * out.g2[2]};
    } else {
        out.g2[1] = c22 / (T(2) * out.g1[1]);
        out.g2[0] = (c12 - T(2) * out.g1[0] * out.g2[1]) / (T(2) * out.g1[1]);
        out.g2[2] = c2y / (T(2) * out.g1[1]);
        out.remainder = {c11 - T(2) * out.g1[0] * out.g2[0], c1y - T(2) * out.g1[0] * out.g2[2]};
    }

    // Residual quadratic h2 - g2^2 over (x1, x2, y).
    SymMatrix<T> Q(3);
    const T half = scalar_traits<T>::one() / T(2);
    Q.set(0, 0, h.b11());
    Q.set(0, 1, h.b12() * half);
    Q.set(1, 1, h.b22());
    Q.set(0, 2, h.c1z() * half);
    Q.set(1, 2, h.c2z() * half);
    Q.set(2, 2, h.h7());
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) Q.add(i, j, -(out.g2[(size_t)i] * out.g2[(size_t)j]));
    out.residual_quadratic = Q;

    out.cert.basis = m11_basis(2);
    // (g1 y + g2 z) over {x1z, x2z, x1y, x2y, yz}.
    out.cert.squares.push_back({out.g2[0], out.g2[1], out.g1[0], out.g1[1], out.g2[2]});
    if constexpr (scalar_traits<T>::is_exact) {
        out.cert.weights.push_back(scalar_traits<T>::one());
        for (const auto& sq : ldlt_psd(Q)) {  // throws NotPsd when Q is not psd
            out.cert.weights.push_back(sq.weight);
            out.cert.squares.push_back({sq.coeffs[0], sq.coeffs[1], zero, zero, sq.coeffs[2]});
        }
    } else {
        Eigen::MatrixXd Qe(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) Qe(i, j) = scalar_traits<T>::to_double(Q(i, j));
        // The residual can cancel to dust, so the psd threshold must come from
        // the parent form's scale, not from Q itself.
        const double pscale = 1.0 + scalar_traits<T>::to_double(h.m11().norm_inf());
        for (const auto& r : spectral_factor_psd_abs(Qe, 1e-10 * pscale))
            out.cert.squares.push_back({T(r[0]), T(r[1]), zero, zero, T(r[2])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Four-way classifier.
// ---------------------------------------------------------------------------

enum class CaseTag { I, II, III, IV };

inline const char* to_string(CaseTag t) {
    switch (t) {
        case CaseTag::I: return "I";
        case CaseTag::II: return "II";
        case CaseTag::III: return "III";
        case CaseTag::IV: return "IV";
    }
    return "?";
}

struct CaseIVPayload {
    double h7_scale = 1.0;                  // the original form equals h7_scale * normalized ∘ change
    std::vector<std::vector<double>> P;     // x-change: original x = P x'
    Form211<double> normalized;             // hbar4 = x1^2 + x2^2, h7 = 1
    double alpha = 0.0, beta1 = 0.0, beta2 = 0.0;  // hbar2 = alpha^2 x1^2 + (beta1 x1 + beta2 x2)^2
    double normalization_residual = 0.0;    // |hbar4' - identity|_max
};

struct Classification {
    CaseTag tag = CaseTag::IV;
    int claimed_bound = 0;                    // the claimed sos-length bound for the case
    std::optional<int> achieved;            // certificate length actually produced
    std::optional<SosCertificate<double>> certificate;  // verifies against the input form
    double certificate_residual = 0.0;
    std::vector<std::string> flags;
    bool swapped_yz = false;                // entered case II through hbar2
    std::optional<CaseII<double>> case_ii;
    std::optional<CaseIVPayload> case_iv;
};

/// Assigns exactly one of the four structural cases (priority I > II > III >
/// IV when boundaries overlap; the overlaps are flagged) and produces the
/// constructive decomposition for the case. The claimed bound is recorded
/// alongside the achieved length; a longer-than-claimed certificate is
/// flagged, never asserted away.
inline Classification classify_211(const Form211<double>& h, double tol = 1e-8, uint64_t seed = 0,
                                   const OracleOptions& opts = {}, const RankSearchOptions& ropts = {}) {
    Classification out;
    const double scale = 1.0 + h.m11().norm_inf();
    const double eps = tol * scale;
    const double sq_eps = 1e-10 * scale * scale;  // perfect-square discriminant threshold

    const double n4 = std::max({std::abs(h.d11()), std::abs(h.d12()), std::abs(h.d22())});
    const double n2 = std::max({std::abs(h.b11()), std::abs(h.b12()), std::abs(h.b22())});
    const double disc4 = std::abs(h.d12() * h.d12() - 4 * h.d11() * h.d22());
    const double disc2 = std::abs(h.b12() * h.b12() - 4 * h.b11() * h.b22());
    const bool case_i = n4 <= eps || n2 <= eps;
    const bool case_ii_4 = !case_i && disc4 <= sq_eps;
    const bool case_ii_2 = !case_i && disc2 <= sq_eps;
    const bool case_iii = std::abs(h.h7()) <= eps;

    auto note_boundary = [&](CaseTag chosen) {
        if (case_i && chosen != CaseTag::I) out.flags.push_back("near case I boundary");
        if ((case_ii_4 || case_ii_2) && chosen != CaseTag::II)
            out.flags.push_back("near case II boundary (discriminant " +
                                detail::fmt(std::min(disc4, disc2)) + ")");
        if (case_iii && chosen != CaseTag::III) out.flags.push_back("near case III boundary");
    };

    const Polynomial<double> target = h.to_polynomial();
    auto attach_certificate = [&](SosCertificate<double> cert) {
        const auto rep = cert.verify(target, std::max(tol, 1e-8));
        out.certificate_residual = rep.max_abs;
        if (!rep.pass)
            out.flags.push_back("certificate residual " + detail::fmt(rep.max_abs) +
                                " above tolerance");
        out.achieved = (int)cert.length();
        out.certificate = std::move(cert);
    };

    if (case_i) {
        out.tag = CaseTag::I;
        out.claimed_bound = 2;
        note_boundary(CaseTag::I);
        const bool side4 = n4 <= eps;  // hbar4 vanishes: survivor is the z^2 block
        // The psd hypothesis forces the yz coefficients to vanish with the block.
        const double nc = std::max({std::abs(h.c11()), std::abs(h.c12()), std::abs(h.c22())});
        const double nmixed = side4 ? std::max(std::abs(h.c1y()), std::abs(h.c2y()))
                                    : std::max(std::abs(h.c1z()), std::abs(h.c2z()));
        if (nc > eps || nmixed > eps)
            out.flags.push_back("case I: cross terms did not vanish (|hbar3| " + detail::fmt(nc) +
                                ", |mixed| " + detail::fmt(nmixed) + ")");
        const Eigen::MatrixXd Q = side4 ? detail::bordered_z2(h.m11()) : detail::bordered_y2(h.m11());
        SosCertificate<double> cert;
        cert.basis = m11_basis(2);
        try {
            for (const auto& r : spectral_factor_psd(Q, 1e-12)) {
                // Rows over (x1, x2, w): w = y for the z^2 block, z for the y^2 block.
                if (side4)
                    cert.squares.push_back({r[0], r[1], 0.0, 0.0, r[2]});
                else
                    cert.squares.push_back({0.0, 0.0, r[0], r[1], r[2]});
            }
        } catch (const NotPsd&) {
            out.flags.push_back("case I: surviving block is not psd (precondition violated)");
            return out;
        }
        if ((int)cert.length() > out.claimed_bound)
            out.flags.push_back("claimed bound 2 exceeded: achieved " +
                                std::to_string(cert.length()));
        attach_certificate(std::move(cert));
        return out;
    }

    if (case_ii_4 || case_ii_2) {
        out.tag = CaseTag::II;
        out.claimed_bound = 4;
        note_boundary(CaseTag::II);
        out.swapped_yz = !case_ii_4;
        const Form211<double> hh = out.swapped_yz ? h.swap_yz() : h;
        try {
            CaseII<double> c2 = case_ii_decompose(hh);
            const double rem = std::max(std::abs(c2.remainder[0]), std::abs(c2.remainder[1]));
            if (rem > eps)
                out.flags.push_back("case II: division remainder " + detail::fmt(rem));
            SosCertificate<double> cert = c2.cert;
            if (out.swapped_yz) {
                // Undo the y-z role swap: exchange the x_i z and x_i y slots.
                for (auto& row : cert.squares) {
                    std::swap(row[0], row[2]);
                    std::swap(row[1], row[3]);
                }
            }
            out.case_ii = std::move(c2);
            attach_certificate(std::move(cert));
        } catch (const NotPsd&) {
            out.flags.push_back("case II: residual quadratic not psd (precondition violated)");
        } catch (const InvalidInput& e) {
            out.flags.push_back(std::string("case II: ") + e.what());
        }
        return out;
    }

    if (case_iii) {
        out.tag = CaseTag::III;
        out.claimed_bound = 3;
        note_boundary(CaseTag::III);
        const double n5 = std::max(std::abs(h.c1z()), std::abs(h.c2z()));
        const double n6 = std::max(std::abs(h.c1y()), std::abs(h.c2y()));
        if (n5 > eps || n6 > eps)
            out.flags.push_back("case III: linear parts did not vanish (|h5| " + detail::fmt(n5) +
                                ", |h6| " + detail::fmt(n6) + ")");
        const BiquadraticForm<double> slice = h.m11().pure_slice();
        auto cert = rank_k_search(slice, 3, seed, ropts);
        if (!cert) {
            RankSearchOptions more = ropts;
            more.restarts *= 10;
            cert = rank_k_search(slice, 3, mix_seed(seed, 97), more);
            if (!cert) out.flags.push_back("rank-3 search failed; falling back to a Gram point");
        }
        SosCertificate<double> mapped;
        mapped.basis = m11_basis(2);
        if (!cert) {
            const auto fr = sos_feasibility(slice);
            if (fr.status != FeasibilityStatus::Feasible) {
                out.flags.push_back("case III: no Gram point found (indeterminate)");
                return out;
            }
            cert = extract_certificate(fr.G, build_basis(slice));
        }
        // Slice basis [x1 Y1, x1 Y2, x2 Y1, x2 Y2] with (Y1, Y2) = (y, z)
        // maps onto {x1z, x2z, x1y, x2y, yz}.
        for (const auto& row : cert->squares)
            mapped.squares.push_back({row[1], row[3], row[0], row[2], 0.0});
        attach_certificate(std::move(mapped));
        return out;
    }

    out.tag = CaseTag::IV;
    out.claimed_bound = 5;  // the conjectured ceiling ("four or five")
    note_boundary(CaseTag::IV);
    if (h.h7() < 0) throw NotPsd("classify_211: negative y^2 z^2 coefficient contradicts psd");

    CaseIVPayload pay;
    pay.h7_scale = h.h7();
    // Scale the whole form so h7 = 1, then map hbar4 to x1^2 + x2^2 with the
    // inverse square root of its (pd) matrix.
    M11Form<double> hs = h.m11();
    {
        TripartiteForm<double> t = hs.to_tripartite();
        Polynomial<double> p = t.to_polynomial() * (1.0 / pay.h7_scale);
        hs = M11Form<double>::from_tripartite(extract_components(2, 1, p));
    }
    Eigen::MatrixXd D4 = to_eigen(hs.H4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D4);
    if (es.eigenvalues()[0] <= 0)
        throw NotPsd("classify_211: hbar4 not positive definite in case IV");
    Eigen::MatrixXd S = es.eigenvectors() *
                        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
    pay.P = {{S(0, 0), S(0, 1)}, {S(1, 0), S(1, 1)}};
    M11Form<double> norm = hs.apply_x_change(pay.P);
    pay.normalization_residual =
        detail::mat_max_abs(to_eigen(norm.H4) - Eigen::MatrixXd::Identity(2, 2));
    pay.normalized = Form211<double>(norm);

    // hbar2 = alpha^2 x1^2 + (beta1 x1 + beta2 x2)^2 pattern.
    const double B11 = norm.H2(0, 0), B12 = norm.H2(0, 1), B22 = norm.H2(1, 1);
    if (B22 > eps) {
        pay.beta2 = std::sqrt(B22);
        pay.beta1 = B12 / pay.beta2;
        const double a2 = B11 - pay.beta1 * pay.beta1;
        if (a2 < -eps) out.flags.push_back("pattern defect: hbar2 not psd (alpha^2 " + detail::fmt(a2) + ")");
        pay.alpha = std::sqrt(std::max(0.0, a2));
        if (std::abs(a2) <= eps)
            out.flags.push_back("pattern boundary: alpha vanishes (hbar2 near a perfect square)");
    } else {
        out.flags.push_back("pattern degenerate: hbar2 has (near) zero x2^2 coefficient");
    }

    auto est = sos_rank_estimate(norm, 5, seed, ropts);
    if (est) {
        // Pull the certificate back to the original coordinates: x' = S^{-1} x
        // on each bilinear slot, then scale the squares by sqrt(h7).
        Eigen::MatrixXd Sinv = S.inverse();
        const double root = std::sqrt(pay.h7_scale);
        SosCertificate<double> cert;
        cert.basis = m11_basis(2);
        for (const auto& row : est->second.squares) {
            const double z1 = Sinv(0, 0) * row[0] + Sinv(1, 0) * row[1];
            const double z2 = Sinv(0, 1) * row[0] + Sinv(1, 1) * row[1];
            const double y1 = Sinv(0, 0) * row[2] + Sinv(1, 0) * row[3];
            const double y2 = Sinv(0, 1) * row[2] + Sinv(1, 1) * row[3];
            cert.squares.push_back({root * z1, root * z2, root * y1, root * y2, root * row[4]});
        }
        attach_certificate(refine_certificate(target, cert, ropts));
    } else {
        out.flags.push_back("no sos certificate found within kmax 5 (indeterminate)");
    }
    out.case_iv = std::move(pay);
    return out;
}

// ---------------------------------------------------------------------------
// Conjecture survey.
// ---------------------------------------------------------------------------

struct SurveyInstance {
    uint64_t seed = 0;        // generator seed for replay
    int planted_k = 0;        // number of squares used to build the instance
    double psd_min = 0.0;     // oracle minimum (generation sanity check)
    CaseTag tag = CaseTag::IV;
    std::optional<int> estimate;  // sos_rank_estimate with the survey kmax
    Form211<double> form;
    std::vector<std::string> flags;
};

struct SurveyReport {
    uint64_t master_seed = 0;
    int count = 0;
    int kmax = 5;
    std::map<int, int> histogram;      // estimate -> count
    std::vector<int> estimate_at_kmax; // indices of instances estimated at kmax
    std::vector<SurveyInstance> instances;
};

/// Samples psd instances (sums of standard-normal squares over the
/// five-monomial basis), classifies them, and estimates sos ranks. Instance
/// seeds derive from (master seed, index) so the histogram is independent of
/// the parallel schedule.
inline SurveyReport conjecture_survey(int count, uint64_t seed, int kmax = 5,
                                      const OracleOptions& opts = {},
                                      const RankSearchOptions& ropts = {}) {
    if (count < 1) throw InvalidInput("conjecture_survey: count must be >= 1");
    SurveyReport rep;
    rep.master_seed = seed;
    rep.count = count;
    rep.kmax = kmax;
    rep.instances.resize((size_t)count);
    parallel_for(count, [&](int idx) {
        SurveyInstance& inst = rep.instances[(size_t)idx];
        inst.seed = mix_seed(seed, (uint64_t)idx);
        Rng rng(inst.seed);
        inst.planted_k = rng.uniform_int(1, 5);
        auto [form, cert] = random_sos_form211(inst.planted_k, mix_seed(inst.seed, 1));
        inst.form = form;
        OracleOptions o = opts;
        o.seed = mix_seed(inst.seed, 2);
        auto [psd_ok, verdict] = is_psd(form, o);
        inst.psd_min = verdict.min_value;
        if (!psd_ok) inst.flags.push_back("generated instance failed the psd oracle");
        Classification cls = classify_211(form, 1e-8, mix_seed(inst.seed, 3), o, ropts);
        inst.tag = cls.tag;
        for (auto& f : cls.flags) inst.flags.push_back("classify: " + f);
        auto est = sos_rank_estimate(form.m11(), kmax, mix_seed(inst.seed, 4), ropts);
        if (est) {
            inst.estimate = est->first;
            if (est->first > inst.planted_k)
                inst.flags.push_back("estimate exceeds planted square count");
        } else {
            inst.flags.push_back("rank search failed through kmax");
        }
    });
    for (int i = 0; i < count; ++i) {
        const auto& inst = rep.instances[(size_t)i];
        if (inst.estimate) {
            ++rep.histogram[*inst.estimate];
            if (*inst.estimate == kmax) rep.estimate_at_kmax.push_back(i);
        }
    }
    return rep;
}

}  // namespace bqsos
