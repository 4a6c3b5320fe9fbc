#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bqsos/bases.hpp"
#include "bqsos/certificate.hpp"
#include "bqsos/eigen_util.hpp"
#include "bqsos/forms.hpp"
#include "bqsos/tripartite.hpp"

namespace bqsos {

inline std::vector<Monomial> build_basis(const BiquadraticForm<double>& f) {
    return biquadratic_basis(f.m(), f.n());
}
inline std::vector<Monomial> build_basis(const TripartiteForm<double>& h) {
    return tripartite_basis(h.mx, h.ny);
}
inline std::vector<Monomial> build_basis(const M11Form<double>& h) { return m11_basis(h.dim); }

/// One affine Gram constraint: the entries G_pq (p <= q, weight 1 on the
/// diagonal and 2 off it) whose products b_p b_q give `monomial` must sum to
/// `target`. Classes partition all unordered basis pairs, so projecting each
/// hyperplane independently projects onto the whole affine subspace.
struct GramClass {
    Monomial monomial;
    double target = 0.0;
    std::vector<std::pair<int, int>> pairs;

    double weighted_sum(const Eigen::MatrixXd& G) const {
        double s = 0;
        for (const auto& [p, q] : pairs) s += (p == q ? 1.0 : 2.0) * G(p, q);
        return s;
    }
};

class GramProblem {
   public:
    static GramProblem from(const Polynomial<double>& target, std::vector<Monomial> basis) {
        GramProblem gp;
        gp.basis_ = std::move(basis);
        const int B = (int)gp.basis_.size();
        std::map<Monomial, std::vector<std::pair<int, int>>, GradedLex> pairs_by_monomial;
        for (int p = 0; p < B; ++p)
            for (int q = p; q < B; ++q)
                pairs_by_monomial[gp.basis_[p] * gp.basis_[q]].push_back({p, q});
        for (const auto& [mono, c] : target.terms())
            if (!pairs_by_monomial.count(mono))
                throw InvalidInput("Gram basis cannot express target monomial " + to_string(mono));
        for (auto& [mono, prs] : pairs_by_monomial) {
            GramClass cls;
            cls.monomial = mono;
            cls.target = target.coeff(mono);
            cls.pairs = std::move(prs);
            gp.classes_.push_back(std::move(cls));
        }
        gp.scale_ = 1.0 + target.norm_inf();
        return gp;
    }

    const std::vector<Monomial>& basis() const { return basis_; }
    const std::vector<GramClass>& classes() const { return classes_; }
    int size() const { return (int)basis_.size(); }
    double scale() const { return scale_; }

    /// Exact projection onto the affine coefficient-matching subspace
    /// (per-class hyperplane projections; supports are disjoint).
    void affine_project(Eigen::MatrixXd& G) const {
        for (const auto& cls : classes_) {
            double num = 0, den = 0;
            for (const auto& [p, q] : cls.pairs) {
                const double w = (p == q) ? 1.0 : 2.0;
                num += w * G(p, q);
                den += w * w;
            }
            const double alpha = (cls.target - num) / den;
            for (const auto& [p, q] : cls.pairs) {
                const double w = (p == q) ? 1.0 : 2.0;
                G(p, q) += alpha * w;
                if (p != q) G(q, p) = G(p, q);
            }
        }
    }

    double affine_residual(const Eigen::MatrixXd& G) const {
        double r = 0;
        for (const auto& cls : classes_) r = std::max(r, std::abs(cls.weighted_sum(G) - cls.target));
        return r;
    }

    /// Expands b^T G b and returns the coefficient polynomial.
    Polynomial<double> expand(const Eigen::MatrixXd& G) const {
        Polynomial<double> p;
        for (const auto& cls : classes_) {
            const double v = cls.weighted_sum(G);
            if (v != 0.0) p.add_term(cls.monomial, v);
        }
        return p;
    }

   private:
    std::vector<Monomial> basis_;
    std::vector<GramClass> classes_;
    double scale_ = 1.0;
};

enum class FeasibilityStatus { Feasible, Indeterminate };

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::Indeterminate;
    Eigen::MatrixXd G;
    double affine_residual = 0.0;  // of the returned iterate
    double psd_residual = 0.0;     // max(0, -lambda_min) of the returned iterate
    long iters = 0;
};

/// Dykstra-style alternating projections between the psd cone and the affine
/// coefficient subspace. Success means both residuals fall below
/// tol*(1+||target||_inf); the returned G is the affine re-projection of the
/// psd iterate when that stays psd within tolerance, otherwise the psd
/// iterate itself. Non-convergence is Indeterminate, never "not sos".
inline FeasibilityResult sos_feasibility(const Polynomial<double>& target,
                                         const std::vector<Monomial>& basis, double tol = 1e-9,
                                         long max_iters = 50000) {
    const GramProblem gp = GramProblem::from(target, basis);
    const int B = gp.size();
    const double eps = tol * gp.scale();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(B, B);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(B, B);
    Eigen::MatrixXd Y = G;
    FeasibilityResult out;
    for (long it = 0; it < max_iters; ++it) {
        Y = project_psd(G + P);
        P = G + P - Y;
        G = Y;
        gp.affine_project(G);
        out.iters = it + 1;
        const double res_aff = gp.affine_residual(Y);
        if (res_aff <= eps) {
            const double lmin = least_eigenvalue(G);
            if (lmin >= -eps) {
                out.status = FeasibilityStatus::Feasible;
                out.G = G;
                out.affine_residual = gp.affine_residual(G);
                out.psd_residual = std::max(0.0, -lmin);
                return out;
            }
            // Affine projection left the cone: report the psd iterate.
            out.status = FeasibilityStatus::Feasible;
            out.G = Y;
            out.affine_residual = res_aff;
            out.psd_residual = 0.0;
            return out;
        }
    }
    out.status = FeasibilityStatus::Indeterminate;
    out.G = Y;
    out.affine_residual = gp.affine_residual(Y);
    out.psd_residual = std::max(0.0, -least_eigenvalue(Y));
    return out;
}

inline FeasibilityResult sos_feasibility(const BiquadraticForm<double>& f, double tol = 1e-9,
                                         long max_iters = 50000) {
    return sos_feasibility(f.to_polynomial(), build_basis(f), tol, max_iters);
}
inline FeasibilityResult sos_feasibility(const TripartiteForm<double>& h, double tol = 1e-9,
                                         long max_iters = 50000) {
    return sos_feasibility(h.to_polynomial(), build_basis(h), tol, max_iters);
}
inline FeasibilityResult sos_feasibility(const M11Form<double>& h, double tol = 1e-9,
                                         long max_iters = 50000) {
    return sos_feasibility(h.to_polynomial(), build_basis(h), tol, max_iters);
}

/// Squares are sqrt(lambda_i) v_i over eigenvalues above rank_tol*lambda_max;
/// the certificate length never exceeds the basis size.
inline SosCertificate<double> extract_certificate(const Eigen::MatrixXd& G,
                                                  const std::vector<Monomial>& basis,
                                                  double rank_tol = 1e-6) {
    const auto rows = spectral_factor_psd(G, rank_tol);  // throws NotPsd when warranted
    SosCertificate<double> cert;
    cert.basis = basis;
    for (const auto& r : rows)
        cert.squares.emplace_back(r.data(), r.data() + r.size());
    return cert;
}

}  // namespace bqsos
