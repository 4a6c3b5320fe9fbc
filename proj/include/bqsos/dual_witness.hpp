#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "bqsos/gram.hpp"

namespace bqsos {

/// A separating functional: L acts on coefficient space by L(g) = sum over
/// target monomials of g_mono * y_mono. Feasibility of L for the dual sos
/// cone is witnessed by the psd moment matrix M (entries constant on each
/// Gram class, trace 1, M_pq = y of the class of (p,q)). Lf < 0 then places
/// the form outside the sos cone at numerical tolerance. Lf refers to the
/// form scaled by 1/||coeffs||_inf so thresholds are scale-free.
struct DualWitness {
    std::vector<Monomial> monomials;
    Eigen::VectorXd y;
    Eigen::MatrixXd M;
    double Lf = 0.0;
    double lambda_min = 0.0;
};

namespace detail {

/// Projection onto the moment-structure subspace V: within each Gram class
/// all ordered entries become their mean (diagonal entries count once,
/// off-diagonal twice).
inline void moment_project(Eigen::MatrixXd& M, const GramProblem& gp) {
    M = 0.5 * (M + M.transpose()).eval();
    for (const auto& cls : gp.classes()) {
        double tot = 0;
        int cnt = 0;
        for (const auto& [p, q] : cls.pairs) {
            if (p == q) {
                tot += M(p, q);
                cnt += 1;
            } else {
                tot += 2 * M(p, q);
                cnt += 2;
            }
        }
        const double mean = tot / cnt;
        for (const auto& [p, q] : cls.pairs) {
            M(p, q) = mean;
            M(q, p) = mean;
        }
    }
}

/// Projection onto V intersected with {trace = 1}: correct the trace along
/// the direction P_V(I), which lies in V.
inline void moment_trace_project(Eigen::MatrixXd& M, const GramProblem& gp,
                                 const Eigen::MatrixXd& D, double trD) {
    moment_project(M, gp);
    M += ((1.0 - M.trace()) / trD) * D;
}

}  // namespace detail

/// Searches for a dual witness that the target is not a sum of squares over
/// the given basis: minimize <C, M> over psd moment matrices of trace 1,
/// where <C, M> = L(target/||target||_inf). Projected gradient with a
/// decaying step, followed by an alternating-projection polish that restores
/// M to the psd cone within 1e-9. A witness is returned only when the
/// polished functional value is <= -1e-3; absence of a witness proves
/// nothing.
inline std::optional<DualWitness> not_sos_witness(const Polynomial<double>& target,
                                                  const std::vector<Monomial>& basis,
                                                  int iters = 2000, uint64_t seed = 0,
                                                  long polish_iters = 20000) {
    (void)seed;  // the search is deterministic; the parameter is accepted for interface stability
    const double scale = target.norm_inf();
    if (scale <= 0) return std::nullopt;  // zero form: L(0) = 0, no witness exists
    Polynomial<double> scaled;
    for (const auto& [mono, c] : target.terms()) scaled.add_term(mono, c / scale);
    const GramProblem gp = GramProblem::from(scaled, basis);
    const int B = gp.size();

    // Gradient matrix C: <C, M> = sum over classes of target coeff times the
    // class value of M; each class coefficient is spread evenly over its
    // ordered entries.
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(B, B);
    for (const auto& cls : gp.classes()) {
        int cnt = 0;
        for (const auto& [p, q] : cls.pairs) cnt += (p == q) ? 1 : 2;
        for (const auto& [p, q] : cls.pairs) {
            C(p, q) = cls.target / cnt;
            C(q, p) = C(p, q);
        }
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(B, B);
    detail::moment_project(D, gp);
    const double trD = D.trace();

    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(B, B) / B;
    const double eta0 = 0.5 / std::max(1e-12, C.norm());
    for (int it = 0; it < iters; ++it) {
        const double eta = eta0 / (1.0 + it / 200.0);
        M -= eta * C;
        for (int round = 0; round < 2; ++round) {
            M = project_psd(M);
            detail::moment_trace_project(M, gp, D, trD);
        }
    }
    // Polish into the intersection {psd} ∩ {V, trace 1}.
    for (long it = 0; it < polish_iters; ++it) {
        M = project_psd(M);
        detail::moment_trace_project(M, gp, D, trD);
        if (it % 50 == 49 && least_eigenvalue(M) >= -1e-9) break;
    }

    DualWitness w;
    w.M = M;
    w.lambda_min = least_eigenvalue(M);
    w.monomials.reserve(gp.classes().size());
    w.y.resize((long)gp.classes().size());
    w.Lf = 0.0;
    for (size_t m = 0; m < gp.classes().size(); ++m) {
        const auto& cls = gp.classes()[m];
        w.monomials.push_back(cls.monomial);
        const auto& [p, q] = cls.pairs.front();
        w.y[(long)m] = M(p, q);
        w.Lf += cls.target * M(p, q);
    }
    // Independent validation: the moment matrix must be psd at tolerance and
    // the recomputed functional value (via full weighted sums rather than
    // class representatives) must agree.
    const double lmax = std::max(1.0, std::abs(least_eigenvalue(-M)));
    if (w.lambda_min < -1e-9 * lmax) return std::nullopt;
    double Lf_check = 0.0;
    for (const auto& cls : gp.classes()) {
        int cnt = 0;
        for (const auto& [p, q] : cls.pairs) cnt += (p == q) ? 1 : 2;
        Lf_check += cls.target * cls.weighted_sum(M) / cnt;
    }
    if (std::abs(Lf_check - w.Lf) > 1e-9 * (1.0 + std::abs(w.Lf))) return std::nullopt;
    if (w.Lf > -1e-3) return std::nullopt;
    return w;
}

template <class FormT>
std::optional<DualWitness> not_sos_witness(const FormT& form, int iters = 2000, uint64_t seed = 0) {
    return not_sos_witness(form.to_polynomial(), build_basis(form), iters, seed);
}

}  // namespace bqsos
