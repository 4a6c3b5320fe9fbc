#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "bqsos/gram.hpp"
#include "bqsos/rng.hpp"

namespace bqsos {

struct RankSearchOptions {
    int restarts = 30;
    int max_iters = 500;     // Gauss-Newton steps per start
    double damping = 1e-3;   // initial Levenberg damping
    double tol = 1e-7;       // relative max-abs residual for success
};

namespace detail {

inline Eigen::VectorXd rank_residual(const GramProblem& gp, const Eigen::MatrixXd& R) {
    const Eigen::MatrixXd G = R * R.transpose();
    Eigen::VectorXd r((long)gp.classes().size());
    for (size_t m = 0; m < gp.classes().size(); ++m)
        r[(long)m] = gp.classes()[m].weighted_sum(G) - gp.classes()[m].target;
    return r;
}

/// Damped Gauss-Newton descent from a given factor; returns the final
/// max-abs coefficient residual.
inline double lm_descend(const GramProblem& gp, Eigen::MatrixXd& R, const RankSearchOptions& opts) {
    const int B = gp.size();
    const int k = (int)R.cols();
    const int M = (int)gp.classes().size();
    const double tol_res = opts.tol * gp.scale();
    Eigen::VectorXd r = rank_residual(gp, R);
    double f = 0.5 * r.squaredNorm();
    double lam = opts.damping;
    for (int it = 0; it < opts.max_iters; ++it) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, B * k);
        for (int m = 0; m < M; ++m)
            for (const auto& [p, q] : gp.classes()[(size_t)m].pairs) {
                if (p == q) {
                    J.block(m, p * k, 1, k) += 2.0 * R.row(p);
                } else {
                    J.block(m, p * k, 1, k) += 2.0 * R.row(q);
                    J.block(m, q * k, 1, k) += 2.0 * R.row(p);
                }
            }
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::MatrixXd A = J.transpose() * J;
        bool moved = false;
        for (int tries = 0; tries < 20; ++tries) {
            Eigen::MatrixXd Areg = A;
            Areg.diagonal().array() += lam;
            const Eigen::VectorXd dx = Areg.ldlt().solve(-g);
            Eigen::MatrixXd Rn = R;
            for (int i = 0; i < B; ++i)
                for (int c = 0; c < k; ++c) Rn(i, c) += dx[i * k + c];
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
    return r.lpNorm<Eigen::Infinity>();
}

}  // namespace detail

/// Burer-Monteiro-style search for a Gram factor with k columns: damped
/// Gauss-Newton on the coefficient residuals of G = R R^T, with an analytic
/// Jacobian and seeded multi-start. Starts run in order with early exit at
/// the first success, so results are deterministic per seed. Failure is not
/// evidence that the rank exceeds k.
inline std::optional<SosCertificate<double>> rank_k_search(const Polynomial<double>& target,
                                                           const std::vector<Monomial>& basis, int k,
                                                           uint64_t seed,
                                                           const RankSearchOptions& opts = {}) {
    if (k < 1 || k > (int)basis.size()) throw InvalidInput("rank_k_search: need 1 <= k <= basis size");
    const GramProblem gp = GramProblem::from(target, basis);
    const int B = gp.size();
    const double tol_res = opts.tol * gp.scale();

    double best_res = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_R;
    for (int start = 0; start < opts.restarts; ++start) {
        Rng rng = Rng::derived(seed, (uint64_t)start);
        Eigen::MatrixXd R(B, k);
        const double amp = std::sqrt(gp.scale() / std::max(1, B));
        for (int i = 0; i < B; ++i)
            for (int c = 0; c < k; ++c) R(i, c) = amp * rng.normal();
        const double mres = detail::lm_descend(gp, R, opts);
        if (mres < best_res) {
            best_res = mres;
            best_R = R;
        }
        if (best_res <= tol_res) break;
    }
    if (best_res > tol_res) return std::nullopt;
    SosCertificate<double> cert;
    cert.basis = basis;
    for (int c = 0; c < k; ++c) {
        std::vector<double> row(B);
        for (int i = 0; i < B; ++i) row[(size_t)i] = best_R(i, c);
        cert.squares.push_back(std::move(row));
    }
    return cert;
}

template <class FormT>
std::optional<SosCertificate<double>> rank_k_search(const FormT& form, int k, uint64_t seed,
                                                    const RankSearchOptions& opts = {}) {
    return rank_k_search(form.to_polynomial(), build_basis(form), k, seed, opts);
}

/// Smallest k in 1..kmax for which rank_k_search succeeds; an upper bound on
/// the sos rank, not the rank itself.
inline std::optional<std::pair<int, SosCertificate<double>>> sos_rank_estimate(
    const Polynomial<double>& target, const std::vector<Monomial>& basis, int kmax, uint64_t seed,
    const RankSearchOptions& opts = {}) {
    if (kmax < 1 || kmax > (int)basis.size())
        throw InvalidInput("sos_rank_estimate: need 1 <= kmax <= basis size");
    for (int k = 1; k <= kmax; ++k) {
        auto cert = rank_k_search(target, basis, k, mix_seed(seed, (uint64_t)k), opts);
        if (cert) return std::make_pair(k, std::move(*cert));
    }
    return std::nullopt;
}

template <class FormT>
std::optional<std::pair<int, SosCertificate<double>>> sos_rank_estimate(
    const FormT& form, int kmax, uint64_t seed, const RankSearchOptions& opts = {}) {
    return sos_rank_estimate(form.to_polynomial(), build_basis(form), kmax, seed, opts);
}

/// Warm-started descent from an approximate certificate (e.g. one mapped
/// through a coordinate change): keeps the length, tightens the residual.
inline SosCertificate<double> refine_certificate(const Polynomial<double>& target,
                                                 const SosCertificate<double>& cert,
                                                 const RankSearchOptions& opts = {}) {
    if (cert.squares.empty()) return cert;
    const GramProblem gp = GramProblem::from(target, cert.basis);
    const int B = gp.size();
    const int k = (int)cert.squares.size();
    Eigen::MatrixXd R(B, k);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < B; ++i) R(i, c) = cert.squares[(size_t)c][(size_t)i];
    detail::lm_descend(gp, R, opts);
    SosCertificate<double> out;
    out.basis = cert.basis;
    for (int c = 0; c < k; ++c) {
        std::vector<double> row((size_t)B);
        for (int i = 0; i < B; ++i) row[(size_t)i] = R(i, c);
        out.squares.push_back(std::move(row));
    }
    return out;
}

}  // namespace bqsos
