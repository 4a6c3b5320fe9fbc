#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "bqsos/errors.hpp"
#include "bqsos/linalg.hpp"

namespace bqsos {

inline Eigen::MatrixXd to_eigen(const SymMatrix<double>& a) {
    const int n = (int)a.size();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    return m;
}

inline SymMatrix<double> from_eigen(const Eigen::MatrixXd& m) {
    SymMatrix<double> a(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j) a.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return a;
}

/// Fixes the sign ambiguity of an eigenvector: first component with
/// magnitude above 1e-14 is made positive.
inline void normalize_sign(Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-14) {
            if (v[i] < 0) v = -v;
            return;
        }
    }
}

/// Least eigenpair with a deterministic tie rule: among eigenvectors whose
/// eigenvalue is within 1e-12 of the smallest, pick the one whose
/// absolute-value vector is lexicographically largest.
inline std::pair<double, Eigen::VectorXd> least_eigenpair(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& vals = es.eigenvalues();  // ascending
    const double lo = vals[0];
    const double tie = 1e-12 * (1.0 + std::abs(lo));
    int best = 0;
    auto abs_lex_less = [&](int a, int b) {  // true when column a < column b
        for (int r = 0; r < m.rows(); ++r) {
            const double da = std::abs(es.eigenvectors()(r, a));
            const double db = std::abs(es.eigenvectors()(r, b));
            if (da != db) return da < db;
        }
        return false;
    };
    for (int c = 1; c < vals.size() && vals[c] <= lo + tie; ++c)
        if (abs_lex_less(best, c)) best = c;
    Eigen::VectorXd v = es.eigenvectors().col(best);
    normalize_sign(v);
    return {vals[best], v};
}

/// Nearest psd matrix in Frobenius norm: eigenvalue clipping at zero.
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

inline double least_eigenvalue(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

/// Rank-revealing factorization of a psd matrix: rows r_i with
/// M = sum_i r_i r_i^T, keeping eigenvalues above rank_tol * lambda_max.
/// An eigenvalue below -rank_tol * ||M|| certifies M is not psd.
inline std::vector<Eigen::VectorXd> spectral_factor_psd(const Eigen::MatrixXd& m,
                                                        double rank_tol = 1e-6) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& vals = es.eigenvalues();
    const double top = std::max(std::abs(vals[0]), std::abs(vals[vals.size() - 1]));
    if (vals[0] < -rank_tol * top) throw NotPsd("matrix has a significantly negative eigenvalue");
    std::vector<Eigen::VectorXd> rows;
    for (int c = vals.size() - 1; c >= 0; --c) {
        if (vals[c] <= rank_tol * std::max(0.0, vals[vals.size() - 1])) break;
        Eigen::VectorXd v = es.eigenvectors().col(c);
        normalize_sign(v);
        rows.push_back(std::sqrt(vals[c]) * v);
    }
    return rows;
}

/// Same factorization with an absolute eigenvalue threshold, for matrices
/// (e.g. residuals of near-exact cancellations) whose own norm is no scale
/// reference: keeps lambda > abs_eps, throws below -abs_eps.
inline std::vector<Eigen::VectorXd> spectral_factor_psd_abs(const Eigen::MatrixXd& m,
                                                            double abs_eps) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& vals = es.eigenvalues();
    if (vals[0] < -abs_eps) throw NotPsd("matrix has a significantly negative eigenvalue");
    std::vector<Eigen::VectorXd> rows;
    for (int c = vals.size() - 1; c >= 0; --c) {
        if (vals[c] <= abs_eps) break;
        Eigen::VectorXd v = es.eigenvectors().col(c);
        normalize_sign(v);
        rows.push_back(std::sqrt(vals[c]) * v);
    }
    return rows;
}

}  // namespace bqsos
