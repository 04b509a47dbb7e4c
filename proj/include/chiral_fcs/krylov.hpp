// krylov.hpp - Krylov-Schur iteration for the rightmost eigenpairs of a
// matrix-free complex linear operator.
//
// The projected matrix is kept in Schur form between restarts; wanted Ritz
// values (largest real part) are moved to the leading block with Givens swaps
// and the factorization A V_k = V_k T_k + v_{k+1} b^T is extended back to the
// full Krylov dimension.

#pragma once

#include <algorithm>
#include <concepts>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "chiral_fcs/tensor_core.hpp"

namespace chiral_fcs {

struct KrylovOptions {
    double tol = 1e-10;     ///< residual tolerance ||A x - lambda x|| for unit x
    int krylov_dim = 80;
    int max_restarts = 50;
    int n_wanted = 2;       ///< rightmost Ritz pairs reported
    int n_required = 1;     ///< leading pairs that must meet tol
    std::uint64_t seed = 0x5eed;
};

struct KrylovResult {
    std::vector<cplx> values;      ///< sorted by decreasing real part
    std::vector<Vector> vectors;   ///< unit norm
    std::vector<double> residuals; ///< Ritz residual estimates
    int restarts = 0;
    int matvecs = 0;
    bool converged = false;
};

namespace detail {

/// Swap diagonal entries k and k+1 of an upper triangular T (T <- G^H T G, Q <- Q G).
inline void schur_swap(Matrix& t, Matrix& q, Eigen::Index k) {
    const Eigen::Index n = t.rows();
    const cplx a = t(k, k);
    const cplx b = t(k + 1, k + 1);
    const cplx c = t(k, k + 1);
    // Eigenvector of [[a, c], [0, b]] for eigenvalue b.
    cplx x0 = c;
    cplx x1 = b - a;
    const double nrm = std::hypot(std::abs(x0), std::abs(x1));
    if (nrm == 0.0) return;  // identical eigenvalues, nothing to do
    x0 /= nrm;
    x1 /= nrm;
    Eigen::Matrix2cd g;
    g << x0, -std::conj(x1), x1, std::conj(x0);
    t.block(k, k, 2, n - k) = g.adjoint() * t.block(k, k, 2, n - k);
    t.block(0, k, k + 2, 2) = t.block(0, k, k + 2, 2) * g;
    t(k + 1, k) = 0.0;
    q.middleCols(k, 2) = q.middleCols(k, 2) * g;
}

/// Move the `count` diagonal entries with largest real part to the front.
inline void schur_select_rightmost(Matrix& t, Matrix& q, Eigen::Index count) {
    const Eigen::Index n = t.rows();
    for (Eigen::Index p = 0; p < count && p < n; ++p) {
        Eigen::Index best = p;
        for (Eigen::Index i = p + 1; i < n; ++i) {
            if (t(i, i).real() > t(best, best).real()) best = i;
        }
        for (Eigen::Index i = best; i > p; --i) schur_swap(t, q, i - 1);
    }
}

/// Eigenvector of upper triangular T for the eigenvalue T(i,i).
inline Vector triangular_eigenvector(const Matrix& t, Eigen::Index i) {
    Vector y = Vector::Zero(t.rows());
    y(i) = 1.0;
    const cplx lam = t(i, i);
    for (Eigen::Index j = i - 1; j >= 0; --j) {
        cplx acc = 0.0;
        for (Eigen::Index l = j + 1; l <= i; ++l) acc += t(j, l) * y(l);
        cplx denom = t(j, j) - lam;
        if (std::abs(denom) < 1e-14) denom = 1e-14;
        y(j) = -acc / denom;
    }
    return y / y.norm();
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v;
}

}  // namespace detail

/// Rightmost eigenpairs of the linear map `apply` (Vector -> Vector) of size n.
template <class Apply>
    requires(std::invocable<Apply&, const Vector&> && !std::is_convertible_v<Apply, const Matrix&>)
KrylovResult krylov_schur_rightmost(Apply&& apply, Vector start, const KrylovOptions& opt) {
    const Eigen::Index n = start.size();
    if (n == 0) throw std::invalid_argument("krylov_schur_rightmost: empty start vector");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("krylov_schur_rightmost: tol must be > 0");
    std::mt19937_64 rng(opt.seed);

    const Eigen::Index m = std::min<Eigen::Index>(std::max(opt.krylov_dim, opt.n_wanted + 2), n);
    const Eigen::Index wanted = std::min<Eigen::Index>(opt.n_wanted, m);
    const Eigen::Index keep = std::min<Eigen::Index>(m - 1, std::max<Eigen::Index>(wanted + 1, m / 2));

    Matrix v = Matrix::Zero(n, m + 1);
    Matrix h = Matrix::Zero(m + 1, m);
    if (start.norm() == 0.0 || !start.allFinite()) start = detail::random_vector(n, rng);
    v.col(0) = start / start.norm();

    KrylovResult res;
    Eigen::Index k = 0;  // size of the retained basis
    for (int restart = 0;; ++restart) {
        for (Eigen::Index j = k; j < m; ++j) {
            Vector w = apply(v.col(j));
            ++res.matvecs;
            const double wnorm = w.norm();
            // Classical Gram-Schmidt with one reorthogonalization pass.
            Vector coef = v.leftCols(j + 1).adjoint() * w;
            w.noalias() -= v.leftCols(j + 1) * coef;
            Vector coef2 = v.leftCols(j + 1).adjoint() * w;
            w.noalias() -= v.leftCols(j + 1) * coef2;
            coef += coef2;
            h.block(0, j, j + 1, 1) = coef;
            double beta = w.norm();
            if (beta <= 1e-13 * std::max(1.0, wnorm)) {
                // Invariant subspace: continue with a fresh orthogonal direction.
                h(j + 1, j) = 0.0;
                Vector r = detail::random_vector(n, rng);
                for (int pass = 0; pass < 2; ++pass) r -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * r);
                v.col(j + 1) = r / r.norm();
            } else {
                h(j + 1, j) = beta;
                v.col(j + 1) = w / beta;
            }
        }

        Eigen::ComplexSchur<Matrix> schur(h.topLeftCorner(m, m));
        Matrix t = schur.matrixT();
        Matrix q = schur.matrixU();
        detail::schur_select_rightmost(t, q, keep);

        // Residual of Ritz pair i: |h(m, m-1)| * |last component of its eigenvector|.
        const cplx hlast = h(m, m - 1);
        res.values.clear();
        res.residuals.clear();
        std::vector<Vector> ritz;
        bool all_converged = true;
        for (Eigen::Index i = 0; i < wanted; ++i) {
            const Vector y = q * detail::triangular_eigenvector(t, i);
            const double r = std::abs(hlast * y(m - 1));
            res.values.push_back(t(i, i));
            res.residuals.push_back(r);
            ritz.push_back(y);
            if (i < opt.n_required && r > opt.tol * std::max(1.0, std::abs(t(i, i)))) all_converged = false;
        }
        res.restarts = restart;
        if (all_converged || restart >= opt.max_restarts) {
            res.converged = all_converged;
            res.vectors.clear();
            for (const auto& y : ritz) {
                Vector x = v.leftCols(m) * y;
                res.vectors.push_back(x / x.norm());
            }
            return res;
        }

        // Thick restart on the leading `keep` Schur vectors.
        const Matrix vk = v.leftCols(m) * q.leftCols(keep);
        const Vector vnext = v.col(m);
        const Eigen::RowVectorXcd b = hlast * q.row(m - 1).head(keep);
        v.leftCols(keep) = vk;
        v.col(keep) = vnext;
        h.setZero();
        h.topLeftCorner(keep, keep) = t.topLeftCorner(keep, keep);
        h.row(keep).head(keep) = b;
        k = keep;
    }
}

/// Convenience wrapper for a dense matrix (used by tests and small problems).
inline KrylovResult krylov_schur_rightmost(const Matrix& a, const Vector& start, const KrylovOptions& opt) {
    return krylov_schur_rightmost([&](const auto& x) -> Vector { return a * x; }, start, opt);
}

}  // namespace chiral_fcs
