// state_analysis.hpp - purity, two-body concurrence, fidelity and the analytic
// dimer dark state of the alternating-detuning chain.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chiral_fcs/chain_model.hpp"
#include "chiral_fcs/tensor_core.hpp"

namespace chiral_fcs {

inline constexpr double kPositivityTol = 1e-8;

struct DimerParams {
    double rabi = 0.0;
    double detuning = 0.0;     ///< magnitude delta of the alternating pattern
    double delta_gamma = 0.0;  ///< gamma_R - gamma_L
    int n_sites = 2;

    void validate() const {
        if (n_sites < 2 || n_sites % 2 != 0) {
            throw std::invalid_argument("DimerParams: n_sites must be even, got " + std::to_string(n_sites));
        }
        HilbertSpace{n_sites};
        if (detuning == 0.0 && delta_gamma == 0.0) {
            throw std::invalid_argument("DimerParams: beta has a pole at delta = delta_gamma = 0");
        }
    }
};

/// beta = -2 Omega / (2 delta + i dgamma)
inline cplx dimer_beta(const DimerParams& p) {
    p.validate();
    return -2.0 * p.rabi / (2.0 * p.detuning + kI * p.delta_gamma);
}

/// Normalized two-site state |D> ~ |gg> + beta (|ge> - |eg>).
inline Vector dimer_pair_state(const DimerParams& p) {
    const cplx beta = dimer_beta(p);
    Vector d(4);
    d << 1.0, beta, -beta, 0.0;
    return d / std::sqrt(1.0 + 2.0 * std::norm(beta));
}

/// |psi> = (x)_{j=1}^{N/2} |D>_{2j-1,2j}
inline Vector dimer_state_vector(const DimerParams& p) {
    const Vector pair = dimer_pair_state(p);
    Vector psi = pair;
    for (int j = 1; j < p.n_sites / 2; ++j) {
        Vector next(psi.size() * 4);
        for (Eigen::Index a = 0; a < psi.size(); ++a) next.segment(4 * a, 4) = psi(a) * pair;
        psi = std::move(next);
    }
    return psi;
}

inline DensityMatrix dimer_state(const DimerParams& p) {
    const Vector psi = dimer_state_vector(p);
    return psi * psi.adjoint();
}

inline void check_unit_trace(const DensityMatrix& rho, const char* what) {
    if (std::abs(rho.trace() - cplx(1.0)) > 1e-8) {
        throw std::invalid_argument(std::string(what) + ": density matrix must have unit trace");
    }
}

inline void check_positive(const DensityMatrix& rho, const char* what, double tol = kPositivityTol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -tol) {
        throw std::invalid_argument(std::string(what) + ": input has eigenvalue " + std::to_string(lo) +
                                    " below -" + std::to_string(tol));
    }
}

inline double purity(const DensityMatrix& rho) {
    check_unit_trace(rho, "purity");
    // Tr[rho^2] = sum_ij rho_ij rho_ji = sum |rho_ij|^2 for Hermitian rho
    return (rho.transpose().cwiseProduct(rho)).sum().real();
}

/// Positive square root of a Hermitian PSD matrix (tiny negative eigenvalues clipped).
inline Matrix psd_sqrt(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Wootters concurrence of a two-qubit state in the |gg>,|ge>,|eg>,|ee> basis.
inline double concurrence(const DensityMatrix& rho_ab) {
    if (rho_ab.rows() != 4 || rho_ab.cols() != 4) {
        throw std::invalid_argument("concurrence: expected a 4x4 density matrix");
    }
    if (hermitian_deviation(rho_ab) > 1e-8) throw std::invalid_argument("concurrence: input not Hermitian");
    check_unit_trace(rho_ab, "concurrence");
    check_positive(rho_ab, "concurrence");
    // sqrt(rho) tilde(rho) sqrt(rho) = A A^dag, A = sqrt(rho) YY conj(sqrt(rho)); the lambda_i are the
    // singular values of A, which stay accurate near zero for (nearly) pure states.
    const Matrix yy = kron(local::pauli_y(), local::pauli_y());
    const Matrix sq = psd_sqrt(rho_ab);
    const Matrix a = sq * yy * sq.conjugate();
    Eigen::Vector4d lam = Eigen::JacobiSVD<Matrix>(a).singularValues();
    std::sort(lam.data(), lam.data() + 4, std::greater<>());
    return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

struct PairConcurrence {
    std::pair<int, int> pair;
    double value;
};

inline std::vector<PairConcurrence> pair_concurrence_map(const DensityMatrix& rho,
                                                         const std::vector<std::pair<int, int>>& pairs) {
    std::vector<PairConcurrence> out;
    out.reserve(pairs.size());
    for (const auto& pr : pairs) {
        Matrix red = partial_trace(rho, pr.first, pr.second);
        red = hermitian_part(red) / red.trace().real();
        out.push_back({pr, concurrence(red)});
    }
    return out;
}

/// Pairs (1,2), (2,3), ..., (N-1,N).
inline std::vector<std::pair<int, int>> nearest_neighbour_pairs(int n_sites) {
    std::vector<std::pair<int, int>> p;
    for (int j = 1; j < n_sites; ++j) p.emplace_back(j, j + 1);
    return p;
}

struct DarkStateReport {
    double residual = 0.0;  ///< ||W(rho)||_F
    double guided_emission_rate = 0.0;
};

inline DarkStateReport dark_state_residual(const GeneratorSpec& spec, const DensityMatrix& rho) {
    check_unit_trace(rho, "dark_state_residual");
    return DarkStateReport{apply_generator(spec, rho).norm(), spec.guided_emission_rate(rho)};
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity_to(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw std::invalid_argument("fidelity_to: dimension mismatch");
    }
    check_unit_trace(rho, "fidelity_to");
    check_unit_trace(sigma, "fidelity_to");
    check_positive(rho, "fidelity_to");
    check_positive(sigma, "fidelity_to");
    // For a pure argument the Uhlmann fidelity reduces to Tr[rho sigma].
    if (purity(sigma) > 1.0 - 1e-12 || purity(rho) > 1.0 - 1e-12) {
        return std::clamp((rho * sigma).trace().real(), 0.0, 1.0);
    }
    const Matrix sq = psd_sqrt(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(sq * sigma * sq), Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::min(1.0, tr * tr);
}

}  // namespace chiral_fcs
