// spectral.hpp - scaled cumulant generating function theta(s) as the rightmost
// eigenvalue of the tilted generator, biased states and counting cumulants.

#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chiral_fcs/chain_model.hpp"
#include "chiral_fcs/krylov.hpp"
#include "chiral_fcs/parallel.hpp"
#include "chiral_fcs/tensor_core.hpp"

namespace chiral_fcs {

class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

  private:
    double best_residual_;
};

/// Matrix-free W_{s_L, s_R, s_U} acting on column-stacked density matrices.
class TiltedGenerator {
  public:
    TiltedGenerator(const GeneratorSpec& spec, Tilt tilt) : spec_(&spec), tilt_(tilt) {}

    const GeneratorSpec& spec() const noexcept { return *spec_; }
    const Tilt& tilt() const noexcept { return tilt_; }
    Eigen::Index size() const noexcept { return spec_->dim() * spec_->dim(); }
    TiltedGenerator with_tilt(Tilt t) const { return TiltedGenerator(*spec_, t); }

    Vector apply(const Vector& x) const {
        const Eigen::Index d = spec_->dim();
        const Matrix out = spec_->apply_tilted(Eigen::Map<const Matrix>(x.data(), d, d), tilt_);
        return Eigen::Map<const Vector>(out.data(), out.size());
    }
    Vector apply_adjoint(const Vector& x) const {
        const Eigen::Index d = spec_->dim();
        const Matrix out = spec_->apply_tilted_adjoint(Eigen::Map<const Matrix>(x.data(), d, d), tilt_);
        return Eigen::Map<const Vector>(out.data(), out.size());
    }

  private:
    const GeneratorSpec* spec_;
    Tilt tilt_;
};

struct SpectralOptions {
    double tol = 1e-10;
    int krylov_dim = 80;
    int max_restarts = 500;
    double positivity_tol = 1e-8;
    double residual_limit = 1e-8;  ///< on ||W rho - theta rho||_F / ||rho||_F
};

struct SpectralResult {
    Tilt tilt;
    double theta = 0.0;
    DensityMatrix rho_right;  ///< unit trace, Hermitian
    OperatorMatrix ell_left;  ///< Tr[ell^dag rho_right] = 1
    double residual_norm = 0.0;
    double left_residual_norm = 0.0;
    cplx second_eigenvalue{};
    double spectral_gap_estimate = 0.0;
    bool quasi_degenerate = false;
    int iterations = 0;  ///< matrix-vector products, right plus left problem
};

/// Warm-start material from a previous solve.
struct WarmStart {
    const Matrix* right = nullptr;
    const Matrix* left = nullptr;
};

namespace detail {

inline KrylovOptions krylov_options(const SpectralOptions& o, int wanted) {
    KrylovOptions k;
    k.tol = o.tol;
    k.krylov_dim = o.krylov_dim;
    k.max_restarts = o.max_restarts;
    k.n_wanted = wanted;
    return k;
}

inline std::string describe(const Tilt& t) {
    std::ostringstream os;
    os << "(s_L=" << t.left << ", s_R=" << t.right << ", s_U=" << t.unguided << ")";
    return os.str();
}

}  // namespace detail

inline SpectralResult dominant_eigenpair(const TiltedGenerator& gen, const SpectralOptions& opt = {},
                                         WarmStart warm = {}) {
    if (!std::isfinite(gen.tilt().left) || !std::isfinite(gen.tilt().right) ||
        !std::isfinite(gen.tilt().unguided)) {
        throw std::invalid_argument("dominant_eigenpair: tilt must be finite");
    }
    if (!(opt.tol > 0.0)) throw std::invalid_argument("dominant_eigenpair: tol must be > 0");
    const Eigen::Index d = gen.spec().dim();
    const Matrix id = Matrix::Identity(d, d);

    // Right problem: two rightmost pairs so the gap can be estimated.
    Vector start = warm.right ? vectorize(*warm.right) : vectorize(id / static_cast<double>(d));
    const KrylovResult right = krylov_schur_rightmost(
        [&](const auto& x) -> Vector { return gen.apply(x); }, start, detail::krylov_options(opt, 2));
    if (!right.converged) {
        const double best = *std::min_element(right.residuals.begin(), right.residuals.end());
        throw SolverError("dominant_eigenpair: right eigenproblem did not converge at " +
                              detail::describe(gen.tilt()) + ", best residual " + std::to_string(best),
                          best);
    }

    SpectralResult out;
    out.tilt = gen.tilt();
    out.second_eigenvalue = right.values.size() > 1 ? right.values[1] : cplx{};
    out.spectral_gap_estimate = right.values.size() > 1
                                    ? right.values[0].real() - right.values[1].real()
                                    : std::numeric_limits<double>::infinity();
    out.quasi_degenerate = out.spectral_gap_estimate < 10.0 * opt.tol;
    std::size_t pick = 0;
    if (out.quasi_degenerate && right.residuals.size() > 1 && right.residuals[1] < right.residuals[0]) {
        pick = 1;
    }
    out.iterations = right.matvecs;

    Matrix rho = devectorize(right.vectors[pick], d);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-300) {
        throw SolverError("dominant_eigenpair: rightmost eigenmatrix is traceless at " +
                              detail::describe(gen.tilt()),
                          right.residuals[pick]);
    }
    rho /= tr;
    rho = hermitian_part(rho);
    rho /= rho.trace().real();

    // Left problem on the adjoint map, started from the trace functional.
    Vector lstart = warm.left ? vectorize(*warm.left) : vectorize(id);
    const KrylovResult left = krylov_schur_rightmost(
        [&](const auto& x) -> Vector { return gen.apply_adjoint(x); }, lstart, detail::krylov_options(opt, 1));
    out.iterations += left.matvecs;
    if (!left.converged) {
        throw SolverError("dominant_eigenpair: left eigenproblem did not converge at " +
                              detail::describe(gen.tilt()),
                          left.residuals.front());
    }
    Matrix ell = devectorize(left.vectors.front(), d);
    const cplx overlap = (ell.adjoint() * rho).trace();
    if (std::abs(overlap) < 1e-14) {
        throw SolverError("dominant_eigenpair: left and right eigenmatrices are orthogonal at " +
                              detail::describe(gen.tilt()),
                          left.residuals.front());
    }
    ell /= std::conj(overlap);  // now Tr[ell^dag rho] = 1
    ell = hermitian_part(ell);
    ell /= std::conj((ell.adjoint() * rho).trace());

    // Two-sided Rayleigh quotient: second order accurate in both residuals.
    const Matrix wrho = gen.spec().apply_tilted(rho, gen.tilt());
    out.theta = ((ell.adjoint() * wrho).trace() / (ell.adjoint() * rho).trace()).real();
    out.residual_norm = (wrho - out.theta * rho).norm() / rho.norm();
    const Matrix well = gen.spec().apply_tilted_adjoint(ell, gen.tilt());
    out.left_residual_norm = (well - out.theta * ell).norm() / ell.norm();

    if (out.residual_norm > opt.residual_limit) {
        throw SolverError("dominant_eigenpair: residual " + std::to_string(out.residual_norm) +
                              " above limit at " + detail::describe(gen.tilt()),
                          out.residual_norm);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -opt.positivity_tol) {
        throw SolverError("dominant_eigenpair: biased state has eigenvalue " + std::to_string(min_eig) +
                              " at " + detail::describe(gen.tilt()),
                          out.residual_norm);
    }
    out.rho_right = std::move(rho);
    out.ell_left = std::move(ell);
    return out;
}

inline SpectralResult dominant_eigenpair(const GeneratorSpec& spec, const Tilt& tilt,
                                         const SpectralOptions& opt = {}, WarmStart warm = {}) {
    return dominant_eigenpair(TiltedGenerator(spec, tilt), opt, warm);
}

struct PhotonRate {
    double hellmann_feynman = 0.0;
    double finite_difference = 0.0;
    double step = 0.0;
};

/// k(s) = -d theta / ds along the guided counting fields, evaluated from the
/// left/right eigenmatrices and cross-checked by finite differences.
inline double photon_rate_hellmann_feynman(const SpectralResult& r, const GeneratorSpec& spec) {
    cplx num = 0.0;
    for (const auto& c : spec.channels()) {
        if (!c.guided()) continue;
        const double w = c.rate * std::exp(-r.tilt.for_kind(c.kind));
        num += w * (r.ell_left.adjoint() * c.op * r.rho_right * c.op.adjoint()).trace();
    }
    return (num / (r.ell_left.adjoint() * r.rho_right).trace()).real();
}

/// -d theta / ds by central differences around r.tilt, Richardson-extrapolated
/// so the O(h^2) term (large where the third cumulant is) drops out.
inline double photon_rate_finite_difference(const SpectralResult& r, const TiltedGenerator& gen,
                                            const SpectralOptions& opt = {}, double* step = nullptr) {
    const double h = 1e-4 * std::max({1.0, std::abs(r.tilt.left), std::abs(r.tilt.right)});
    if (step) *step = h;
    const WarmStart warm{&r.rho_right, &r.ell_left};
    auto central = [&](double x) {
        const double tp = dominant_eigenpair(gen.with_tilt(r.tilt.shifted_guided(x)), opt, warm).theta;
        const double tm = dominant_eigenpair(gen.with_tilt(r.tilt.shifted_guided(-x)), opt, warm).theta;
        return -(tp - tm) / (2.0 * x);
    };
    return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

/// Agreement band between the two estimates of k(s).
inline bool photon_rates_agree(double hf, double fd) {
    return std::abs(hf - fd) <= std::max(1e-5, 1e-3 * std::abs(hf));
}

inline PhotonRate photon_rate(const SpectralResult& r, const TiltedGenerator& gen,
                              const SpectralOptions& opt = {}) {
    PhotonRate out;
    out.hellmann_feynman = photon_rate_hellmann_feynman(r, gen.spec());
    out.finite_difference = photon_rate_finite_difference(r, gen, opt, &out.step);
    if (!photon_rates_agree(out.hellmann_feynman, out.finite_difference)) {
        throw SolverError("photon_rate: Hellmann-Feynman " + std::to_string(out.hellmann_feynman) +
                              " and finite-difference " + std::to_string(out.finite_difference) +
                              " disagree at " + detail::describe(r.tilt),
                          std::abs(out.hellmann_feynman - out.finite_difference));
    }
    return out;
}

struct VarianceRate {
    double value = 0.0;           ///< d^2 theta / ds^2 at step h/2
    double error_estimate = 0.0;  ///< |D(h) - D(h/2)|
    double step = 0.0;
    bool noisy = false;           ///< error estimate above 10% of |value|
};

/// Second central difference of theta along the guided counting fields.
inline VarianceRate count_variance_rate(const GeneratorSpec& spec, const Tilt& tilt, double step = 2e-3,
                                        const SpectralOptions& opt = {},
                                        const SpectralResult* center = nullptr) {
    std::optional<SpectralResult> own;
    if (!center) {
        own = dominant_eigenpair(spec, tilt, opt);
        center = &*own;
    }
    const TiltedGenerator gen(spec, tilt);
    const WarmStart warm{&center->rho_right, &center->ell_left};
    auto theta_at = [&](double h) {
        return dominant_eigenpair(gen.with_tilt(tilt.shifted_guided(h)), opt, warm).theta;
    };
    const double t0 = center->theta;
    const double h = step;
    const double d_h = (theta_at(h) - 2.0 * t0 + theta_at(-h)) / (h * h);
    const double d_h2 = (theta_at(h / 2) - 2.0 * t0 + theta_at(-h / 2)) / (h * h / 4.0);
    VarianceRate v;
    v.value = d_h2;
    v.error_estimate = std::abs(d_h - d_h2);
    v.step = h / 2;
    v.noisy = v.error_estimate > 0.1 * std::abs(v.value) && v.error_estimate > 1e-8;
    return v;
}

inline VarianceRate count_variance_rate(const GeneratorSpec& spec, double s, double step = 2e-3,
                                        const SpectralOptions& opt = {}) {
    return count_variance_rate(spec, Tilt::guided(s), step, opt);
}

/// One grid point of a sweep. `result` is empty when the solver failed.
struct SweepPoint {
    double s = 0.0;
    double secondary = 0.0;
    std::optional<SpectralResult> result;
    std::string error;
};

struct SweepOptions {
    SpectralOptions spectral;
    bool warm_start = true;
    int workers = 1;
};

/// theta(s) on s_grid for every value of a secondary parameter. `make_spec`
/// turns a secondary value into a generator (e.g. by setting the Rabi
/// frequency). Columns run concurrently; within a column points are solved in
/// grid order, warm-started from the previous point.
template <class MakeSpec>
std::vector<SweepPoint> scgf_sweep(MakeSpec&& make_spec, const std::vector<double>& s_grid,
                                   const std::vector<double>& secondary_grid, const SweepOptions& opt = {}) {
    if (s_grid.empty() || secondary_grid.empty()) {
        throw std::invalid_argument("scgf_sweep: grids must be non-empty");
    }
    for (double v : s_grid) {
        if (!std::isfinite(v)) throw std::invalid_argument("scgf_sweep: s grid must be finite");
    }
    for (double v : secondary_grid) {
        if (!std::isfinite(v)) throw std::invalid_argument("scgf_sweep: secondary grid must be finite");
    }
    const std::size_t ns = s_grid.size();
    std::vector<SweepPoint> table(ns * secondary_grid.size());
    parallel_for(secondary_grid.size(), opt.workers, [&](std::size_t col) {
        const GeneratorSpec spec = make_spec(secondary_grid[col]);
        const SpectralResult* prev = nullptr;
        for (std::size_t i = 0; i < ns; ++i) {
            SweepPoint& pt = table[col * ns + i];
            pt.s = s_grid[i];
            pt.secondary = secondary_grid[col];
            try {
                WarmStart warm;
                if (opt.warm_start && prev) warm = WarmStart{&prev->rho_right, &prev->ell_left};
                pt.result = dominant_eigenpair(spec, Tilt::guided(pt.s), opt.spectral, warm);
                prev = &*pt.result;
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "s=" << pt.s << ", secondary=" << pt.secondary << ": " << e.what();
                pt.error = os.str();
                prev = nullptr;
            }
        }
    });
    return table;
}

/// Guided emission rate of the steady state, sum_c gamma_c Tr[chi_c^dag chi_c rho_ss].
inline double steady_state_emission_rate(const GeneratorSpec& spec, const SpectralOptions& opt = {}) {
    return spec.guided_emission_rate(dominant_eigenpair(spec, Tilt{}, opt).rho_right);
}

}  // namespace chiral_fcs
