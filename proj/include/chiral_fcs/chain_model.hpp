// chain_model.hpp - Hamiltonians, jump channels and (tilted) Lindblad generators
// for a laser-driven atom chain coupled to the left/right modes of a waveguide.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "chiral_fcs/tensor_core.hpp"

namespace chiral_fcs {

using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

/// Physical parameters. Rates are in units of the total guided rate
/// gamma = gamma_left + gamma_right unless the caller chooses otherwise.
struct ChainParams {
    int n_sites = 1;
    double gamma_left = 0.5;
    double gamma_right = 0.5;
    double gamma_unguided = 0.0;
    double rabi = 0.0;
    std::vector<double> detunings;  ///< delta_j, one per site
    std::vector<double> positions;  ///< x_j, strictly increasing
    double wavenumber = 2.0 * std::numbers::pi;
    double waveguide_distance = 0.0;  ///< metadata only

    double gamma() const noexcept { return gamma_left + gamma_right; }
    double delta_gamma() const noexcept { return gamma_right - gamma_left; }

    void validate() const {
        HilbertSpace{n_sites};
        auto nonneg = [](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument(std::string("ChainParams.") + name +
                                            " must be finite and >= 0");
            }
        };
        nonneg(gamma_left, "gamma_left");
        nonneg(gamma_right, "gamma_right");
        nonneg(gamma_unguided, "gamma_unguided");
        nonneg(rabi, "rabi");
        if (static_cast<int>(detunings.size()) != n_sites) {
            throw std::invalid_argument("ChainParams.detunings must have n_sites entries");
        }
        if (static_cast<int>(positions.size()) != n_sites) {
            throw std::invalid_argument("ChainParams.positions must have n_sites entries");
        }
        for (std::size_t j = 1; j < positions.size(); ++j) {
            if (!(positions[j] > positions[j - 1])) {
                throw std::invalid_argument("ChainParams.positions must be strictly increasing");
            }
        }
        for (double d : detunings) {
            if (!std::isfinite(d)) throw std::invalid_argument("ChainParams.detunings must be finite");
        }
        if (!std::isfinite(wavenumber)) throw std::invalid_argument("ChainParams.wavenumber must be finite");
    }
};

inline std::vector<double> uniform_detuning(int n_sites, double delta) {
    return std::vector<double>(static_cast<std::size_t>(n_sites), delta);
}

/// Alternating pattern with site 1 at +delta, site 2 at -delta, ...
/// This is the sign that makes the analytic dimer state dark (see dimer_state).
inline std::vector<double> alternating_detuning(int n_sites, double delta) {
    std::vector<double> d(static_cast<std::size_t>(n_sites));
    for (int j = 1; j <= n_sites; ++j) d[static_cast<std::size_t>(j - 1)] = (j % 2 == 1) ? delta : -delta;
    return d;
}

/// x_j = j * spacing_in_wavelengths * 2pi/k, so k x_j is a multiple of 2pi.
inline std::vector<double> commensurate_positions(int n_sites, double wavenumber,
                                                  int spacing_in_wavelengths = 1) {
    const double lambda = 2.0 * std::numbers::pi / wavenumber;
    std::vector<double> x(static_cast<std::size_t>(n_sites));
    for (int j = 1; j <= n_sites; ++j) x[static_cast<std::size_t>(j - 1)] = j * spacing_in_wavelengths * lambda;
    return x;
}

/// Chain with commensurate positions, gamma = 1 and the given chirality.
inline ChainParams make_chain(int n_sites, double rabi, double delta_gamma,
                              std::vector<double> detunings, double gamma_unguided = 0.0) {
    ChainParams p;
    p.n_sites = n_sites;
    p.gamma_left = 0.5 * (1.0 - delta_gamma);
    p.gamma_right = 0.5 * (1.0 + delta_gamma);
    p.gamma_unguided = gamma_unguided;
    p.rabi = rabi;
    p.detunings = std::move(detunings);
    p.positions = commensurate_positions(n_sites, p.wavenumber);
    p.validate();
    return p;
}

enum class GeneratorForm { general, commensurate };

enum class ChannelKind { guided_left, guided_right, unguided };

struct JumpChannel {
    std::string label;  ///< "L", "R", "U1".."UN"
    ChannelKind kind;
    double rate;
    OperatorMatrix op;
    SparseOperator sparse;

    bool guided() const noexcept { return kind != ChannelKind::unguided; }
};

/// Counting fields. s_unguided = 0 leaves unguided photons unmonitored.
struct Tilt {
    double left = 0.0;
    double right = 0.0;
    double unguided = 0.0;

    static Tilt guided(double s) { return Tilt{s, s, 0.0}; }

    double for_kind(ChannelKind k) const noexcept {
        switch (k) {
            case ChannelKind::guided_left: return left;
            case ChannelKind::guided_right: return right;
            case ChannelKind::unguided: return unguided;
        }
        return 0.0;
    }
    Tilt shifted_guided(double h) const { return Tilt{left + h, right + h, unguided}; }
};

inline OperatorMatrix build_laser_hamiltonian(const ChainParams& params) {
    params.validate();
    const HilbertSpace space(params.n_sites);
    OperatorMatrix h = OperatorMatrix::Zero(space.dim(), space.dim());
    for (int j = 1; j <= params.n_sites; ++j) {
        const OperatorMatrix sm = lowering_operator(space, j);
        h -= params.detunings[static_cast<std::size_t>(j - 1)] * (sm.adjoint() * sm);
        h += params.rabi * (sm + sm.adjoint());
    }
    return h;
}

/// H_L + H_R for arbitrary positions, in the Hermitian form
///   H_L = -i gL/2 sum_{j<l} (e^{-ik|x_j-x_l|} s+_j s-_l - h.c.)
///   H_R = -i gR/2 sum_{j>l} (e^{-ik|x_j-x_l|} s+_j s-_l - h.c.)
inline OperatorMatrix build_guided_hamiltonian_general(const ChainParams& params) {
    params.validate();
    const HilbertSpace space(params.n_sites);
    const int n = params.n_sites;
    std::vector<OperatorMatrix> sm;
    for (int j = 1; j <= n; ++j) sm.push_back(lowering_operator(space, j));
    OperatorMatrix h = OperatorMatrix::Zero(space.dim(), space.dim());
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            if (j == l) continue;
            const double rate = (j < l) ? params.gamma_left : params.gamma_right;
            if (rate == 0.0) continue;
            const double dx = std::abs(params.positions[static_cast<std::size_t>(j)] -
                                       params.positions[static_cast<std::size_t>(l)]);
            const cplx phase = std::exp(-kI * params.wavenumber * dx);
            const OperatorMatrix hop = phase * (sm[static_cast<std::size_t>(j)].adjoint() *
                                                sm[static_cast<std::size_t>(l)]);
            h += -kI * (rate / 2.0) * (hop - OperatorMatrix(hop.adjoint()));
        }
    }
    return h;
}

/// -(i/2) dgamma sum_{j>l} (s+_j s-_l - s+_l s-_j), valid for commensurate spacing.
inline OperatorMatrix build_guided_hamiltonian_commensurate(const ChainParams& params) {
    params.validate();
    const HilbertSpace space(params.n_sites);
    const int n = params.n_sites;
    std::vector<OperatorMatrix> sm;
    for (int j = 1; j <= n; ++j) sm.push_back(lowering_operator(space, j));
    OperatorMatrix h = OperatorMatrix::Zero(space.dim(), space.dim());
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < j; ++l) {
            const auto& a = sm[static_cast<std::size_t>(j)];
            const auto& b = sm[static_cast<std::size_t>(l)];
            h += -0.5 * kI * params.delta_gamma() * (a.adjoint() * b - b.adjoint() * a);
        }
    }
    return h;
}

inline std::vector<JumpChannel> build_jump_operators(const ChainParams& params, GeneratorForm form) {
    params.validate();
    const HilbertSpace space(params.n_sites);
    OperatorMatrix jl = OperatorMatrix::Zero(space.dim(), space.dim());
    OperatorMatrix jr = jl;
    std::vector<JumpChannel> channels;
    for (int j = 1; j <= params.n_sites; ++j) {
        const OperatorMatrix sm = lowering_operator(space, j);
        if (form == GeneratorForm::commensurate) {
            jl += sm;
            jr += sm;
        } else {
            const double kx = params.wavenumber * params.positions[static_cast<std::size_t>(j - 1)];
            jl += std::exp(kI * kx) * sm;
            jr += std::exp(-kI * kx) * sm;
        }
    }
    auto push = [&](std::string label, ChannelKind kind, double rate, OperatorMatrix op) {
        SparseOperator sp = op.sparseView();
        channels.push_back(JumpChannel{std::move(label), kind, rate, std::move(op), std::move(sp)});
    };
    if (params.gamma_left > 0.0) push("L", ChannelKind::guided_left, params.gamma_left, jl);
    if (params.gamma_right > 0.0) push("R", ChannelKind::guided_right, params.gamma_right, jr);
    if (params.gamma_unguided > 0.0) {
        for (int j = 1; j <= params.n_sites; ++j) {
            push("U" + std::to_string(j), ChannelKind::unguided, params.gamma_unguided,
                 lowering_operator(space, j));
        }
    }
    return channels;
}

/// Immutable generator: Hamiltonian, channels and the cached non-Hermitian
/// effective Hamiltonian H - (i/2) sum_c rate_c chi_c^dag chi_c.
class GeneratorSpec {
  public:
    GeneratorSpec(ChainParams params, GeneratorForm form)
        : params_(std::move(params)), form_(form), space_(params_.n_sites) {
        params_.validate();
        hamiltonian_ = build_laser_hamiltonian(params_);
        hamiltonian_ += (form_ == GeneratorForm::general)
                            ? build_guided_hamiltonian_general(params_)
                            : build_guided_hamiltonian_commensurate(params_);
        channels_ = build_jump_operators(params_, form_);
        OperatorMatrix heff = hamiltonian_;
        for (const auto& c : channels_) heff -= 0.5 * kI * c.rate * (c.op.adjoint() * c.op);
        heff_ = heff;
        heff_adj_ = heff.adjoint();
        for (const auto& c : channels_) channel_adj_.push_back(SparseOperator(c.sparse.adjoint()));
    }

    const ChainParams& params() const noexcept { return params_; }
    GeneratorForm form() const noexcept { return form_; }
    const HilbertSpace& space() const noexcept { return space_; }
    Eigen::Index dim() const noexcept { return space_.dim(); }
    const OperatorMatrix& hamiltonian() const noexcept { return hamiltonian_; }
    const OperatorMatrix& effective_hamiltonian() const noexcept { return heff_; }
    const std::vector<JumpChannel>& channels() const noexcept { return channels_; }

    /// W_s(rho) = -i(Heff rho - rho Heff^dag) + sum_c rate_c e^{-s_c} chi_c rho chi_c^dag
    Matrix apply_tilted(const Matrix& rho, const Tilt& tilt) const {
        check_operator(space_, rho, "apply_tilted_generator");
        Matrix out = -kI * (heff_ * rho);
        out.noalias() += kI * (rho * heff_adj_);
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            const auto& ch = channels_[c];
            const double w = ch.rate * std::exp(-tilt.for_kind(ch.kind));
            if (w == 0.0) continue;
            Matrix tmp = ch.sparse * rho;
            out.noalias() += w * (tmp * channel_adj_[c]);
        }
        return out;
    }

    /// Hilbert-Schmidt adjoint of apply_tilted: Tr[A^dag W_s(B)] = Tr[W_s^dag(A)^dag B].
    Matrix apply_tilted_adjoint(const Matrix& x, const Tilt& tilt) const {
        check_operator(space_, x, "apply_tilted_adjoint");
        Matrix out = kI * (heff_adj_ * x);
        out.noalias() -= kI * (x * heff_);
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            const auto& ch = channels_[c];
            const double w = ch.rate * std::exp(-tilt.for_kind(ch.kind));
            if (w == 0.0) continue;
            Matrix tmp = channel_adj_[c] * x;
            out.noalias() += w * (tmp * ch.sparse);
        }
        return out;
    }

    /// Total guided emission rate sum_guided rate_c Tr[chi^dag chi rho].
    double guided_emission_rate(const Matrix& rho) const {
        double k = 0.0;
        for (const auto& c : channels_) {
            if (c.guided()) k += c.rate * (c.op.adjoint() * c.op * rho).trace().real();
        }
        return k;
    }

    double unguided_emission_rate(const Matrix& rho) const {
        double k = 0.0;
        for (const auto& c : channels_) {
            if (!c.guided()) k += c.rate * (c.op.adjoint() * c.op * rho).trace().real();
        }
        return k;
    }

  private:
    ChainParams params_;
    GeneratorForm form_;
    HilbertSpace space_;
    OperatorMatrix hamiltonian_;
    std::vector<JumpChannel> channels_;
    OperatorMatrix heff_;
    OperatorMatrix heff_adj_;
    std::vector<SparseOperator> channel_adj_;
};

inline DensityMatrix apply_generator(const GeneratorSpec& spec, const DensityMatrix& rho) {
    return spec.apply_tilted(rho, Tilt{});
}

inline DensityMatrix apply_tilted_generator(const GeneratorSpec& spec, const DensityMatrix& rho,
                                            double s_left, double s_right, double s_unguided = 0.0) {
    return spec.apply_tilted(rho, Tilt{s_left, s_right, s_unguided});
}

/// Materialized tilted superoperator acting on column-stacked vectors, built
/// from Kronecker products (vec(A X B) = (B^T (x) A) vec X). Small N only.
inline Matrix tilted_superoperator(const GeneratorSpec& spec, const Tilt& tilt) {
    if (spec.space().n_sites() > 5) {
        throw std::invalid_argument("tilted_superoperator: dense superoperator limited to N <= 5");
    }
    const Eigen::Index d = spec.dim();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix& heff = spec.effective_hamiltonian();
    Matrix l = -kI * kron(id, heff) + kI * kron(heff.conjugate(), id);
    for (const auto& c : spec.channels()) {
        l += c.rate * std::exp(-tilt.for_kind(c.kind)) * kron(c.op.conjugate(), c.op);
    }
    return l;
}

}  // namespace chiral_fcs
