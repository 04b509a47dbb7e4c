// tensor_core.hpp - operator algebra on an N-site spin-1/2 chain
//
// Basis convention used everywhere in the library: |g> is local index 0,
// |e> is local index 1, and site 1 is the most significant tensor factor.
// A computational basis index therefore stores the state of site j in bit
// (N - j), counting from the least significant bit.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace chiral_fcs {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator on the 2^N dimensional chain Hilbert space.
using OperatorMatrix = Matrix;
/// Hermitian, trace-class operator. Normalization is checked only where needed.
using DensityMatrix = Matrix;

inline constexpr cplx kI{0.0, 1.0};

class HilbertSpace {
  public:
    static constexpr int kMaxSites = 10;

    explicit HilbertSpace(int n_sites) : n_sites_(n_sites) {
        if (n_sites < 1 || n_sites > kMaxSites) {
            throw std::invalid_argument("HilbertSpace: n_sites must be in [1, " +
                                        std::to_string(kMaxSites) + "], got " +
                                        std::to_string(n_sites));
        }
    }

    int n_sites() const noexcept { return n_sites_; }
    Eigen::Index dim() const noexcept { return Eigen::Index{1} << n_sites_; }

    /// Bit position (from the LSB) that stores site j (1-based).
    int bit_of(int site) const {
        check_site(site);
        return n_sites_ - site;
    }

    void check_site(int site) const {
        if (site < 1 || site > n_sites_) {
            throw std::out_of_range("site index " + std::to_string(site) +
                                    " outside [1, " + std::to_string(n_sites_) + "]");
        }
    }

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

  private:
    int n_sites_;
};

inline void check_operator(const HilbertSpace& space, const Matrix& op, const char* what) {
    if (op.rows() != space.dim() || op.cols() != space.dim()) {
        throw std::invalid_argument(std::string(what) + ": expected " +
                                    std::to_string(space.dim()) + "x" +
                                    std::to_string(space.dim()) + " matrix, got " +
                                    std::to_string(op.rows()) + "x" +
                                    std::to_string(op.cols()));
    }
}

/// Recover the space from a square matrix whose side is a power of two.
inline HilbertSpace space_of(const Matrix& op) {
    if (op.rows() != op.cols() || op.rows() < 2) {
        throw std::invalid_argument("space_of: matrix must be square with side >= 2");
    }
    int n = 0;
    Eigen::Index d = op.rows();
    while (d > 1) {
        if (d % 2 != 0) throw std::invalid_argument("space_of: side is not a power of two");
        d /= 2;
        ++n;
    }
    return HilbertSpace(n);
}

/// Local 2x2 operators in the (|g>, |e>) basis.
namespace local {
inline Matrix lowering() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;  // <g| sigma^- |e>
    return m;
}
inline Matrix raising() { return lowering().adjoint(); }
inline Matrix excited_projector() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}
inline Matrix pauli_y() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = -kI;
    m(1, 0) = kI;
    return m;
}
}  // namespace local

/// identity (x) ... (x) op (x) ... (x) identity with op acting on `site`.
inline OperatorMatrix embed(const HilbertSpace& space, const Matrix& op, int site) {
    if (op.rows() != 2 || op.cols() != 2) {
        throw std::invalid_argument("embed: single-site operator must be 2x2");
    }
    const int bit = space.bit_of(site);
    const Eigen::Index dim = space.dim();
    const Eigen::Index mask = Eigen::Index{1} << bit;
    OperatorMatrix out = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        const int bc = static_cast<int>((c & mask) >> bit);
        const Eigen::Index rest = c & ~mask;
        for (int br = 0; br < 2; ++br) {
            const cplx v = op(br, bc);
            if (v != cplx{}) out(rest | (Eigen::Index{br} << bit), c) += v;
        }
    }
    return out;
}

inline OperatorMatrix lowering_operator(const HilbertSpace& space, int site) {
    return embed(space, local::lowering(), site);
}

inline OperatorMatrix raising_operator(const HilbertSpace& space, int site) {
    return embed(space, local::raising(), site);
}

inline OperatorMatrix number_operator(const HilbertSpace& space, int site) {
    return embed(space, local::excited_projector(), site);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Largest |m - m^dagger| element.
inline double hermitian_deviation(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// Two-site reduced state on sites (a, b), basis |gg>,|ge>,|eg>,|ee> with a first.
inline DensityMatrix partial_trace(const DensityMatrix& rho, int site_a, int site_b) {
    const HilbertSpace space = space_of(rho);
    if (site_a == site_b) {
        throw std::invalid_argument("partial_trace: the kept sites must differ");
    }
    const int bit_a = space.bit_of(site_a);
    const int bit_b = space.bit_of(site_b);
    const Eigen::Index mask = (Eigen::Index{1} << bit_a) | (Eigen::Index{1} << bit_b);
    const Eigen::Index dim = space.dim();
    auto local_index = [&](Eigen::Index i) {
        return 2 * ((i >> bit_a) & 1) + ((i >> bit_b) & 1);
    };
    DensityMatrix out = DensityMatrix::Zero(4, 4);
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Eigen::Index rest = c & ~mask;
        const Eigen::Index lc = local_index(c);
        for (Eigen::Index lr = 0; lr < 4; ++lr) {
            const Eigen::Index r = rest | (((lr >> 1) & 1) << bit_a) | ((lr & 1) << bit_b);
            out(lr, lc) += rho(r, c);
        }
    }
    return out;
}

/// Column-stacking vectorization.
inline Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix devectorize(const Vector& v, Eigen::Index dim) {
    if (dim <= 0 || v.size() != dim * dim) {
        throw std::invalid_argument("devectorize: vector length " + std::to_string(v.size()) +
                                    " is not " + std::to_string(dim) + "^2");
    }
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

inline Matrix devectorize(const Vector& v) {
    Eigen::Index dim = 1;
    while (dim * dim < v.size()) ++dim;
    return devectorize(v, dim);
}

/// Pure state |psi><psi| from a (not necessarily normalized) state vector.
inline DensityMatrix projector(const Vector& psi) {
    const Vector n = psi / psi.norm();
    return n * n.adjoint();
}

/// Computational basis state with every site in |g>.
inline Vector all_ground_state(const HilbertSpace& space) {
    Vector v = Vector::Zero(space.dim());
    v(0) = 1.0;
    return v;
}

inline DensityMatrix maximally_mixed(const HilbertSpace& space) {
    return DensityMatrix::Identity(space.dim(), space.dim()) / static_cast<double>(space.dim());
}

}  // namespace chiral_fcs
