#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "dimerchain/errors.hpp"

namespace dimerchain {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Shared numerical tolerances.
namespace tol {
inline constexpr double hermiticity = 1e-12;    // relative to max|A|
inline constexpr double unit_norm = 1e-10;      // | ||psi|| - 1 |
inline constexpr double density = 1e-10;        // Hermiticity/trace/PSD of rho
inline constexpr double unitarity = 1e-10;      // || G'G - I ||_max
inline constexpr double reconstruction = 1e-9;  // relative, V diag(l) V' vs A
} // namespace tol

// Largest dimension kron() will produce along either axis.
inline constexpr Eigen::Index kMaxKronAxis = 1 << 20;

// Largest chain the dense 2^N-dimensional representation supports.
inline constexpr int kMaxDenseSites = 14;

// ---------------------------------------------------------------------------
// Basis convention
//
// Site j (1-based, j = 1..N) occupies bit position N - j, i.e. site 1 is the
// most significant bit of the basis index. Bit value 0 is the sigma^z = +1
// state. A basis index b therefore reads off |b_1 b_2 ... b_N> directly.
// ---------------------------------------------------------------------------

inline int site_bit(std::uint64_t index, int site, int n_sites) {
    return static_cast<int>((index >> (n_sites - site)) & 1u);
}

inline std::uint64_t site_mask(int site, int n_sites) {
    return std::uint64_t{1} << (n_sites - site);
}

// sigma^z eigenvalue sum of a basis state: +1 per 0-bit, -1 per 1-bit.
inline int sz_of_index(std::uint64_t index, int n_sites) {
    return n_sites - 2 * static_cast<int>(__builtin_popcountll(index));
}

// Dense complex matrix validated to be square, finite and Hermitian within
// tol::hermiticity relative to its largest entry.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix matrix);

    Eigen::Index dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    ComplexMatrix mat_;
};

// Eigendecomposition with ascending eigenvalues and phase-fixed orthonormal
// eigenvector columns (largest-magnitude component real positive).
struct Spectrum {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

// Normalized state vector over the 2^n_sites computational basis.
class PureState {
public:
    PureState(int n_sites, ComplexVector amplitudes);

    static PureState basis_state(int n_sites, std::uint64_t index);

    int n_sites() const { return n_sites_; }
    Eigen::Index dim() const { return amps_.size(); }
    const ComplexVector& amplitudes() const { return amps_; }

private:
    int n_sites_;
    ComplexVector amps_;
};

// Hermitian, unit-trace, positive-semidefinite (within tol::density) matrix
// over 2^n_sites dimensions.
class DensityMatrix {
public:
    DensityMatrix(int n_sites, ComplexMatrix matrix);

    int n_sites() const { return n_sites_; }
    Eigen::Index dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    int n_sites_;
    ComplexMatrix mat_;
};

// Kronecker product: (A kron B)[i p + k, j q + l] = A[i,j] B[k,l].
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Dense Hermitian eigendecomposition satisfying the Spectrum conventions.
Spectrum hermitian_eig(const HermitianOperator& a);

// |psi(t)> = V exp(-i diag(lambda) t) V' |psi>, with t in units of 1/J.
PureState evolve_spectral(const Spectrum& s, const PureState& psi, double t);

// Reduced density matrix over keep_sites (1-based, distinct, ascending).
// The first listed site becomes the most significant bit of the result.
DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep_sites);

} // namespace dimerchain
