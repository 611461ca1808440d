#include "dimerchain/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace dimerchain {

namespace {

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Rotate each column so its largest-magnitude entry is real positive
// (first such entry wins on exact ties). Keeps degenerate eigenvectors
// reproducible across runs.
void fix_column_phases(ComplexMatrix& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            double a = std::abs(v(r, c));
            if (a > best) {
                best = a;
                pivot = r;
            }
        }
        if (best > 0.0) {
            v.col(c) *= std::conj(v(pivot, c)) / best;
        }
    }
}

} // namespace

HermitianOperator::HermitianOperator(ComplexMatrix matrix) : mat_(std::move(matrix)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
        throw ContractError("HermitianOperator: matrix must be square and non-empty");
    }
    if (!mat_.allFinite()) {
        throw ContractError("HermitianOperator: non-finite entries");
    }
    const double scale = max_abs(mat_);
    const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol::hermiticity * scale) {
        throw ContractError("HermitianOperator: matrix is not Hermitian (max deviation " +
                            std::to_string(dev) + ")");
    }
}

PureState::PureState(int n_sites, ComplexVector amplitudes)
    : n_sites_(n_sites), amps_(std::move(amplitudes)) {
    if (n_sites_ < 1 || n_sites_ > 20) {
        throw ContractError("PureState: n_sites must be in 1..20");
    }
    if (amps_.size() != (Eigen::Index{1} << n_sites_)) {
        throw ContractError("PureState: amplitude count must be 2^n_sites");
    }
    if (!amps_.allFinite()) {
        throw ContractError("PureState: non-finite amplitudes");
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > tol::unit_norm) {
        throw ContractError("PureState: norm deviates from 1 by " + std::to_string(norm - 1.0));
    }
}

PureState PureState::basis_state(int n_sites, std::uint64_t index) {
    if (n_sites < 1 || n_sites > 20) {
        throw ContractError("basis_state: n_sites must be in 1..20");
    }
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    if (index >= static_cast<std::uint64_t>(dim)) {
        throw std::invalid_argument("basis_state: index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(n_sites, std::move(v));
}

DensityMatrix::DensityMatrix(int n_sites, ComplexMatrix matrix)
    : n_sites_(n_sites), mat_(std::move(matrix)) {
    if (n_sites_ < 1 || n_sites_ > 20) {
        throw ContractError("DensityMatrix: n_sites must be in 1..20");
    }
    const Eigen::Index dim = Eigen::Index{1} << n_sites_;
    if (mat_.rows() != dim || mat_.cols() != dim) {
        throw ContractError("DensityMatrix: dimension must be 2^n_sites");
    }
    if (!mat_.allFinite()) {
        throw ContractError("DensityMatrix: non-finite entries");
    }
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > tol::density) {
        throw ContractError("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(mat_.trace().real() - 1.0) > tol::density || std::abs(mat_.trace().imag()) > tol::density) {
        throw ContractError("DensityMatrix: trace deviates from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("DensityMatrix: eigenvalue check failed to converge");
    }
    if (es.eigenvalues().minCoeff() < -tol::density) {
        throw ContractError("DensityMatrix: negative eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
    }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.allFinite() || !b.allFinite()) {
        throw ContractError("kron: operands must be finite");
    }
    if (a.rows() * b.rows() > kMaxKronAxis || a.cols() * b.cols() > kMaxKronAxis) {
        throw CapacityError("kron: result exceeds maximum axis length 2^20");
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Spectrum hermitian_eig(const HermitianOperator& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
    if (es.info() != Eigen::Success) {
        throw NumericError("hermitian_eig: QL iteration failed to converge for dimension " +
                           std::to_string(a.dim()));
    }
    Spectrum s{es.eigenvalues(), es.eigenvectors()};
    fix_column_phases(s.eigenvectors);
    return s;
}

PureState evolve_spectral(const Spectrum& s, const PureState& psi, double t) {
    if (s.dim() != psi.dim()) {
        throw ContractError("evolve_spectral: spectrum and state dimensions differ");
    }
    ComplexVector c = s.eigenvectors.adjoint() * psi.amplitudes();
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        c(k) *= std::exp(Complex(0.0, -s.eigenvalues(k) * t));
    }
    return PureState(psi.n_sites(), s.eigenvectors * c);
}

DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep_sites) {
    const int n = psi.n_sites();
    const int k = static_cast<int>(keep_sites.size());
    if (k == 0) {
        throw std::invalid_argument("partial_trace: keep_sites must be non-empty");
    }
    for (int i = 0; i < k; ++i) {
        if (keep_sites[i] < 1 || keep_sites[i] > n) {
            throw std::invalid_argument("partial_trace: site out of range");
        }
        if (i > 0 && keep_sites[i] <= keep_sites[i - 1]) {
            throw std::invalid_argument("partial_trace: keep_sites must be strictly ascending");
        }
    }

    const Eigen::Index dim = psi.dim();
    const Eigen::Index dim_keep = Eigen::Index{1} << k;
    const Eigen::Index dim_env = dim >> k;

    // Reshape |psi> into a (kept x environment) matrix; rho = M M'.
    ComplexMatrix m = ComplexMatrix::Zero(dim_keep, dim_env);
    std::vector<char> kept(n + 1, 0);
    for (int s : keep_sites) kept[s] = 1;
    for (Eigen::Index b = 0; b < dim; ++b) {
        std::uint64_t kidx = 0;
        std::uint64_t eidx = 0;
        for (int s = 1; s <= n; ++s) {
            const std::uint64_t bit = (static_cast<std::uint64_t>(b) >> (n - s)) & 1u;
            if (kept[s]) {
                kidx = (kidx << 1) | bit;
            } else {
                eidx = (eidx << 1) | bit;
            }
        }
        m(static_cast<Eigen::Index>(kidx), static_cast<Eigen::Index>(eidx)) = psi.amplitudes()(b);
    }
    ComplexMatrix rho = m * m.adjoint();
    return DensityMatrix(k, std::move(rho));
}

} // namespace dimerchain
