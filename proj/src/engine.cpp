#include "dimerchain/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dimerchain {

namespace {

constexpr double kCommutatorTol = 1e-10;
constexpr double kDegeneracyTol = 1e-10; // relative to |E0|

} // namespace

BlockedSpectrum blocked_eig(const HermitianOperator& h, int n_sites) {
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    if (h.dim() != dim) {
        throw ContractError("blocked_eig: operator dimension must be 2^n_sites");
    }

    std::vector<int> sz(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        sz[b] = sz_of_index(static_cast<std::uint64_t>(b), n_sites);
    }

    // [H, S_z](i,j) = H(i,j) (sz_j - sz_i) since S_z is diagonal.
    const ComplexMatrix& m = h.matrix();
    double comm = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double v = std::abs(m(i, j)) * std::abs(static_cast<double>(sz[j] - sz[i]));
            if (v > comm) comm = v;
        }
    }
    if (comm > kCommutatorTol) {
        throw SymmetryError("blocked_eig: operator does not conserve S_z, ||[H,Sz]||_max = " +
                            std::to_string(comm));
    }

    BlockedSpectrum out;
    out.n_sites = n_sites;
    for (int s = -n_sites; s <= n_sites; s += 2) {
        SectorSpectrum sector;
        sector.sz = s;
        sector.basis = sector_indices(n_sites, s);
        const Eigen::Index d = static_cast<Eigen::Index>(sector.basis.size());
        ComplexMatrix block(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index b = 0; b < d; ++b) {
                block(a, b) = m(static_cast<Eigen::Index>(sector.basis[a]),
                                static_cast<Eigen::Index>(sector.basis[b]));
            }
        }
        Spectrum spec = hermitian_eig(HermitianOperator(std::move(block)));
        sector.eigenvalues = std::move(spec.eigenvalues);
        sector.eigenvectors = std::move(spec.eigenvectors);
        out.sectors.push_back(std::move(sector));
    }
    return out;
}

BlockedSpectrumPtr make_blocked_spectrum(const ChainSpec& spec) {
    return std::make_shared<BlockedSpectrum>(blocked_eig(build_hamiltonian(spec), spec.n_sites));
}

GroundStateResult ground_state(const BlockedSpectrum& blocks, DegeneracyPolicy policy) {
    // Two smallest levels of the full spectrum; each sector is ascending so
    // only its first two entries can contribute.
    double e0 = std::numeric_limits<double>::infinity();
    double e1 = std::numeric_limits<double>::infinity();
    for (const auto& sec : blocks.sectors) {
        for (Eigen::Index k = 0; k < sec.eigenvalues.size() && k < 2; ++k) {
            const double v = sec.eigenvalues(k);
            if (v < e0) {
                e1 = e0;
                e0 = v;
            } else if (v < e1) {
                e1 = v;
            }
        }
    }

    const double gap = e1 - e0;
    const double threshold = kDegeneracyTol * std::abs(e0);
    if (gap <= threshold && policy == DegeneracyPolicy::Reject) {
        throw DegenerateGroundStateError(
            "ground_state: two lowest levels separated by " + std::to_string(gap) +
            " (threshold " + std::to_string(threshold) +
            "); pass DegeneracyPolicy::PickDeterministic to select one");
    }

    // Deterministic selection: among sectors whose minimum ties the global
    // one, the largest sz wins; within the sector, the lowest state.
    const SectorSpectrum* chosen = nullptr;
    for (const auto& sec : blocks.sectors) { // ascending sz: later = larger
        if (sec.eigenvalues.size() > 0 && sec.eigenvalues(0) <= e0 + threshold) {
            chosen = &sec;
        }
    }
    if (chosen == nullptr) {
        throw NumericError("ground_state: empty spectrum");
    }

    const Eigen::Index dim = Eigen::Index{1} << blocks.n_sites;
    ComplexVector full = ComplexVector::Zero(dim);
    for (std::size_t a = 0; a < chosen->basis.size(); ++a) {
        full(static_cast<Eigen::Index>(chosen->basis[a])) =
            chosen->eigenvectors(static_cast<Eigen::Index>(a), 0);
    }
    return GroundStateResult{chosen->eigenvalues(0), PureState(blocks.n_sites, std::move(full)),
                             chosen->sz, gap};
}

GroundStateResult ground_state(const ChainSpec& spec, DegeneracyPolicy policy) {
    return ground_state(*make_blocked_spectrum(spec), policy);
}

PureState evolve(const ChainSpec& spec, const PureState& psi0, double t) {
    if (psi0.n_sites() != spec.n_sites) {
        throw ContractError("evolve: state dimension does not match the chain");
    }
    EvolutionPlan plan(make_blocked_spectrum(spec), psi0);
    return plan.at(t);
}

EvolutionPlan::EvolutionPlan(BlockedSpectrumPtr blocks, const PureState& psi0)
    : blocks_(std::move(blocks)) {
    if (psi0.n_sites() != blocks_->n_sites) {
        throw ContractError("EvolutionPlan: state dimension does not match the spectrum");
    }
    coeffs_.reserve(blocks_->sectors.size());
    for (const auto& sec : blocks_->sectors) {
        const Eigen::Index d = static_cast<Eigen::Index>(sec.basis.size());
        ComplexVector component(d);
        for (Eigen::Index a = 0; a < d; ++a) {
            component(a) = psi0.amplitudes()(static_cast<Eigen::Index>(sec.basis[a]));
        }
        coeffs_.push_back(sec.eigenvectors.adjoint() * component);
    }
}

PureState EvolutionPlan::at(double t) const {
    const Eigen::Index dim = Eigen::Index{1} << blocks_->n_sites;
    ComplexVector full = ComplexVector::Zero(dim);
    for (std::size_t s = 0; s < blocks_->sectors.size(); ++s) {
        const auto& sec = blocks_->sectors[s];
        const Eigen::Index d = static_cast<Eigen::Index>(sec.basis.size());
        if (d == 0 || coeffs_[s].size() == 0) continue;
        ComplexVector phased(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            phased(k) = coeffs_[s](k) * std::exp(Complex(0.0, -sec.eigenvalues(k) * t));
        }
        ComplexVector component = sec.eigenvectors * phased;
        for (Eigen::Index a = 0; a < d; ++a) {
            full(static_cast<Eigen::Index>(sec.basis[a])) = component(a);
        }
    }
    return PureState(blocks_->n_sites, std::move(full));
}

SpectrumCache::Key SpectrumCache::key_of(const ChainSpec& spec) {
    const double anis = spec.model == Model::XXZ ? spec.anisotropy : 0.0;
    return {static_cast<int>(spec.model), spec.n_sites, spec.j_coupling, spec.delta, anis};
}

BlockedSpectrumPtr SpectrumCache::get(const ChainSpec& spec) {
    const Key key = key_of(spec);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    BlockedSpectrumPtr built = make_blocked_spectrum(spec);
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(built));
    return it->second;
}

} // namespace dimerchain
