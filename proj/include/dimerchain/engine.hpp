#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "dimerchain/hamiltonian.hpp"
#include "dimerchain/numerics.hpp"

namespace dimerchain {

// One magnetization block of a U(1)-symmetric operator.
struct SectorSpectrum {
    int sz = 0;
    std::vector<std::uint64_t> basis; // ascending full-basis indices
    RealVector eigenvalues;           // ascending
    ComplexMatrix eigenvectors;       // columns, in the sector basis
};

// Per-sector eigendecomposition; sectors ordered by ascending sz and their
// basis lists partition the full 2^n basis.
struct BlockedSpectrum {
    int n_sites = 0;
    std::vector<SectorSpectrum> sectors;
};

using BlockedSpectrumPtr = std::shared_ptr<const BlockedSpectrum>;

// Verifies ||[H, S_z]||_max <= 1e-10 and diagonalizes each magnetization
// sector independently.
BlockedSpectrum blocked_eig(const HermitianOperator& h, int n_sites);

// Builds the chain Hamiltonian and its blocked spectrum in one step.
BlockedSpectrumPtr make_blocked_spectrum(const ChainSpec& spec);

enum class DegeneracyPolicy {
    Reject,           // near-degenerate ground level is an error
    PickDeterministic // pick the largest-sz sector, lowest state within it
};

struct GroundStateResult {
    double energy = 0.0;
    PureState state;
    int sector_sz = 0;
    double gap = 0.0; // distance to the next global level
};

GroundStateResult ground_state(const BlockedSpectrum& blocks,
                               DegeneracyPolicy policy = DegeneracyPolicy::Reject);
GroundStateResult ground_state(const ChainSpec& spec,
                               DegeneracyPolicy policy = DegeneracyPolicy::Reject);

// Spectral time evolution through the sector blocks. Builds the spectrum on
// every call; use EvolutionPlan when evaluating many times.
PureState evolve(const ChainSpec& spec, const PureState& psi0, double t);

// Precomputed sector decomposition of one initial state; |psi(t)> costs one
// dense matrix-vector product per sector.
class EvolutionPlan {
public:
    EvolutionPlan(BlockedSpectrumPtr blocks, const PureState& psi0);

    PureState at(double t) const;
    const BlockedSpectrum& blocks() const { return *blocks_; }

private:
    BlockedSpectrumPtr blocks_;
    std::vector<ComplexVector> coeffs_; // eigenbasis coefficients per sector
};

// Thread-safe memoization of blocked spectra keyed by chain parameters.
// Inserts are idempotent: racing builders compute identical values.
class SpectrumCache {
public:
    BlockedSpectrumPtr get(const ChainSpec& spec);

private:
    using Key = std::tuple<int, int, double, double, double>;
    static Key key_of(const ChainSpec& spec);

    std::mutex mutex_;
    std::map<Key, BlockedSpectrumPtr> cache_;
};

} // namespace dimerchain
