#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimerchain/numerics.hpp"

namespace dimerchain {

enum class Model { XX, XXZ };

std::string to_string(Model m);

// Parameters of one simulated chain: the single source of truth shared by
// every physics module.
//
//   H = (J/2) sum_{j=1}^{N-1} (1 + (-1)^{j+1} delta)
//         [ sx_j sx_{j+1} + sy_j sy_{j+1} + Delta sz_j sz_{j+1} ]
//
// with Delta = 0 for the XX model. Open boundaries; odd bonds are strong,
// J(1+delta), even bonds weak, J(1-delta). Energies are in units of J and
// times in units of 1/J (hbar = 1).
struct ChainSpec {
    Model model = Model::XX;
    int n_sites = 2;
    double j_coupling = 1.0;
    double delta = 0.0;
    double anisotropy = 0.0; // used only when model == XXZ

    ChainSpec() = default;
    ChainSpec(Model model, int n_sites, double j_coupling, double delta, double anisotropy = 0.0);

    void validate() const;
    // Protocol use additionally needs sites 1, 2, N-1, N distinct.
    void validate_for_protocol() const;
};

// Optical-lattice parameters feeding the effective spin couplings.
struct LatticeParams {
    double j_up = 0.0;
    double j_down = 0.0;
    double u_up = 1.0;
    double u_down = 1.0;
    double u_updown = 1.0;

    LatticeParams() = default;
    LatticeParams(double j_up, double j_down, double u_up, double u_down, double u_updown);

    // Tunneling must be well below every interaction scale for the spin
    // description to apply; checked as max(J)/min(U) < 0.1.
    bool perturbative() const;
};

struct EffectiveCouplings {
    double j_z = 0.0;
    double j_perp = 0.0;
};

// Dimerization factor (1 + (-1)^{j+1} delta) of bond j, j in 1..N-1.
double coupling_at(int bond, const ChainSpec& spec);

// Open chain with per-bond energy couplings c_j (j = 1..n-1):
//   H = sum_j (c_j / 2) [ sx sx + sy sy + anisotropy * sz sz ].
// Bonds with c_j = 0 are absent. Shared by the chain builders and the
// baseline's extended system.
HermitianOperator build_open_chain(int n_sites, const std::vector<double>& couplings,
                                   double anisotropy);

HermitianOperator build_xx(const ChainSpec& spec);
HermitianOperator build_xxz(const ChainSpec& spec);

// Dispatch on spec.model.
HermitianOperator build_hamiltonian(const ChainSpec& spec);

// Diagonal operator sum_j sigma^z_j.
HermitianOperator total_sz_operator(int n_sites);

// Ascending basis indices of the magnetization sector with total sigma^z
// eigenvalue sz; sz must have the parity of n_sites and |sz| <= n_sites.
std::vector<std::uint64_t> sector_indices(int n_sites, int sz);

// Effective spin couplings from the lattice parameters:
//   j_z    = (Ju^2 + Jd^2) / (2 U_ud) - Ju^2 / Uu - Jd^2 / Ud
//   j_perp = (Ju + Jd) / U_ud
EffectiveCouplings effective_couplings(const LatticeParams& p);

} // namespace dimerchain
