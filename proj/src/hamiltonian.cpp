#include "dimerchain/hamiltonian.hpp"

#include <cmath>

namespace dimerchain {

std::string to_string(Model m) {
    return m == Model::XX ? "XX" : "XXZ";
}

ChainSpec::ChainSpec(Model model_, int n_sites_, double j_coupling_, double delta_,
                     double anisotropy_)
    : model(model_), n_sites(n_sites_), j_coupling(j_coupling_), delta(delta_),
      anisotropy(anisotropy_) {
    validate();
}

void ChainSpec::validate() const {
    if (n_sites < 2) {
        throw std::invalid_argument("ChainSpec: n_sites must be >= 2");
    }
    if (!(j_coupling > 0.0) || !std::isfinite(j_coupling)) {
        throw std::invalid_argument("ChainSpec: j_coupling must be positive and finite");
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw std::invalid_argument("ChainSpec: delta must satisfy 0 <= delta < 1");
    }
    if (!std::isfinite(anisotropy)) {
        throw std::invalid_argument("ChainSpec: anisotropy must be finite");
    }
}

void ChainSpec::validate_for_protocol() const {
    validate();
    if (n_sites % 2 != 0) {
        throw std::invalid_argument("ChainSpec: protocol requires an even number of sites");
    }
}

LatticeParams::LatticeParams(double j_up_, double j_down_, double u_up_, double u_down_,
                             double u_updown_)
    : j_up(j_up_), j_down(j_down_), u_up(u_up_), u_down(u_down_), u_updown(u_updown_) {
    if (!(u_up > 0.0) || !(u_down > 0.0) || !(u_updown > 0.0)) {
        throw std::invalid_argument("LatticeParams: interaction strengths must be positive");
    }
    if (j_up < 0.0 || j_down < 0.0) {
        throw std::invalid_argument("LatticeParams: tunnelings must be non-negative");
    }
}

bool LatticeParams::perturbative() const {
    const double max_j = std::max(j_up, j_down);
    const double min_u = std::min({u_up, u_down, u_updown});
    return max_j / min_u < 0.1;
}

double coupling_at(int bond, const ChainSpec& spec) {
    spec.validate();
    if (bond < 1 || bond > spec.n_sites - 1) {
        throw std::invalid_argument("coupling_at: bond index out of range 1..N-1");
    }
    return bond % 2 == 1 ? 1.0 + spec.delta : 1.0 - spec.delta;
}

HermitianOperator build_open_chain(int n_sites, const std::vector<double>& couplings,
                                   double anisotropy) {
    if (n_sites < 2) {
        throw std::invalid_argument("build_open_chain: need at least 2 sites");
    }
    if (n_sites > kMaxDenseSites) {
        throw CapacityError("build_open_chain: dense representation capped at " +
                            std::to_string(kMaxDenseSites) + " sites");
    }
    if (static_cast<int>(couplings.size()) != n_sites - 1) {
        throw std::invalid_argument("build_open_chain: need exactly n_sites-1 couplings");
    }

    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        double diag = 0.0;
        for (int j = 1; j < n_sites; ++j) {
            const double c = couplings[j - 1];
            if (c == 0.0) continue;
            const int bj = site_bit(static_cast<std::uint64_t>(b), j, n_sites);
            const int bj1 = site_bit(static_cast<std::uint64_t>(b), j + 1, n_sites);
            if (bj == bj1) {
                diag += 0.5 * c * anisotropy;
            } else {
                diag -= 0.5 * c * anisotropy;
                // sx sx + sy sy flips |01> <-> |10> with amplitude 2
                const std::uint64_t mask = site_mask(j, n_sites) | site_mask(j + 1, n_sites);
                h(static_cast<Eigen::Index>(b ^ static_cast<Eigen::Index>(mask)), b) += c;
            }
        }
        h(b, b) += diag;
    }
    return HermitianOperator(std::move(h));
}

namespace {

std::vector<double> bond_couplings(const ChainSpec& spec) {
    std::vector<double> cs(spec.n_sites - 1);
    for (int j = 1; j < spec.n_sites; ++j) {
        cs[j - 1] = spec.j_coupling * coupling_at(j, spec);
    }
    return cs;
}

} // namespace

HermitianOperator build_xx(const ChainSpec& spec) {
    spec.validate();
    if (spec.model != Model::XX) {
        throw ContractError("build_xx: spec.model must be XX");
    }
    return build_open_chain(spec.n_sites, bond_couplings(spec), 0.0);
}

HermitianOperator build_xxz(const ChainSpec& spec) {
    spec.validate();
    if (spec.model != Model::XXZ) {
        throw ContractError("build_xxz: spec.model must be XXZ");
    }
    // The dimerization factor multiplies the sz sz term as well.
    return build_open_chain(spec.n_sites, bond_couplings(spec), spec.anisotropy);
}

HermitianOperator build_hamiltonian(const ChainSpec& spec) {
    return spec.model == Model::XX ? build_xx(spec) : build_xxz(spec);
}

HermitianOperator total_sz_operator(int n_sites) {
    if (n_sites < 1) {
        throw std::invalid_argument("total_sz_operator: n_sites must be >= 1");
    }
    if (n_sites > kMaxDenseSites) {
        throw CapacityError("total_sz_operator: dense representation capped at " +
                            std::to_string(kMaxDenseSites) + " sites");
    }
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        h(b, b) = sz_of_index(static_cast<std::uint64_t>(b), n_sites);
    }
    return HermitianOperator(std::move(h));
}

std::vector<std::uint64_t> sector_indices(int n_sites, int sz) {
    if (n_sites < 1) {
        throw std::invalid_argument("sector_indices: n_sites must be >= 1");
    }
    if (std::abs(sz) > n_sites || (n_sites - sz) % 2 != 0) {
        throw std::invalid_argument("sector_indices: sz must lie in {-N, -N+2, ..., N}");
    }
    const int down_spins = (n_sites - sz) / 2;
    std::vector<std::uint64_t> out;
    const std::uint64_t dim = std::uint64_t{1} << n_sites;
    for (std::uint64_t b = 0; b < dim; ++b) {
        if (__builtin_popcountll(b) == down_spins) {
            out.push_back(b);
        }
    }
    return out;
}

EffectiveCouplings effective_couplings(const LatticeParams& p) {
    if (!(p.u_up > 0.0) || !(p.u_down > 0.0) || !(p.u_updown > 0.0)) {
        throw std::invalid_argument("effective_couplings: interaction strengths must be positive");
    }
    EffectiveCouplings out;
    out.j_z = (p.j_up * p.j_up + p.j_down * p.j_down) / (2.0 * p.u_updown) -
              p.j_up * p.j_up / p.u_up - p.j_down * p.j_down / p.u_down;
    out.j_perp = (p.j_up + p.j_down) / p.u_updown;
    return out;
}

} // namespace dimerchain
