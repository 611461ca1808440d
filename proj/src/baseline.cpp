#include "dimerchain/baseline.hpp"

#include <cmath>

#include "dimerchain/protocol.hpp"
#include "scan.hpp"

namespace dimerchain {

AttachedSystemSpec::AttachedSystemSpec(ChainSpec chain_, std::optional<double> attach_coupling_,
                                       bool uniform_chain_)
    : chain(std::move(chain_)), uniform_chain(uniform_chain_) {
    chain.validate();
    const double delta_eff = uniform_chain ? 0.0 : chain.delta;
    attach_coupling = attach_coupling_.value_or(chain.j_coupling * (1.0 + delta_eff));
    if (attach_coupling < 0.0 || !std::isfinite(attach_coupling)) {
        throw std::invalid_argument("AttachedSystemSpec: attach_coupling must be >= 0");
    }
}

ChainSpec AttachedSystemSpec::effective_chain() const {
    ChainSpec eff = chain;
    if (uniform_chain) eff.delta = 0.0;
    eff.validate();
    return eff;
}

AttachedSystem build_attached(const AttachedSystemSpec& spec, DegeneracyPolicy policy) {
    const ChainSpec eff = spec.effective_chain();
    const int n = eff.n_sites;
    const int total = n + 2;
    if (total > kMaxDenseSites) {
        throw CapacityError("build_attached: chain plus ancilla pair capped at " +
                            std::to_string(kMaxDenseSites) + " sites");
    }

    const GroundStateResult gs = ground_state(eff, policy);

    // Bond list of the composite: no 1-2 bond (the pair interacts with the
    // chain only through site 2), the quench bond 2-3, then the chain bonds.
    std::vector<double> couplings(total - 1, 0.0);
    couplings[1] = spec.attach_coupling;
    for (int j = 1; j < n; ++j) {
        couplings[j + 1] = eff.j_coupling * coupling_at(j, eff);
    }
    const double anis = eff.model == Model::XXZ ? eff.anisotropy : 0.0;
    HermitianOperator h_ext = build_open_chain(total, couplings, anis);

    // Chain sites keep their bit positions: composite site j+2 maps to bit
    // n - j, so the chain amplitude index is the low n bits.
    const Eigen::Index dim = Eigen::Index{1} << total;
    ComplexVector psi0 = ComplexVector::Zero(dim);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Eigen::Index up_anc = Eigen::Index{1} << n;       // |0 1> on (1, 2)
    const Eigen::Index down_anc = Eigen::Index{1} << (n + 1); // |1 0> on (1, 2)
    for (Eigen::Index c = 0; c < (Eigen::Index{1} << n); ++c) {
        const Complex amp = gs.state.amplitudes()(c) * inv_sqrt2;
        psi0(c | up_anc) += amp;
        psi0(c | down_anc) -= amp;
    }
    return AttachedSystem{total, std::move(h_ext), PureState(total, std::move(psi0))};
}

AttachResult run_attaching(const AttachedSystemSpec& spec, double t_max, double dt,
                           DegeneracyPolicy policy) {
    const AttachedSystem sys = build_attached(spec, policy);
    const auto blocks = std::make_shared<const BlockedSpectrum>(
        blocked_eig(sys.h_ext, sys.total_sites));
    const EvolutionPlan plan(blocks, sys.psi0);

    const std::vector<int> ends{1, sys.total_sites};
    const auto eval = [&](double t) -> std::optional<double> {
        return concurrence(partial_trace(plan.at(t), ends));
    };
    const detail::ScanBest best = detail::scan_maximize(eval, t_max, dt);
    return AttachResult{best.t, best.value};
}

} // namespace dimerchain
