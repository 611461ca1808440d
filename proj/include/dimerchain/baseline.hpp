#pragma once

#include <optional>

#include "dimerchain/engine.hpp"

namespace dimerchain {

// Comparison scheme: a maximally entangled ancilla pair, one member quench-
// coupled to site 1 of the chain, the other left free. Composite sites are
// numbered 1 (free ancilla), 2 (attached ancilla), 3..N+2 (chain sites 1..N).
struct AttachedSystemSpec {
    ChainSpec chain;
    double attach_coupling = 0.0; // resolved at construction
    bool uniform_chain = false;   // compare against the delta = 0 chain

    AttachedSystemSpec() = default;
    // attach_coupling defaults to the strong bond value J (1 + delta) of the
    // effective (possibly uniform) chain.
    explicit AttachedSystemSpec(ChainSpec chain, std::optional<double> attach_coupling = {},
                                bool uniform_chain = false);

    // The chain actually simulated: delta forced to 0 when uniform_chain.
    ChainSpec effective_chain() const;
};

struct AttachedSystem {
    int total_sites = 0;
    HermitianOperator h_ext;
    PureState psi0; // |psi->_{1,2} (x) |GS>_{3..N+2}
};

AttachedSystem build_attached(const AttachedSystemSpec& spec,
                              DegeneracyPolicy policy = DegeneracyPolicy::Reject);

struct AttachResult {
    double t_star = 0.0;
    double concurrence = 0.0;
};

// Evolves psi0 under h_ext and maximizes the concurrence between the free
// ancilla and the far chain end, with the same scan-and-refine procedure as
// find_tstar.
AttachResult run_attaching(const AttachedSystemSpec& spec, double t_max, double dt,
                           DegeneracyPolicy policy = DegeneracyPolicy::Reject);

} // namespace dimerchain
