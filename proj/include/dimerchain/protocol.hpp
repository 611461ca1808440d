#pragma once

#include <optional>
#include <string>

#include "dimerchain/engine.hpp"

namespace dimerchain {

// Encoding rotation angles, theta in [0, pi], phi in [0, 2 pi).
struct RotationAngles {
    double theta = 0.0;
    double phi = 0.0;

    RotationAngles() = default;
    RotationAngles(double theta, double phi);
};

// Computational-basis result on the decoding sites (2, N-1); P01 means site 2
// read |0> and site N-1 read |1>.
enum class MeasurementOutcome { P00, P01, P10, P11 };

std::string to_string(MeasurementOutcome o);
std::optional<MeasurementOutcome> outcome_from_string(const std::string& s);
int outcome_bit_near(MeasurementOutcome o); // site 2
int outcome_bit_far(MeasurementOutcome o);  // site N-1

// Encoding rotation
//   R(theta, phi) = [ cos(t/2)            -e^{-i phi} sin(t/2) ]
//                   [ e^{i phi} sin(t/2)   cos(t/2)            ]
ComplexMatrix rotation_gate(const RotationAngles& a);

// Applies a single-qubit unitary at the given site (1-based).
PureState apply_local(const ComplexMatrix& gate, int site, const PureState& psi);

// |psi(0)> = R_1 R_N |GS>, same angles at both ends.
PureState encode(const PureState& gs, const RotationAngles& a);

// Extension point: independent angles per end (the protocol itself always
// uses equal ones).
PureState encode(const PureState& gs, const RotationAngles& first,
                 const RotationAngles& last);

struct ProjectionResult {
    double probability = 0.0;
    PureState state;
};

// Projects sites 2 and N-1 onto the outcome's bits and renormalizes.
// Probability below 1e-12 raises ZeroProbabilityError.
ProjectionResult project_sites(const PureState& psi, MeasurementOutcome outcome);

// Reduced state of the end pair, sites (1, N) in that order.
DensityMatrix end_pair_density(const PureState& psi);

// Two-qubit concurrence: sqrt-eigenvalues of sqrt(rho) YY rho* YY sqrt(rho)
// sorted descending give C = max(0, l1 - l2 - l3 - l4).
double concurrence(const DensityMatrix& rho);

struct WernerFit {
    double p = 0.0;        // (4 F - 1) / 3 with F the singlet fidelity
    double residual = 0.0; // trace distance to the fitted Werner state
};

WernerFit werner_fit(const DensityMatrix& rho);

struct RunAtTimeResult {
    double probability = 0.0;
    double concurrence = 0.0;
};

struct TStarResult {
    double t_star = 0.0;
    double concurrence = 0.0;
    double probability = 0.0;
};

struct ScanSettings {
    double t_max = 0.0;
    double dt = 0.0;
};

// Defaults pinned for reproducibility: t_max = 4 N / J, dt = 0.02 / J.
ScanSettings default_scan(const ChainSpec& spec);

// Ground state, encoding and sector decomposition prepared once so that a
// t-scan costs one spectral reassembly per point.
class PreparedProtocol {
public:
    PreparedProtocol(const ChainSpec& spec, const RotationAngles& angles,
                     DegeneracyPolicy policy = DegeneracyPolicy::Reject,
                     BlockedSpectrumPtr blocks = nullptr);

    // encode -> evolve(t) -> project (when N >= 4) -> end-pair concurrence.
    RunAtTimeResult at(double t, MeasurementOutcome outcome) const;

    const ChainSpec& spec() const { return spec_; }
    const RotationAngles& angles() const { return angles_; }
    const GroundStateResult& ground() const { return ground_; }

private:
    ChainSpec spec_;
    RotationAngles angles_;
    BlockedSpectrumPtr blocks_;
    GroundStateResult ground_;
    EvolutionPlan plan_;
};

// Single protocol evaluation at a fixed time.
RunAtTimeResult run_at_time(const ChainSpec& spec, const RotationAngles& angles,
                            MeasurementOutcome outcome, double t,
                            DegeneracyPolicy policy = DegeneracyPolicy::Reject);

// Coarse scan over t in {0, dt, ..., t_max} followed by ternary refinement of
// the bracketing interval down to dt/100; earliest maximizing t wins ties.
TStarResult find_tstar(const PreparedProtocol& prepared, MeasurementOutcome outcome,
                       double t_max, double dt);
TStarResult find_tstar(const ChainSpec& spec, const RotationAngles& angles,
                       MeasurementOutcome outcome, double t_max, double dt,
                       DegeneracyPolicy policy = DegeneracyPolicy::Reject);

// Record of one full protocol run.
struct ProtocolResult {
    ChainSpec spec;
    RotationAngles angles;
    MeasurementOutcome outcome = MeasurementOutcome::P00;
    double t_star = 0.0;
    double outcome_probability = 0.0;
    double concurrence = 0.0;
    double werner_p = 0.0;        // fit of the ground state's (1,2) pair
    double werner_residual = 0.0;
};

ProtocolResult run_protocol(const ChainSpec& spec, const RotationAngles& angles,
                            MeasurementOutcome outcome, double t_max, double dt,
                            DegeneracyPolicy policy = DegeneracyPolicy::Reject);

} // namespace dimerchain
