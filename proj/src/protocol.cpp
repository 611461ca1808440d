#include "dimerchain/protocol.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "scan.hpp"

namespace dimerchain {

namespace {

constexpr double kZeroProbability = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// sigma^y tensor sigma^y in the computational basis.
ComplexMatrix spin_flip_matrix() {
    ComplexMatrix y(4, 4);
    y.setZero();
    y(0, 3) = -1.0;
    y(1, 2) = 1.0;
    y(2, 1) = 1.0;
    y(3, 0) = -1.0;
    return y;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    if (es.info() != Eigen::Success) {
        throw NumericError("concurrence: eigensolver failed on rho");
    }
    RealVector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexVector singlet_vector() {
    ComplexVector v(4);
    v.setZero();
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return v;
}

} // namespace

RotationAngles::RotationAngles(double theta_, double phi_) : theta(theta_), phi(phi_) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw std::invalid_argument("RotationAngles: theta must lie in [0, pi]");
    }
    if (!(phi >= 0.0 && phi < 2.0 * kPi)) {
        throw std::invalid_argument("RotationAngles: phi must lie in [0, 2 pi)");
    }
}

std::string to_string(MeasurementOutcome o) {
    switch (o) {
        case MeasurementOutcome::P00: return "P00";
        case MeasurementOutcome::P01: return "P01";
        case MeasurementOutcome::P10: return "P10";
        case MeasurementOutcome::P11: return "P11";
    }
    return "?";
}

std::optional<MeasurementOutcome> outcome_from_string(const std::string& s) {
    if (s == "P00") return MeasurementOutcome::P00;
    if (s == "P01") return MeasurementOutcome::P01;
    if (s == "P10") return MeasurementOutcome::P10;
    if (s == "P11") return MeasurementOutcome::P11;
    return std::nullopt;
}

int outcome_bit_near(MeasurementOutcome o) {
    return (o == MeasurementOutcome::P10 || o == MeasurementOutcome::P11) ? 1 : 0;
}

int outcome_bit_far(MeasurementOutcome o) {
    return (o == MeasurementOutcome::P01 || o == MeasurementOutcome::P11) ? 1 : 0;
}

ComplexMatrix rotation_gate(const RotationAngles& a) {
    const double c = std::cos(a.theta / 2.0);
    const double s = std::sin(a.theta / 2.0);
    ComplexMatrix r(2, 2);
    r(0, 0) = c;
    r(0, 1) = -std::exp(Complex(0.0, -a.phi)) * s;
    r(1, 0) = std::exp(Complex(0.0, a.phi)) * s;
    r(1, 1) = c;
    return r;
}

PureState apply_local(const ComplexMatrix& gate, int site, const PureState& psi) {
    if (gate.rows() != 2 || gate.cols() != 2) {
        throw ContractError("apply_local: gate must be 2x2");
    }
    if ((gate.adjoint() * gate - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() >
        tol::unitarity) {
        throw ContractError("apply_local: gate is not unitary");
    }
    const int n = psi.n_sites();
    if (site < 1 || site > n) {
        throw std::invalid_argument("apply_local: site out of range");
    }

    const Eigen::Index mask = static_cast<Eigen::Index>(site_mask(site, n));
    ComplexVector out(psi.dim());
    const ComplexVector& in = psi.amplitudes();
    for (Eigen::Index b = 0; b < psi.dim(); ++b) {
        if (b & mask) continue;
        const Eigen::Index b1 = b | mask;
        out(b) = gate(0, 0) * in(b) + gate(0, 1) * in(b1);
        out(b1) = gate(1, 0) * in(b) + gate(1, 1) * in(b1);
    }
    return PureState(n, std::move(out));
}

PureState encode(const PureState& gs, const RotationAngles& a) {
    return encode(gs, a, a);
}

PureState encode(const PureState& gs, const RotationAngles& first, const RotationAngles& last) {
    return apply_local(rotation_gate(last), gs.n_sites(),
                       apply_local(rotation_gate(first), 1, gs));
}

ProjectionResult project_sites(const PureState& psi, MeasurementOutcome outcome) {
    const int n = psi.n_sites();
    if (n < 4) {
        throw ContractError("project_sites: needs N >= 4 so sites 2 and N-1 are distinct");
    }
    const int want_near = outcome_bit_near(outcome);
    const int want_far = outcome_bit_far(outcome);

    ComplexVector kept = psi.amplitudes();
    double prob = 0.0;
    for (Eigen::Index b = 0; b < kept.size(); ++b) {
        const std::uint64_t ub = static_cast<std::uint64_t>(b);
        if (site_bit(ub, 2, n) == want_near && site_bit(ub, n - 1, n) == want_far) {
            prob += std::norm(kept(b));
        } else {
            kept(b) = 0.0;
        }
    }
    if (prob < kZeroProbability) {
        throw ZeroProbabilityError("project_sites: outcome " + to_string(outcome) +
                                   " has probability " + std::to_string(prob));
    }
    kept /= std::sqrt(prob);
    return ProjectionResult{std::min(prob, 1.0), PureState(n, std::move(kept))};
}

DensityMatrix end_pair_density(const PureState& psi) {
    return partial_trace(psi, {1, psi.n_sites()});
}

double concurrence(const DensityMatrix& rho) {
    if (rho.n_sites() != 2) {
        throw ContractError("concurrence: defined for two-qubit states only");
    }
    static const ComplexMatrix yy = spin_flip_matrix();
    const ComplexMatrix& r = rho.matrix();
    const ComplexMatrix sq = psd_sqrt(r);
    const ComplexMatrix m = sq * yy * r.conjugate() * yy * sq; // Hermitian PSD

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("concurrence: eigensolver failed on the flip product");
    }
    RealVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt(); // ascending
    const double c = lam(3) - lam(2) - lam(1) - lam(0);
    return std::clamp(c, 0.0, 1.0);
}

WernerFit werner_fit(const DensityMatrix& rho) {
    if (rho.n_sites() != 2) {
        throw ContractError("werner_fit: defined for two-qubit states only");
    }
    static const ComplexVector psi_minus = singlet_vector();
    const double fidelity = (psi_minus.adjoint() * rho.matrix() * psi_minus)(0).real();
    const double p = (4.0 * fidelity - 1.0) / 3.0;

    ComplexMatrix werner = p * (psi_minus * psi_minus.adjoint()) +
                           (1.0 - p) / 4.0 * ComplexMatrix::Identity(4, 4);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix() - werner,
                                                    Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("werner_fit: eigensolver failed on the residual");
    }
    return WernerFit{p, 0.5 * es.eigenvalues().cwiseAbs().sum()};
}

ScanSettings default_scan(const ChainSpec& spec) {
    return ScanSettings{4.0 * spec.n_sites / spec.j_coupling, 0.02 / spec.j_coupling};
}

PreparedProtocol::PreparedProtocol(const ChainSpec& spec, const RotationAngles& angles,
                                   DegeneracyPolicy policy, BlockedSpectrumPtr blocks)
    : spec_(spec), angles_(angles),
      blocks_(blocks ? std::move(blocks) : make_blocked_spectrum(spec)),
      ground_(ground_state(*blocks_, policy)),
      plan_(blocks_, encode(ground_.state, angles_)) {
    spec_.validate_for_protocol();
}

RunAtTimeResult PreparedProtocol::at(double t, MeasurementOutcome outcome) const {
    PureState psi = plan_.at(t);
    double probability = 1.0;
    if (spec_.n_sites >= 4) {
        ProjectionResult projected = project_sites(psi, outcome);
        probability = projected.probability;
        psi = std::move(projected.state);
    }
    return RunAtTimeResult{probability, concurrence(end_pair_density(psi))};
}

RunAtTimeResult run_at_time(const ChainSpec& spec, const RotationAngles& angles,
                            MeasurementOutcome outcome, double t, DegeneracyPolicy policy) {
    return PreparedProtocol(spec, angles, policy).at(t, outcome);
}

TStarResult find_tstar(const PreparedProtocol& prepared, MeasurementOutcome outcome,
                       double t_max, double dt) {
    const auto eval = [&](double t) -> std::optional<double> {
        try {
            return prepared.at(t, outcome).concurrence;
        } catch (const ZeroProbabilityError&) {
            return std::nullopt;
        }
    };
    const detail::ScanBest best = detail::scan_maximize(eval, t_max, dt);
    if (!best.found) {
        throw ProtocolFailureError("find_tstar: outcome " + to_string(outcome) +
                                   " had zero probability across the whole scan window");
    }
    const RunAtTimeResult at_best = prepared.at(best.t, outcome);
    return TStarResult{best.t, at_best.concurrence, at_best.probability};
}

TStarResult find_tstar(const ChainSpec& spec, const RotationAngles& angles,
                       MeasurementOutcome outcome, double t_max, double dt,
                       DegeneracyPolicy policy) {
    return find_tstar(PreparedProtocol(spec, angles, policy), outcome, t_max, dt);
}

ProtocolResult run_protocol(const ChainSpec& spec, const RotationAngles& angles,
                            MeasurementOutcome outcome, double t_max, double dt,
                            DegeneracyPolicy policy) {
    const PreparedProtocol prepared(spec, angles, policy);
    const TStarResult star = find_tstar(prepared, outcome, t_max, dt);
    const WernerFit fit = werner_fit(partial_trace(prepared.ground().state, {1, 2}));

    ProtocolResult out;
    out.spec = spec;
    out.angles = angles;
    out.outcome = outcome;
    out.t_star = star.t_star;
    out.outcome_probability = star.probability;
    out.concurrence = star.concurrence;
    out.werner_p = fit.p;
    out.werner_residual = fit.residual;
    return out;
}

} // namespace dimerchain
