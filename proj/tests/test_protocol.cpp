#include <doctest.h>

#include <cmath>
#include <random>

#include "dimerchain/protocol.hpp"
#include "test_helpers.hpp"

using namespace dimerchain;
using dimerchain::testing::random_density4;
using dimerchain::testing::random_state;
using dimerchain::testing::random_unitary2;

namespace {

constexpr double kPi = 3.14159265358979323846;

ComplexVector singlet4() {
    ComplexVector v = ComplexVector::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return v;
}

DensityMatrix werner_state(double p) {
    const ComplexVector s = singlet4();
    ComplexMatrix rho = p * (s * s.adjoint()) + (1.0 - p) / 4.0 * ComplexMatrix::Identity(4, 4);
    return DensityMatrix(2, rho);
}

} // namespace

TEST_CASE("rotation gate at reference angles") {
    const ComplexMatrix id = rotation_gate(RotationAngles(0.0, 0.0));
    CHECK((id - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);

    const ComplexMatrix flip = rotation_gate(RotationAngles(kPi, 0.0));
    ComplexMatrix expected(2, 2);
    expected << 0, -1, 1, 0;
    CHECK((flip - expected).cwiseAbs().maxCoeff() < 1e-15);

    const ComplexMatrix half = rotation_gate(RotationAngles(kPi / 2.0, 0.0));
    ComplexMatrix hexp(2, 2);
    hexp << 1, -1, 1, 1;
    hexp /= std::sqrt(2.0);
    CHECK((half - hexp).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rotation gate is unitary for random angles") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> thetas(0.0, kPi);
    std::uniform_real_distribution<double> phis(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix r = rotation_gate(RotationAngles(thetas(rng), phis(rng)));
        CHECK((r.adjoint() * r - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(RotationAngles(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(RotationAngles(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("apply_local respects the bit convention") {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;

    // sigma^x on site 1 of |00> gives |10>
    const PureState out = apply_local(x, 1, PureState::basis_state(2, 0b00));
    CHECK(std::abs(out.amplitudes()(0b10) - Complex(1.0)) < 1e-15);

    const PureState id_out =
        apply_local(ComplexMatrix::Identity(2, 2), 2, PureState::basis_state(2, 0b01));
    CHECK(std::abs(id_out.amplitudes()(0b01) - Complex(1.0)) < 1e-15);

    ComplexMatrix not_unitary(2, 2);
    not_unitary << 1, 1, 0, 1;
    CHECK_THROWS_AS(apply_local(not_unitary, 1, PureState::basis_state(2, 0)), ContractError);
}

TEST_CASE("rotation followed by its inverse is the identity") {
    std::mt19937 rng(103);
    const PureState psi = random_state(3, rng);
    const ComplexMatrix r = rotation_gate(RotationAngles(1.1, 2.2));
    const PureState back = apply_local(r.adjoint(), 2, apply_local(r, 2, psi));
    CHECK((back.amplitudes() - psi.amplitudes()).norm() < 1e-12);
}

TEST_CASE("encode applies the rotation at both ends") {
    std::mt19937 rng(107);
    const PureState psi = random_state(4, rng);

    const PureState same = encode(psi, RotationAngles(0.0, 0.0));
    CHECK((same.amplitudes() - psi.amplitudes()).norm() < 1e-15);

    const PureState rotated = encode(psi, RotationAngles(1.3, 0.4));
    CHECK(std::abs(rotated.amplitudes().norm() - 1.0) < 1e-12);

    // flipping both qubits of the singlet keeps it maximally entangled
    const PureState flipped = encode(PureState(2, singlet4()), RotationAngles(kPi, 0.0));
    CHECK(concurrence(end_pair_density(flipped)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("encode supports independent end angles") {
    std::mt19937 rng(127);
    const PureState psi = random_state(4, rng);
    const RotationAngles first(0.7, 0.3);
    const RotationAngles last(2.1, 5.9);
    const PureState two_step = apply_local(rotation_gate(last), 4,
                                           apply_local(rotation_gate(first), 1, psi));
    const PureState direct = encode(psi, first, last);
    CHECK((direct.amplitudes() - two_step.amplitudes()).norm() < 1e-14);

    const PureState equal = encode(psi, first);
    const PureState equal_pair = encode(psi, first, first);
    CHECK((equal.amplitudes() - equal_pair.amplitudes()).norm() == 0.0);
}

TEST_CASE("project_sites postselects the decoding outcome") {
    const PureState zeros = PureState::basis_state(4, 0);
    const ProjectionResult res = project_sites(zeros, MeasurementOutcome::P00);
    CHECK(res.probability == doctest::Approx(1.0));
    CHECK((res.state.amplitudes() - zeros.amplitudes()).norm() < 1e-15);

    CHECK_THROWS_AS(project_sites(zeros, MeasurementOutcome::P11), ZeroProbabilityError);
    CHECK_THROWS_AS(project_sites(PureState::basis_state(2, 0), MeasurementOutcome::P00),
                    ContractError);
}

TEST_CASE("projection probabilities sum to one") {
    std::mt19937 rng(109);
    for (int n : {4, 6}) {
        const PureState psi = random_state(n, rng);
        double total = 0.0;
        for (MeasurementOutcome o : {MeasurementOutcome::P00, MeasurementOutcome::P01,
                                     MeasurementOutcome::P10, MeasurementOutcome::P11}) {
            total += project_sites(psi, o).probability;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("end_pair_density extracts sites 1 and N") {
    // |psi->_{1,4} (x) |00>_{2,3}: amplitude +1/sqrt2 on |0001>, -1/sqrt2 on |1000>
    ComplexVector amps = ComplexVector::Zero(16);
    amps(0b0001) = 1.0 / std::sqrt(2.0);
    amps(0b1000) = -1.0 / std::sqrt(2.0);
    const DensityMatrix rho = end_pair_density(PureState(4, amps));

    const ComplexVector s = singlet4();
    CHECK((rho.matrix() - s * s.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(concurrence(rho) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("concurrence reference values") {
    const ComplexVector s = singlet4();
    CHECK(concurrence(DensityMatrix(2, s * s.adjoint())) == doctest::Approx(1.0).epsilon(1e-12));

    ComplexMatrix product = ComplexMatrix::Zero(4, 4);
    product(0, 0) = 1.0;
    CHECK(concurrence(DensityMatrix(2, product)) == doctest::Approx(0.0));

    // Werner state: C = max(0, (3p-1)/2)
    for (double p : {0.0, 1.0 / 3.0, 0.6, 1.0}) {
        const double expected = std::max(0.0, (3.0 * p - 1.0) / 2.0);
        CHECK(concurrence(werner_state(p)) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("concurrence is invariant under local unitaries") {
    std::mt19937 rng(113);
    for (int trial = 0; trial < 60; ++trial) {
        const ComplexMatrix rho = random_density4(rng);
        const double c0 = concurrence(DensityMatrix(2, rho));
        const ComplexMatrix u = kron(random_unitary2(rng), random_unitary2(rng));
        const double c1 = concurrence(DensityMatrix(2, u * rho * u.adjoint()));
        CHECK(c1 == doctest::Approx(c0).epsilon(1e-9));
    }
}

TEST_CASE("werner_fit on exact Werner states") {
    const WernerFit pure = werner_fit(DensityMatrix(2, singlet4() * singlet4().adjoint()));
    CHECK(pure.p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pure.residual == doctest::Approx(0.0).epsilon(1e-12));

    const WernerFit mixed = werner_fit(DensityMatrix(2, 0.25 * ComplexMatrix::Identity(4, 4)));
    CHECK(mixed.p == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mixed.residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ground-state bond pair is close to a Werner state") {
    const GroundStateResult gs = ground_state(ChainSpec(Model::XX, 8, 1.0, 0.8));
    const WernerFit fit = werner_fit(partial_trace(gs.state, {1, 2}));
    CHECK(fit.residual < 0.05);

    double last_p = -1.0;
    for (double delta : {0.5, 0.7, 0.9}) {
        const GroundStateResult g = ground_state(ChainSpec(Model::XX, 8, 1.0, delta));
        const WernerFit f = werner_fit(partial_trace(g.state, {1, 2}));
        CHECK(f.p > last_p);
        last_p = f.p;
    }
}

TEST_CASE("run_at_time composes the protocol pipeline") {
    const ChainSpec spec(Model::XX, 6, 1.0, 0.8);

    SUBCASE("t = 0 with theta = 0 matches the raw ground state") {
        const GroundStateResult gs = ground_state(spec);
        const ProjectionResult proj = project_sites(gs.state, MeasurementOutcome::P00);
        const double direct = concurrence(end_pair_density(proj.state));
        const RunAtTimeResult res =
            run_at_time(spec, RotationAngles(0.0, 0.0), MeasurementOutcome::P00, 0.0);
        CHECK(res.concurrence == doctest::Approx(direct).epsilon(1e-10));
        CHECK(res.probability == doctest::Approx(proj.probability).epsilon(1e-10));
    }

    SUBCASE("outcome probabilities at a fixed time sum to one") {
        const PreparedProtocol prep(spec, RotationAngles(kPi / 2.0, 0.0));
        double total = 0.0;
        for (MeasurementOutcome o : {MeasurementOutcome::P00, MeasurementOutcome::P01,
                                     MeasurementOutcome::P10, MeasurementOutcome::P11}) {
            total += prep.at(1.7, o).probability;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("find_tstar on the trivial two-site chain") {
    // The singlet ground state is stationary and maximally entangled; the
    // earliest-t tie-break reports t* = 0.
    const ChainSpec spec(Model::XX, 2, 1.0, 0.8);
    const TStarResult res =
        find_tstar(spec, RotationAngles(0.0, 0.0), MeasurementOutcome::P00, 8.0, 0.05);
    CHECK(res.t_star == doctest::Approx(0.0));
    CHECK(res.concurrence == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.probability == doctest::Approx(1.0));
}

TEST_CASE("find_tstar regression on the paper operating point") {
    // N=8, delta=0.8, theta=pi/2, P00. Brute-force scan value frozen from the
    // development oracle: C* = 0.9757 at t* = 28.58 in the 4N window.
    const ChainSpec spec(Model::XX, 8, 1.0, 0.8);
    const ScanSettings scan = default_scan(spec);
    const TStarResult res = find_tstar(spec, RotationAngles(kPi / 2.0, 0.0),
                                       MeasurementOutcome::P00, scan.t_max, scan.dt);
    CHECK(res.concurrence > 0.7);
    CHECK(res.concurrence == doctest::Approx(0.9757).epsilon(2e-3));
    CHECK(res.t_star == doctest::Approx(28.58).epsilon(2e-3));
}

TEST_CASE("widening the scan window cannot reduce the maximum") {
    const ChainSpec spec(Model::XX, 4, 1.0, 0.8);
    const RotationAngles angles(kPi / 2.0, 0.0);
    const PreparedProtocol prep(spec, angles);
    const TStarResult narrow = find_tstar(prep, MeasurementOutcome::P00, 5.0, 0.05);
    const TStarResult wide = find_tstar(prep, MeasurementOutcome::P00, 10.0, 0.05);
    CHECK(wide.concurrence >= narrow.concurrence - 1e-12);
}

TEST_CASE("maximum concurrence is phi-independent for the XX model") {
    const ChainSpec spec(Model::XX, 6, 1.0, 0.8);
    const ScanSettings scan = default_scan(spec);
    double reference = -1.0;
    for (double phi : {0.0, kPi / 4.0, kPi / 2.0}) {
        const TStarResult res = find_tstar(spec, RotationAngles(kPi / 2.0, phi),
                                           MeasurementOutcome::P00, scan.t_max, scan.dt);
        if (reference < 0.0) {
            reference = res.concurrence;
        } else {
            CHECK(res.concurrence == doctest::Approx(reference).epsilon(1e-6));
        }
    }
}

TEST_CASE("P00 and P11 perform identically on the XX chain") {
    const ChainSpec spec(Model::XX, 6, 1.0, 0.8);
    const ScanSettings scan = default_scan(spec);
    const PreparedProtocol prep(spec, RotationAngles(kPi / 2.0, 0.0));
    const TStarResult p00 = find_tstar(prep, MeasurementOutcome::P00, scan.t_max, scan.dt);
    const TStarResult p11 = find_tstar(prep, MeasurementOutcome::P11, scan.t_max, scan.dt);
    CHECK(p00.concurrence == doctest::Approx(p11.concurrence).epsilon(1e-6));
}

TEST_CASE("run_protocol aggregates the record") {
    const ChainSpec spec(Model::XX, 4, 1.0, 0.8);
    const ProtocolResult res = run_protocol(spec, RotationAngles(kPi / 2.0, 0.0),
                                            MeasurementOutcome::P00, 8.0, 0.05);
    CHECK(res.concurrence >= 0.0);
    CHECK(res.concurrence <= 1.0);
    CHECK(res.outcome_probability >= 0.0);
    CHECK(res.outcome_probability <= 1.0);
    CHECK(res.t_star >= 0.0);
    CHECK(res.werner_residual >= 0.0);
    CHECK(res.werner_p > 0.9); // strong bond pair is near-singlet at delta=0.8
}
