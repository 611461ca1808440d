#include <doctest.h>

#include <algorithm>
#include <random>

#include "dimerchain/engine.hpp"
#include "test_helpers.hpp"

using namespace dimerchain;
using dimerchain::testing::random_state;

namespace {

std::vector<double> all_eigenvalues(const BlockedSpectrum& blocks) {
    std::vector<double> out;
    for (const auto& sec : blocks.sectors) {
        for (Eigen::Index k = 0; k < sec.eigenvalues.size(); ++k) {
            out.push_back(sec.eigenvalues(k));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("blocked_eig on the two-site XX chain") {
    const ChainSpec spec(Model::XX, 2, 1.0, 0.5);
    const BlockedSpectrum blocks = blocked_eig(build_xx(spec), 2);

    REQUIRE(blocks.sectors.size() == 3);
    CHECK(blocks.sectors[0].sz == -2);
    CHECK(blocks.sectors[1].sz == 0);
    CHECK(blocks.sectors[2].sz == 2);

    CHECK(blocks.sectors[0].eigenvalues(0) == doctest::Approx(0.0));
    CHECK(blocks.sectors[2].eigenvalues(0) == doctest::Approx(0.0));
    CHECK(blocks.sectors[1].eigenvalues(0) == doctest::Approx(-1.5));
    CHECK(blocks.sectors[1].eigenvalues(1) == doctest::Approx(1.5));
}

TEST_CASE("blocked_eig restricted diagonal input") {
    ComplexMatrix d = ComplexMatrix::Zero(4, 4);
    d(0, 0) = 0.5;
    d(1, 1) = -2.0;
    d(2, 2) = 3.0;
    d(3, 3) = 1.0;
    const BlockedSpectrum blocks = blocked_eig(HermitianOperator(d), 2);
    CHECK(blocks.sectors[1].eigenvalues(0) == doctest::Approx(-2.0));
    CHECK(blocks.sectors[1].eigenvalues(1) == doctest::Approx(3.0));
}

TEST_CASE("blocked_eig rejects symmetry-violating operators") {
    // sigma^x on site 1 of a two-site system changes S_z.
    ComplexMatrix bad = ComplexMatrix::Zero(4, 4);
    bad(0, 2) = 1.0;
    bad(2, 0) = 1.0;
    CHECK_THROWS_AS(blocked_eig(HermitianOperator(bad), 2), SymmetryError);
}

TEST_CASE("blocked eigenvalues match the dense solver") {
    const ChainSpec spec(Model::XXZ, 6, 1.0, 0.45, 0.8);
    const HermitianOperator h = build_hamiltonian(spec);
    const auto blocked = all_eigenvalues(blocked_eig(h, 6));
    const Spectrum dense = hermitian_eig(h);
    REQUIRE(blocked.size() == static_cast<std::size_t>(dense.eigenvalues.size()));
    for (std::size_t i = 0; i < blocked.size(); ++i) {
        CHECK(blocked[i] == doctest::Approx(dense.eigenvalues(i)).epsilon(1e-9));
    }
}

TEST_CASE("ground state of the strongly dimerized two-site chain") {
    const GroundStateResult gs = ground_state(ChainSpec(Model::XX, 2, 1.0, 0.8));
    CHECK(gs.energy == doctest::Approx(-1.8).epsilon(1e-12));
    CHECK(gs.sector_sz == 0);
    // (|01> - |10>)/sqrt(2) under the phase convention
    CHECK(gs.state.amplitudes()(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(gs.state.amplitudes()(2).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("strong dimerization approaches a product of bond singlets") {
    const GroundStateResult gs = ground_state(ChainSpec(Model::XX, 4, 1.0, 0.95));
    ComplexMatrix bond = ComplexMatrix::Zero(4, 1);
    bond(1, 0) = 1.0 / std::sqrt(2.0);
    bond(2, 0) = -1.0 / std::sqrt(2.0);
    const ComplexMatrix product = kron(bond, bond); // singlets on (1,2) and (3,4)
    const Complex overlap = (product.adjoint() * gs.state.amplitudes())(0);
    CHECK(std::norm(overlap) > 0.99);
}

TEST_CASE("ferromagnetic XXZ needs the degenerate-selection policy") {
    const ChainSpec spec(Model::XXZ, 4, 1.0, 0.5, -5.0);
    CHECK_THROWS_AS(ground_state(spec), DegenerateGroundStateError);

    const GroundStateResult gs = ground_state(spec, DegeneracyPolicy::PickDeterministic);
    CHECK(std::abs(gs.sector_sz) == 4);
    CHECK(std::abs(gs.state.amplitudes()(0)) == doctest::Approx(1.0)); // |0000>
}

TEST_CASE("variational bound of the ground energy") {
    std::mt19937 rng(83);
    const ChainSpec spec(Model::XXZ, 6, 1.0, 0.3, 0.7);
    const HermitianOperator h = build_hamiltonian(spec);
    const GroundStateResult gs = ground_state(spec);
    for (int trial = 0; trial < 100; ++trial) {
        const PureState phi = random_state(6, rng);
        const double energy =
            (phi.amplitudes().adjoint() * h.matrix() * phi.amplitudes())(0).real();
        CHECK(gs.energy <= energy + 1e-9);
    }
}

TEST_CASE("evolve basics and the full-matrix oracle") {
    std::mt19937 rng(89);
    const ChainSpec spec(Model::XXZ, 6, 1.0, 0.25, -0.4);
    const PureState psi = random_state(6, rng);

    SUBCASE("t = 0 is the identity") {
        const PureState out = evolve(spec, psi, 0.0);
        CHECK((out.amplitudes() - psi.amplitudes()).norm() < 1e-12);
    }

    SUBCASE("the ground state is stationary") {
        const GroundStateResult gs = ground_state(spec);
        const PureState out = evolve(spec, gs.state, 3.1);
        CHECK(std::abs(std::abs(gs.state.amplitudes().dot(out.amplitudes())) - 1.0) < 1e-10);
    }

    SUBCASE("per-sector evolution equals dense spectral evolution") {
        const HermitianOperator h = build_hamiltonian(spec);
        const Spectrum dense = hermitian_eig(h);
        for (double t : {0.7, 3.0, 12.0}) {
            const PureState blocked = evolve(spec, psi, t);
            const PureState full = evolve_spectral(dense, psi, t);
            CHECK((blocked.amplitudes() - full.amplitudes()).norm() < 1e-9);
        }
    }
}

TEST_CASE("energy and norm are conserved") {
    std::mt19937 rng(97);
    const ChainSpec spec(Model::XX, 8, 1.0, 0.6);
    const HermitianOperator h = build_hamiltonian(spec);
    const PureState psi = random_state(8, rng);
    const double e0 = (psi.amplitudes().adjoint() * h.matrix() * psi.amplitudes())(0).real();

    const auto blocks = make_blocked_spectrum(spec);
    const EvolutionPlan plan(blocks, psi);
    for (double t : {0.0, 1.0, 5.0, 20.0}) {
        const PureState out = plan.at(t);
        CHECK(std::abs(out.amplitudes().norm() - 1.0) < 1e-10);
        const double e =
            (out.amplitudes().adjoint() * h.matrix() * out.amplitudes())(0).real();
        CHECK(e == doctest::Approx(e0).epsilon(1e-9));
    }
}

TEST_CASE("spectrum cache returns shared decompositions") {
    SpectrumCache cache;
    const ChainSpec spec(Model::XX, 4, 1.0, 0.5);
    const auto a = cache.get(spec);
    const auto b = cache.get(spec);
    CHECK(a.get() == b.get());
    const auto c = cache.get(ChainSpec(Model::XX, 4, 1.0, 0.25));
    CHECK(a.get() != c.get());
}
