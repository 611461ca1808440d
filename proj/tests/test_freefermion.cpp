#include <doctest.h>

#include <cmath>

#include "dimerchain/freefermion.hpp"

using namespace dimerchain;

TEST_CASE("adjacency matrix carries the bond pattern") {
    const AdjacencyMatrix m2 = adjacency_matrix(ChainSpec(Model::XX, 2, 1.0, 0.5));
    REQUIRE(m2.hopping.size() == 1);
    CHECK(m2.hopping[0] == doctest::Approx(1.5));
    CHECK(m2.dense()(0, 1) == doctest::Approx(1.5));
    CHECK(m2.dense()(0, 0) == 0.0);

    const AdjacencyMatrix m4 = adjacency_matrix(ChainSpec(Model::XX, 4, 1.0, 0.8));
    CHECK(m4.hopping[0] == doctest::Approx(1.8));
    CHECK(m4.hopping[1] == doctest::Approx(0.2));
    CHECK(m4.hopping[2] == doctest::Approx(1.8));

    CHECK_THROWS_AS(adjacency_matrix(ChainSpec(Model::XXZ, 4, 1.0, 0.5, 0.3)), ContractError);
}

TEST_CASE("numeric spectrum of small chains") {
    const FermionSpectrum s2 = spectrum_numeric(adjacency_matrix(ChainSpec(Model::XX, 2, 1.0, 0.5)));
    CHECK(s2.lambdas(0) == doctest::Approx(-1.5));
    CHECK(s2.lambdas(1) == doctest::Approx(1.5));

    const FermionSpectrum s3 = spectrum_numeric(adjacency_matrix(ChainSpec(Model::XX, 3, 1.0, 0.0)));
    CHECK(s3.lambdas(0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s3.lambdas(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s3.lambdas(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("fermion spectra are symmetric about zero") {
    for (int n : {3, 4, 7, 10}) {
        for (double delta : {0.0, 0.4, 0.9}) {
            const FermionSpectrum s =
                spectrum_numeric(adjacency_matrix(ChainSpec(Model::XX, n, 1.0, delta)));
            for (int i = 0; i < n; ++i) {
                CHECK(s.lambdas(i) == doctest::Approx(-s.lambdas(n - 1 - i)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("odd-N closed form matches the numeric spectrum") {
    for (int n : {3, 5, 7, 9, 11}) {
        for (double delta : {0.0, 0.25, 0.5, 0.8, 0.95}) {
            const ChainSpec spec(Model::XX, n, 1.0, delta);
            const FermionSpectrum numeric = spectrum_numeric(adjacency_matrix(spec));
            const FermionSpectrum formula = spectrum_formula_odd(spec);
            REQUIRE(formula.lambdas.size() == n);
            const double dev = (formula.lambdas - numeric.lambdas).cwiseAbs().maxCoeff();
            CHECK(dev < 1e-10);
        }
    }
    CHECK_THROWS_AS(spectrum_formula_odd(ChainSpec(Model::XX, 4, 1.0, 0.5)),
                    std::invalid_argument);
}

TEST_CASE("odd-N spectrum has exactly one zero mode") {
    for (int n : {3, 5, 9}) {
        const FermionSpectrum s = spectrum_formula_odd(ChainSpec(Model::XX, n, 1.0, 0.6));
        int zeros = 0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(s.lambdas(i)) < 1e-12) ++zeros;
        }
        CHECK(zeros == 1);
    }
}

TEST_CASE("transcendental roots have tiny residuals and full count") {
    for (int n : {2, 4, 6, 8, 10}) {
        for (double delta : {0.0, 0.5, 0.8}) {
            const XnuRoots roots = solve_xnu(ChainSpec(Model::XX, n, 1.0, delta));
            CHECK(static_cast<int>(roots.roots.size()) == n / 2);
            CHECK(roots.max_residual < 1e-10);
            CHECK_FALSE(roots.deficit());
            CHECK(roots.regime == "r < (N+2)/N");
            for (double x : roots.roots) {
                CHECK(x > 0.0);
                CHECK(x < 3.14159265358979323846);
            }
        }
    }
    CHECK_THROWS_AS(solve_xnu(ChainSpec(Model::XX, 3, 1.0, 0.5)), std::invalid_argument);
}

TEST_CASE("uniform-chain roots solve the closed combination") {
    // At delta = 0 the equation factorizes; roots sit at 2 pi m / (N+1).
    const int n = 6;
    const XnuRoots roots = solve_xnu(ChainSpec(Model::XX, n, 1.0, 0.0));
    REQUIRE(roots.roots.size() == 3);
    for (std::size_t m = 1; m <= roots.roots.size(); ++m) {
        CHECK(roots.roots[m - 1] ==
              doctest::Approx(2.0 * 3.14159265358979323846 * m / (n + 1)).epsilon(1e-9));
    }
}

TEST_CASE("even-N closed form: the doubled-cosine variant is the correct one") {
    for (int n : {2, 4, 6, 8}) {
        for (double delta : {0.0, 0.25, 0.8}) {
            const EvenSpectrumReport report =
                spectrum_formula_even(ChainSpec(Model::XX, n, 1.0, delta));
            CHECK(report.max_dev_cosine_doubled < 1e-9);
            // The printed coefficient only coincides at delta = 1 limits; at
            // these deltas it must deviate.
            CHECK(report.max_dev_printed > 1e-3);
        }
    }
    CHECK_THROWS_AS(spectrum_formula_even(ChainSpec(Model::XX, 5, 1.0, 0.5)),
                    std::invalid_argument);
}

TEST_CASE("occupation sums enumerate tiny systems") {
    RealVector one(1);
    one << 2.0;
    const auto sums1 = many_body_energies(FermionSpectrum{one, SpectrumSource::Numeric});
    CHECK(sums1 == std::vector<double>{0.0, 2.0});

    RealVector two(2);
    two << -1.0, 1.0;
    const auto sums2 = many_body_energies(FermionSpectrum{two, SpectrumSource::Numeric});
    CHECK(sums2 == std::vector<double>{-1.0, 0.0, 0.0, 1.0});

    RealVector big = RealVector::Zero(13);
    CHECK_THROWS_AS(many_body_energies(FermionSpectrum{big, SpectrumSource::Numeric}, 12),
                    CapacityError);
}

TEST_CASE("Jordan-Wigner equivalence for the N=6 chain") {
    const ChainSpec spec(Model::XX, 6, 1.0, 0.7);
    const FermionSpectrum fermions = spectrum_numeric(adjacency_matrix(spec));
    const std::vector<double> sums = many_body_energies(fermions);

    const Spectrum spins = hermitian_eig(build_xx(spec));
    REQUIRE(static_cast<Eigen::Index>(sums.size()) == spins.eigenvalues.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        CHECK(sums[i] ==
              doctest::Approx(spins.eigenvalues(static_cast<Eigen::Index>(i))).epsilon(1e-9));
    }
}
