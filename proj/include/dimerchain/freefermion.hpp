#pragma once

#include <string>
#include <vector>

#include "dimerchain/hamiltonian.hpp"
#include "dimerchain/numerics.hpp"

namespace dimerchain {

// One-particle hopping matrix of the XX chain: symmetric tridiagonal with
// zero diagonal and bond j carrying J (1 + (-1)^{j+1} delta).
struct AdjacencyMatrix {
    int n = 0;
    std::vector<double> hopping; // n-1 entries, hopping[j-1] for bond j

    RealMatrix dense() const;
};

enum class SpectrumSource { Numeric, FormulaOdd, FormulaEven };

// One-particle energies, ascending; symmetric about zero as a multiset.
struct FermionSpectrum {
    RealVector lambdas;
    SpectrumSource source = SpectrumSource::Numeric;
};

AdjacencyMatrix adjacency_matrix(const ChainSpec& spec);

// Ascending eigenvalues of M; the ground truth the closed forms are compared
// against.
FermionSpectrum spectrum_numeric(const AdjacencyMatrix& m);

// Odd-N closed form: lambda = +-J(1+delta) sqrt(Delta_k) with
// Delta_k = 1 + 2 r cos(2 pi k / (N+1)) + r^2, r = (1-delta)/(1+delta),
// plus one zero mode.
FermionSpectrum spectrum_formula_odd(const ChainSpec& spec);

// Roots of r sin(N x / 2) + sin((N/2 + 1) x) = 0 on (0, pi), found by
// sign-change bracketing and bisection.
struct XnuRoots {
    std::vector<double> roots; // ascending
    int expected = 0;          // N/2
    double max_residual = 0.0;
    std::string regime;        // r relative to (N+2)/N

    bool deficit() const { return static_cast<int>(roots.size()) < expected; }
};

XnuRoots solve_xnu(const ChainSpec& spec, int panels = 10000);

// Even-N closed form evaluated in two variants: the coefficient printed on
// the cosine term (1) and the coefficient matching the odd-N structure (2).
// Each is compared against the numeric spectrum.
struct EvenSpectrumReport {
    FermionSpectrum printed;        // 1 + r cos(x) + r^2
    FermionSpectrum cosine_doubled; // 1 + 2 r cos(x) + r^2
    double max_dev_printed = 0.0;
    double max_dev_cosine_doubled = 0.0;
    XnuRoots roots;
};

EvenSpectrumReport spectrum_formula_even(const ChainSpec& spec);

// All 2^n occupation sums sum_k n_k lambda_k, ascending (with multiplicity).
std::vector<double> many_body_energies(const FermionSpectrum& fs, int max_n = 12);

} // namespace dimerchain
