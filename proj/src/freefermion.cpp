#include "dimerchain/freefermion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace dimerchain {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dimer_ratio(const ChainSpec& spec) {
    return (1.0 - spec.delta) / (1.0 + spec.delta);
}

RealVector sorted_pm_pairs(const std::vector<double>& positives, bool with_zero,
                           double j_scale) {
    std::vector<double> all;
    all.reserve(2 * positives.size() + (with_zero ? 1 : 0));
    for (double v : positives) {
        all.push_back(j_scale * v);
        all.push_back(-j_scale * v);
    }
    if (with_zero) all.push_back(0.0);
    std::sort(all.begin(), all.end());
    RealVector out(static_cast<Eigen::Index>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) out(static_cast<Eigen::Index>(i)) = all[i];
    return out;
}

} // namespace

RealMatrix AdjacencyMatrix::dense() const {
    RealMatrix m = RealMatrix::Zero(n, n);
    for (int j = 1; j < n; ++j) {
        m(j - 1, j) = hopping[j - 1];
        m(j, j - 1) = hopping[j - 1];
    }
    return m;
}

AdjacencyMatrix adjacency_matrix(const ChainSpec& spec) {
    spec.validate();
    if (spec.model != Model::XX) {
        throw ContractError("adjacency_matrix: free-fermion mapping applies to the XX model");
    }
    AdjacencyMatrix m;
    m.n = spec.n_sites;
    m.hopping.resize(spec.n_sites - 1);
    for (int j = 1; j < spec.n_sites; ++j) {
        m.hopping[j - 1] = spec.j_coupling * coupling_at(j, spec);
    }
    return m;
}

FermionSpectrum spectrum_numeric(const AdjacencyMatrix& m) {
    if (m.n < 1 || static_cast<int>(m.hopping.size()) != m.n - 1) {
        throw ContractError("spectrum_numeric: malformed adjacency matrix");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("spectrum_numeric: eigensolver failed");
    }
    return FermionSpectrum{es.eigenvalues(), SpectrumSource::Numeric};
}

FermionSpectrum spectrum_formula_odd(const ChainSpec& spec) {
    spec.validate();
    if (spec.n_sites % 2 == 0) {
        throw std::invalid_argument("spectrum_formula_odd: N must be odd");
    }
    const int n = spec.n_sites;
    const double r = dimer_ratio(spec);
    const double scale = spec.j_coupling * (1.0 + spec.delta);

    std::vector<double> positives;
    for (int k = 1; k <= (n - 1) / 2; ++k) {
        const double dk = 1.0 + 2.0 * r * std::cos(2.0 * kPi * k / (n + 1)) + r * r;
        positives.push_back(std::sqrt(std::max(dk, 0.0)));
    }
    return FermionSpectrum{sorted_pm_pairs(positives, true, scale), SpectrumSource::FormulaOdd};
}

XnuRoots solve_xnu(const ChainSpec& spec, int panels) {
    spec.validate();
    if (spec.n_sites % 2 != 0) {
        throw std::invalid_argument("solve_xnu: N must be even");
    }
    if (panels < 2) {
        throw std::invalid_argument("solve_xnu: need at least 2 panels");
    }
    const int n = spec.n_sites;
    const double r = dimer_ratio(spec);
    const auto f = [n, r](double x) {
        return r * std::sin(0.5 * n * x) + std::sin((0.5 * n + 1.0) * x);
    };

    XnuRoots out;
    out.expected = n / 2;
    out.regime = r < static_cast<double>(n + 2) / n ? "r < (N+2)/N" : "r >= (N+2)/N";

    // Scan the open interval; x = 0 and x = pi are boundary zeros of f for
    // every even N and are not eigenmode roots.
    double prev_x = kPi / panels;
    double prev_f = f(prev_x);
    for (int i = 2; i < panels; ++i) {
        const double x = kPi * i / panels;
        const double fx = f(x);
        if (prev_f == 0.0) {
            out.roots.push_back(prev_x);
        } else if (prev_f * fx < 0.0) {
            double lo = prev_x, hi = x;
            double flo = prev_f;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                } else if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    std::sort(out.roots.begin(), out.roots.end());
    out.max_residual = 0.0;
    for (double x : out.roots) {
        out.max_residual = std::max(out.max_residual, std::abs(f(x)));
    }
    return out;
}

EvenSpectrumReport spectrum_formula_even(const ChainSpec& spec) {
    const int n = spec.n_sites;
    EvenSpectrumReport report;
    report.roots = solve_xnu(spec);

    const double r = dimer_ratio(spec);
    const double scale = spec.j_coupling * (1.0 + spec.delta);
    std::vector<double> printed, doubled;
    for (double x : report.roots.roots) {
        printed.push_back(std::sqrt(std::max(1.0 + r * std::cos(x) + r * r, 0.0)));
        doubled.push_back(std::sqrt(std::max(1.0 + 2.0 * r * std::cos(x) + r * r, 0.0)));
    }
    report.printed = FermionSpectrum{sorted_pm_pairs(printed, false, scale),
                                     SpectrumSource::FormulaEven};
    report.cosine_doubled = FermionSpectrum{sorted_pm_pairs(doubled, false, scale),
                                            SpectrumSource::FormulaEven};

    const FermionSpectrum numeric = spectrum_numeric(adjacency_matrix(spec));
    const auto max_dev = [&numeric, n](const FermionSpectrum& fs) {
        if (fs.lambdas.size() != n) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return (fs.lambdas - numeric.lambdas).cwiseAbs().maxCoeff();
    };
    report.max_dev_printed = max_dev(report.printed);
    report.max_dev_cosine_doubled = max_dev(report.cosine_doubled);
    return report;
}

std::vector<double> many_body_energies(const FermionSpectrum& fs, int max_n) {
    const int n = static_cast<int>(fs.lambdas.size());
    if (n > max_n) {
        throw CapacityError("many_body_energies: " + std::to_string(n) +
                            " modes exceed the cap of " + std::to_string(max_n));
    }
    std::vector<double> sums{0.0};
    sums.reserve(std::size_t{1} << n);
    for (int k = 0; k < n; ++k) {
        const std::size_t m = sums.size();
        for (std::size_t i = 0; i < m; ++i) {
            sums.push_back(sums[i] + fs.lambdas(k));
        }
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

} // namespace dimerchain
