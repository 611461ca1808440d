#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dimerchain::detail {

struct ScanBest {
    double t = 0.0;
    double value = -1.0;
    bool found = false;
};

// Values within this distance of the maximum count as ties, so the
// earliest-t rule is stable against roundoff on flat curves.
inline constexpr double kTieTolerance = 1e-12;

// Maximizes eval over {0, dt, ..., t_max} then ternary-refines the bracketing
// interval to a time resolution of dt/100. eval returns nullopt for invalid
// points (e.g. zero-probability branches), which are skipped. Ties resolve to
// the earliest t.
inline ScanBest scan_maximize(const std::function<std::optional<double>(double)>& eval,
                              double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("scan_maximize: t_max and dt must be positive");
    }
    const long steps = static_cast<long>(std::floor(t_max / dt + 1e-9));

    std::vector<std::optional<double>> values(steps + 1);
    double top = -1.0;
    bool found = false;
    for (long i = 0; i <= steps; ++i) {
        values[i] = eval(i * dt);
        if (values[i] && (!found || *values[i] > top)) {
            top = *values[i];
            found = true;
        }
    }
    ScanBest best;
    if (!found) return best;

    long best_i = 0;
    for (long i = 0; i <= steps; ++i) {
        if (values[i] && *values[i] >= top - kTieTolerance) {
            best_i = i;
            break;
        }
    }
    best = {best_i * dt, *values[best_i], true};

    double lo = best_i > 0 ? (best_i - 1) * dt : 0.0;
    double hi = best_i < steps ? (best_i + 1) * dt : best.t;
    const double resolution = dt / 100.0;
    while (hi - lo > resolution) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const double v1 = eval(m1).value_or(-1.0);
        const double v2 = eval(m2).value_or(-1.0);
        if (v1 < v2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    const double t_mid = 0.5 * (lo + hi);
    const auto v_mid = eval(t_mid);
    if (v_mid) {
        if (*v_mid > best.value + kTieTolerance ||
            (*v_mid >= best.value - kTieTolerance && t_mid < best.t)) {
            best.t = t_mid;
            best.value = *v_mid;
        }
    }
    return best;
}

} // namespace dimerchain::detail
