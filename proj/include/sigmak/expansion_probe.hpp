#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "sigmak/symfun.hpp"

namespace sigmak {

/// Remainders of sigma_k(D + tB) after subtracting the known expansion
/// terms, probed at t = 1e-1, 1e-2, 1e-3:
///   r1(t) = sigma_k(D+tB) - sigma_k(mu) - t * first_order
///   r2(t) = r1(t) - t^2 * second_order
/// r1 should shrink like t^2 and r2 like t^3. `floor` estimates the
/// roundoff level of each evaluation; below it the remainders are noise.
struct RemainderProbe {
    std::array<double, 3> t{0.1, 0.01, 0.001};
    std::array<double, 3> r1{};
    std::array<double, 3> r2{};
    std::array<double, 3> floor{};
    double first = 0.0;
    double second = 0.0;
};

[[nodiscard]] inline RemainderProbe probe_remainders(std::span<const double> mu,
                                                     const SymMatrix& b, int k) {
    RemainderProbe p;
    const SymMatrix d = SymMatrix::diagonal(mu);
    const double s0 = sigma_k_matrix(d, k);
    p.first = expansion_first_order(mu, b, k);
    p.second = (k >= 2) ? expansion_second_order(mu, b, k) : 0.0;
    for (int q = 0; q < 3; ++q) {
        const double t = p.t[static_cast<std::size_t>(q)];
        const double st = sigma_k_matrix(add_scaled(d, t, b), k);
        const double r1 = st - s0 - t * p.first;
        p.r1[static_cast<std::size_t>(q)] = r1;
        p.r2[static_cast<std::size_t>(q)] = r1 - t * t * p.second;
        p.floor[static_cast<std::size_t>(q)] =
            512.0 * std::numeric_limits<double>::epsilon() *
            (std::fabs(st) + std::fabs(s0) + std::fabs(t * p.first) +
             std::fabs(t * t * p.second) + 1.0);
    }
    return p;
}

/// One consecutive-t pair of a Richardson ratio test: the decay ratio
/// |r(coarse)| / |r(fine)| must land in [lo, hi], unless the fine value
/// has already dropped to roundoff (then the decay is at least as fast
/// as claimed).
[[nodiscard]] inline bool ratio_pair_ok(double r_coarse, double r_fine, double floor_fine,
                                        double lo, double hi) {
    if (std::fabs(r_fine) <= floor_fine) return true;
    const double ratio = std::fabs(r_coarse) / std::fabs(r_fine);
    return ratio >= lo && ratio <= hi;
}

/// The order estimate comes from the finest consecutive pair; the coarse
/// pair still feels the next polynomial term (for k >= 3 its ratio can
/// sit far from the asymptote even when the order is right) and is kept
/// for diagnostics only.
[[nodiscard]] inline bool window_ok(const std::array<double, 3>& r,
                                    const std::array<double, 3>& floor, double lo, double hi) {
    return ratio_pair_ok(r[1], r[2], floor[2], lo, hi);
}

/// r2 shrinks like t^3: ratio window [800, 1200] across each tenfold
/// refinement. Exact (1000 or pure roundoff) for k <= 3, since
/// sigma_k(D+tB) is a polynomial of degree k in t.
[[nodiscard]] inline bool second_order_window_ok(const RemainderProbe& p) {
    return window_ok(p.r2, p.floor, 800.0, 1200.0);
}

/// r1 shrinks like t^2: ratio window [80, 120]. Exact for k = 2. For
/// k >= 3 a cubic tail can dwarf a small quadratic coefficient and push
/// the ratio out of the window even though r1 is O(t^2); in that case the
/// claim still holds algebraically whenever the rest after the exact
/// t^2 * second term passes the O(t^3) check, so fall back to that.
[[nodiscard]] inline bool first_order_window_ok(const RemainderProbe& p) {
    if (window_ok(p.r1, p.floor, 80.0, 120.0)) return true;
    const double quad = std::fabs(p.t[2] * p.t[2] * p.second);
    const bool quadratic_dominated = quad >= 2.0 * std::fabs(p.r2[2]);
    return !quadratic_dominated && second_order_window_ok(p);
}

}  // namespace sigmak
