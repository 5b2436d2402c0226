#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sigmak/symfun.hpp"

namespace sigmak {

/// Thrown when the requested problem falls in a regime this solver does
/// not cover (detached from plain parameter errors on purpose: the CLI
/// reports the two differently).
class unsupported_regime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Diagonal seed for u0 = (1/2) sum mu_i x_i^2: sigma_k(mu) hits the
/// target M and every deleted function sigma_{k-1}(mu|i) stays strictly
/// positive, which is what keeps the linearized operator uniformly
/// elliptic whatever the sign of M.
struct MuVector {
    RealVector mu;
    int n = 0;
    int k = 0;
    double M = 0.0;
    /// min_i sigma_{k-1}(mu|i), recomputed from the entries.
    double margin = 0.0;
};

struct MuValidation {
    double sigma_error = 0.0;  // sigma_k(mu) - M
    double margin = 0.0;       // min_i sigma_{k-1}(mu|i)
    bool pass = false;
};

/// Recompute both seed invariants from scratch: the sigma_k target
/// (relative 1e-9) and strict positivity of every deleted function.
[[nodiscard]] inline MuValidation validate_mu(const MuVector& v) {
    MuValidation r;
    if (v.n < 1 || static_cast<int>(v.mu.size()) != v.n || v.k < 1 || v.k > v.n) return r;
    r.sigma_error = sigma(v.mu, v.k) - v.M;
    r.margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.n; ++i)
        r.margin = std::min(r.margin, sigma_deleted(v.mu, v.k - 1, i));
    r.pass = std::fabs(r.sigma_error) <= 1e-9 * (1.0 + std::fabs(v.M)) && r.margin > 0.0;
    return r;
}

namespace detail {

inline MuVector finish_mu(RealVector mu, int n, int k, double M, const char* who) {
    MuVector v{std::move(mu), n, k, M, 0.0};
    const MuValidation check = validate_mu(v);
    if (!check.pass)
        throw std::logic_error(std::string(who) + ": constructed seed failed validation"
                               " (sigma error " + std::to_string(check.sigma_error) +
                               ", margin " + std::to_string(check.margin) + ")");
    v.margin = check.margin;
    return v;
}

}  // namespace detail

/// Seed with the first n-1 entries equal to a given leading value N > 0
/// and the last entry solved from sigma_k(mu) = M:
///   mu_n = (M - C(n-1,k) N^k) / (C(n-1,k-1) N^{k-1}).
/// For N below the threshold used by construct_mu the margin may be
/// nonpositive, so this building block does not validate; callers check.
[[nodiscard]] inline MuVector mu_from_leading_value(int n, int k, double M, double N) {
    if (n < 3 || k < 2 || k > n - 1)
        throw std::domain_error("mu_from_leading_value: need n >= 3 and 2 <= k <= n-1");
    if (!(N > 0.0)) throw std::domain_error("mu_from_leading_value: need N > 0");
    RealVector mu(static_cast<std::size_t>(n), N);
    mu.back() = (M - binomial(n - 1, k) * std::pow(N, k)) /
                (binomial(n - 1, k - 1) * std::pow(N, k - 1));
    MuVector v{std::move(mu), n, k, M, 0.0};
    v.margin = validate_mu(v).margin;
    return v;
}

/// The general ellipticity-preserving seed, any sign of M. Entries
/// mu_1 = ... = mu_{n-1} = N with
///   N = max(1, (2|M| C(n-2,k-2) / (theta C(n-2,k-1)^2))^{1/k}),
///   theta = (n-1)/(k(n-k)),
/// and mu_n solved from the target. This choice of N makes the Newton
/// inequality estimate for sigma_{k-1}(mu|i) at least half its leading
/// term, so the margin is strictly positive and grows like N^{k-1}.
/// theta is the exact simplification of 1 - (k-1)(n-k-1)/(k(n-k)).
///
/// k = 1 (mean curvature) needs no construction: the flat seed M/n per
/// entry already has sigma_0(mu|i) = 1 > 0.
[[nodiscard]] inline MuVector construct_mu(int n, int k, double M) {
    if (k == 1) {
        if (n < 1) throw std::domain_error("construct_mu: need n >= 1");
        RealVector mu(static_cast<std::size_t>(n), M / n);
        return detail::finish_mu(std::move(mu), n, k, M, "construct_mu");
    }
    if (n < 3 || k < 2 || k > n - 1)
        throw std::domain_error("construct_mu: need 2 <= k <= n-1 (and n >= 3)");
    const double theta = static_cast<double>(n - 1) /
                         (static_cast<double>(k) * static_cast<double>(n - k));
    const double c1 = binomial(n - 2, k - 2);
    const double c2 = binomial(n - 2, k - 1);
    const double N = std::max(1.0, std::pow(2.0 * std::fabs(M) * c1 / (theta * c2 * c2),
                                            1.0 / static_cast<double>(k)));
    MuVector v = mu_from_leading_value(n, k, M, N);
    return detail::finish_mu(std::move(v.mu), n, k, M, "construct_mu");
}

/// All-equal positive seed (M/C(n,k))^{1/k}: same target, and the
/// corresponding u0 is convex, so the solution it anchors is too.
[[nodiscard]] inline MuVector convex_mu(int n, int k, double M) {
    if (n < 1 || k < 1 || k > n) throw std::domain_error("convex_mu: need 1 <= k <= n");
    if (!(M > 0.0)) throw std::domain_error("convex_mu: needs a positive target M");
    const double N = std::pow(M / binomial(n, k), 1.0 / static_cast<double>(k));
    RealVector mu(static_cast<std::size_t>(n), N);
    return detail::finish_mu(std::move(mu), n, k, M, "convex_mu");
}

/// Seed for the Gauss case k = n, elliptic regime only: all entries
/// M^{1/n}, so sigma_n(mu) = M and sigma_{n-1}(mu|i) = M^{(n-1)/n} > 0.
/// M <= 0 (degenerate or hyperbolic Gauss curvature) is out of scope.
[[nodiscard]] inline MuVector gauss_mu(int n, double M) {
    if (n < 1) throw std::domain_error("gauss_mu: need n >= 1");
    if (!(M > 0.0))
        throw unsupported_regime_error(
            "gauss_mu: k = n requires psi(0) > 0; the degenerate and "
            "sign-changing Gauss regimes are not supported");
    RealVector mu(static_cast<std::size_t>(n), std::pow(M, 1.0 / static_cast<double>(n)));
    return detail::finish_mu(std::move(mu), n, n, M, "gauss_mu");
}

}  // namespace sigmak
