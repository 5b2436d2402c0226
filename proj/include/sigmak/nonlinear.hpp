#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sigmak/elliptic.hpp"
#include "sigmak/geometry.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/mu_construct.hpp"
#include "sigmak/parallel.hpp"
#include "sigmak/psi_parser.hpp"

namespace sigmak {

/// curvature: sigma_k of the principal curvatures of the graph of u.
/// hessian:   sigma_k of the eigenvalues of the Hessian of u.
enum class SolveMode { curvature, hessian };

struct SolverConfig {
    int n;
    int k;
    SolveMode mode;
    MuVector mu;
    PsiExpr psi;
    double epsilon;
    GridSpec grid;
    int max_iter = 50;
    double tol = 1e-9;

    /// Full invariant check; throws std::domain_error / invalid_argument
    /// on violations. The seed must hit sigma_k(mu) = psi(0), because the
    /// whole scaling argument pivots on the zeroth-order term cancelling.
    void validate() const {
        if (n < 2 || n > 3) throw std::domain_error("SolverConfig: n must be 2 or 3");
        if (k < 1 || k > n) throw std::domain_error("SolverConfig: need 1 <= k <= n");
        if (grid.n != n) throw std::invalid_argument("SolverConfig: grid dimension mismatch");
        if (!(epsilon > 0.0)) throw std::domain_error("SolverConfig: epsilon must be positive");
        if (!(tol > 0.0)) throw std::domain_error("SolverConfig: tol must be positive");
        if (max_iter < 0) throw std::domain_error("SolverConfig: max_iter must be >= 0");
        if (psi.n_vars() != n) throw std::invalid_argument("SolverConfig: psi arity mismatch");
        if (mu.n != n || mu.k != k)
            throw std::invalid_argument("SolverConfig: seed built for different (n, k)");
        const double at_origin = psi.eval_origin();
        if (std::fabs(mu.M - at_origin) > 1e-9 * (1.0 + std::fabs(at_origin)))
            throw std::invalid_argument("SolverConfig: seed target differs from psi(0)");
        if (!validate_mu(mu).pass)
            throw std::invalid_argument("SolverConfig: seed fails its invariants");
    }
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    double final_w_maxnorm = 0.0;
    double epsilon = 0.0;
    /// Empty on success; explains an abandoned iteration otherwise.
    std::string note;
};

/// The scaled residual F(w, eps) at every interior node. With physical
/// coordinates xt = eps^2 x and the ansatz
///   u(xt) = (1/2) sum mu_i xt_i^2 + eps^5 w(xt / eps^2),
/// the chain rule gives exactly
///   du/dxt_i    = eps^2 mu_i x_i + eps^3 dw/dx_i,
///   d2u/dxt_ij  = mu_i delta_ij + eps d2w/dx_ij,
/// so u itself is never differenced. The returned value is
///   (sigma_k(A) - psi(xt)) / eps,
/// where A is the curvature matrix of u (curvature mode) or its Hessian
/// (hessian mode). Boundary nodes are zero.
[[nodiscard]] inline ScalarField residual_F(const ScalarField& w, const SolverConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw std::domain_error("residual_F: epsilon must be positive");
    if (!(w.grid() == cfg.grid)) throw std::invalid_argument("residual_F: grid mismatch");
    const GridSpec& g = cfg.grid;
    const double eps = cfg.epsilon;
    const double eps2 = eps * eps;
    const double eps3 = eps2 * eps;
    ScalarField out(g);
    parallel_for(w.size(), [&](std::int64_t node) {
        if (!g.is_interior(node)) return;
        const std::array<int, 3> idx = g.decode(node);
        const std::array<double, 3> grad_w = fd_gradient(w, node);
        const SymMatrix hess_w = fd_hessian(w, node);

        std::array<double, 3> xt{0.0, 0.0, 0.0};
        std::array<double, 3> grad_u{0.0, 0.0, 0.0};
        SymMatrix a(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double xi = g.coord(idx[static_cast<std::size_t>(i)]);
            xt[static_cast<std::size_t>(i)] = eps2 * xi;
            grad_u[static_cast<std::size_t>(i)] =
                eps2 * cfg.mu.mu[static_cast<std::size_t>(i)] * xi +
                eps3 * grad_w[static_cast<std::size_t>(i)];
            for (int j = i; j < g.n; ++j) {
                const double diag = (i == j) ? cfg.mu.mu[static_cast<std::size_t>(i)] : 0.0;
                a.set(i, j, diag + eps * hess_w(i, j));
            }
        }
        if (cfg.mode == SolveMode::curvature) {
            a = curvature_matrix(
                    std::span<const double>(grad_u.data(), static_cast<std::size_t>(g.n)), a)
                    .a;
        }
        const double psi_val = cfg.psi.eval(xt);
        out[node] = (sigma_k_matrix(a, cfg.k) - psi_val) / eps;
    });
    return out;
}

struct PicardResult {
    ScalarField w;
    ScalarField residual;  // residual_F at the returned w
    SolveReport report;
};

/// Picard iteration with the frozen constant-coefficient operator
/// L = sum_i sigma_{k-1}(mu|i) d_ii, the discrete counterpart of solving
/// F(w, eps) = 0 by the implicit function theorem around (0, 0):
///   w <- w + L^{-1}(-F(w)).
/// Stops when the interior max norm of F drops below tol. Three
/// consecutive residual increases abandon the run and suggest a smaller
/// epsilon instead of silently retrying.
[[nodiscard]] inline PicardResult picard_solve(const SolverConfig& cfg) {
    cfg.validate();
    std::vector<double> coeffs(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i)
        coeffs[static_cast<std::size_t>(i)] = sigma_deleted(cfg.mu.mu, cfg.k - 1, i);
    const EllipticOperator lin(std::move(coeffs), cfg.grid);

    PicardResult result{ScalarField(cfg.grid), ScalarField(cfg.grid), {}};
    SolveReport& report = result.report;
    report.epsilon = cfg.epsilon;

    result.residual = residual_F(result.w, cfg);
    double res = result.residual.max_abs_interior();
    report.residual_history.push_back(res);
    if (res <= cfg.tol) {
        report.converged = true;
        return result;
    }

    int grew = 0;
    for (int m = 1; m <= cfg.max_iter; ++m) {
        ScalarField rhs(cfg.grid);
        for (std::int64_t i = 0; i < rhs.size(); ++i) rhs[i] = -result.residual[i];
        result.w += solve_dirichlet(lin, rhs);

        result.residual = residual_F(result.w, cfg);
        const double next = result.residual.max_abs_interior();
        report.residual_history.push_back(next);
        report.iterations = m;
        if (next <= cfg.tol) {
            report.converged = true;
            break;
        }
        grew = (next > res) ? grew + 1 : 0;
        res = next;
        if (grew >= 3) {
            report.note = "residual grew for 3 consecutive iterations; epsilon " +
                          std::to_string(cfg.epsilon) + " is likely too large, try " +
                          std::to_string(cfg.epsilon / 2.0);
            break;
        }
    }
    if (!report.converged && report.note.empty())
        report.note = "residual " + std::to_string(res) + " still above tol after " +
                      std::to_string(report.iterations) + " iterations";
    report.final_w_maxnorm = result.w.max_abs();
    return result;
}

/// Samples of the physical solution u(xt) = (1/2) sum mu_i xt_i^2
/// + eps^5 w on the solver grid; node i sits at xt = eps^2 x_i.
[[nodiscard]] inline ScalarField reconstruct_u(const ScalarField& w, const SolverConfig& cfg) {
    const GridSpec& g = cfg.grid;
    const double eps2 = cfg.epsilon * cfg.epsilon;
    const double eps5 = std::pow(cfg.epsilon, 5);
    ScalarField u(g);
    for (std::int64_t node = 0; node < u.size(); ++node) {
        const std::array<int, 3> idx = g.decode(node);
        double quad = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double xti = eps2 * g.coord(idx[static_cast<std::size_t>(i)]);
            quad += 0.5 * cfg.mu.mu[static_cast<std::size_t>(i)] * xti * xti;
        }
        u[node] = quad + eps5 * w[node];
    }
    return u;
}

/// Independent check of a solution: difference the u samples themselves
/// in physical coordinates (spacing eps^2 h) with double-width stencils,
/// rebuild sigma_k, and report |sigma_k - psi(xt)| pointwise. Using the
/// doubled step keeps this path's truncation error independent of the
/// solver's own stencils, so the error it reports shrinks like h^2 for a
/// correct solution instead of collapsing to the iteration floor. Nodes
/// closer than 2 to the boundary (the stencil reach) are zero.
[[nodiscard]] inline ScalarField verify_solution(const ScalarField& u, const SolverConfig& cfg) {
    if (!(u.grid() == cfg.grid)) throw std::invalid_argument("verify_solution: grid mismatch");
    const GridSpec& g = cfg.grid;
    const double eps2 = cfg.epsilon * cfg.epsilon;
    const double spacing = 2.0 * eps2 * g.h();
    ScalarField err(g);
    parallel_for(u.size(), [&](std::int64_t node) {
        if (g.boundary_distance(node) < 2) return;
        const std::array<int, 3> idx = g.decode(node);
        const std::array<double, 3> grad_u = fd_gradient_step(u, node, 2, spacing);
        SymMatrix a = fd_hessian_step(u, node, 2, spacing);
        if (cfg.mode == SolveMode::curvature) {
            a = curvature_matrix(
                    std::span<const double>(grad_u.data(), static_cast<std::size_t>(g.n)), a)
                    .a;
        }
        std::array<double, 3> xt{0.0, 0.0, 0.0};
        for (int i = 0; i < g.n; ++i)
            xt[static_cast<std::size_t>(i)] = eps2 * g.coord(idx[static_cast<std::size_t>(i)]);
        err[node] = std::fabs(sigma_k_matrix(a, cfg.k) - cfg.psi.eval(xt));
    });
    return err;
}

}  // namespace sigmak
