#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sigmak/grid.hpp"
#include "sigmak/parallel.hpp"
#include "sigmak/symfun.hpp"

namespace sigmak {

/// The constant-coefficient operator L = sum_i c_i d^2/dx_i^2 with every
/// c_i > 0 (the c_i are the deleted functions sigma_{k-1}(mu|i), so the
/// seed's margin is exactly what guarantees ellipticity here).
struct EllipticOperator {
    std::vector<double> coeffs;
    GridSpec grid;

    EllipticOperator(std::vector<double> c, const GridSpec& g) : coeffs(std::move(c)), grid(g) {
        if (static_cast<int>(coeffs.size()) != grid.n)
            throw std::invalid_argument("EllipticOperator: one coefficient per axis");
        for (double v : coeffs)
            if (!(v > 0.0))
                throw std::domain_error("EllipticOperator: coefficients must be positive"
                                        " (lost ellipticity)");
    }
};

/// Apply L with the 2n+1-point stencil at interior nodes; boundary nodes
/// are set to zero. Neighbor values are read as-is, so a field carrying
/// exact boundary data differentiates exactly on quadratics.
[[nodiscard]] inline ScalarField apply_L(const EllipticOperator& op, const ScalarField& v) {
    if (!(v.grid() == op.grid)) throw std::invalid_argument("apply_L: grid mismatch");
    const GridSpec& g = op.grid;
    const std::array<std::int64_t, 3> s = g.strides();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    ScalarField out(g);
    parallel_for(v.size(), [&](std::int64_t node) {
        if (!g.is_interior(node)) return;
        double acc = 0.0;
        for (int a = 0; a < g.n; ++a) {
            const std::int64_t d = s[static_cast<std::size_t>(a)];
            acc += op.coeffs[static_cast<std::size_t>(a)] * (v[node + d] - 2.0 * v[node] + v[node - d]);
        }
        out[node] = acc * inv_h2;
    });
    return out;
}

/// Solve L v = rhs with v = 0 on the boundary. With positive c_i the
/// stencil of -L is symmetric positive definite under these conditions,
/// so conjugate gradients with (constant) diagonal preconditioning is run
/// on -L v = -rhs. Converges when the residual rhs - L v is below
/// 1e-10 * (1 + max|rhs|) in the max norm over interior nodes; past
/// 50*G iterations it gives up and reports the residual it reached.
[[nodiscard]] inline ScalarField solve_dirichlet(const EllipticOperator& op,
                                                 const ScalarField& rhs) {
    if (!(rhs.grid() == op.grid)) throw std::invalid_argument("solve_dirichlet: grid mismatch");
    const GridSpec& g = op.grid;
    const std::int64_t total = rhs.size();

    double rhs_max = rhs.max_abs_interior();
    const double tol = 1e-10 * (1.0 + rhs_max);

    // b = -rhs on interior nodes; unknowns live on interior nodes only,
    // boundary entries of every CG vector stay exactly zero.
    ScalarField x(g), r(g), p(g);
    for (std::int64_t i = 0; i < total; ++i)
        if (g.is_interior(i)) r[i] = -rhs[i];

    double diag = 0.0;
    for (int a = 0; a < g.n; ++a) diag += op.coeffs[static_cast<std::size_t>(a)];
    diag *= 2.0 / (g.h() * g.h());
    const double inv_diag = 1.0 / diag;

    auto dot = [&](const ScalarField& u, const ScalarField& w) {
        double s = 0.0;
        for (std::int64_t i = 0; i < total; ++i) s += u[i] * w[i];
        return s;
    };
    auto max_abs = [&](const ScalarField& u) {
        double m = 0.0;
        for (std::int64_t i = 0; i < total; ++i) m = std::max(m, std::fabs(u[i]));
        return m;
    };

    double res_max = max_abs(r);
    if (res_max <= tol) return x;

    // Jacobi-preconditioned CG; the preconditioner is a constant here, so
    // it only rescales rho, but keeps the structure explicit.
    for (std::int64_t i = 0; i < total; ++i) p[i] = r[i] * inv_diag;
    double rho = dot(r, p);

    const int max_iter = 50 * g.G;
    for (int it = 0; it < max_iter; ++it) {
        ScalarField ap = apply_L(op, p);
        for (std::int64_t i = 0; i < total; ++i) ap[i] = -ap[i];
        const double alpha = rho / dot(p, ap);
        for (std::int64_t i = 0; i < total; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res_max = max_abs(r);
        if (res_max <= tol) return x;
        double rho_next = 0.0;
        for (std::int64_t i = 0; i < total; ++i) rho_next += r[i] * r[i] * inv_diag;
        const double beta = rho_next / rho;
        rho = rho_next;
        for (std::int64_t i = 0; i < total; ++i) p[i] = r[i] * inv_diag + beta * p[i];
    }
    throw numeric_error("solve_dirichlet: CG failed to reach tolerance", res_max);
}

}  // namespace sigmak
