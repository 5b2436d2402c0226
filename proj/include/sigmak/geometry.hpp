#pragma once

#include <array>
#include <cmath>
#include <span>

#include "sigmak/grid.hpp"
#include "sigmak/parallel.hpp"
#include "sigmak/symfun.hpp"

namespace sigmak {

/// Central-difference gradient at a node, reaching `step` nodes along
/// each axis with the given physical spacing between those samples.
/// Exact on quadratics. The node must sit at least `step` nodes away
/// from every face.
[[nodiscard]] inline std::array<double, 3> fd_gradient_step(const ScalarField& f,
                                                            std::int64_t node, int step,
                                                            double spacing) {
    const GridSpec& g = f.grid();
    if (g.boundary_distance(node) < step)
        throw std::domain_error("fd_gradient: node too close to the boundary");
    const std::array<std::int64_t, 3> s = g.strides();
    std::array<double, 3> grad{0.0, 0.0, 0.0};
    for (int a = 0; a < g.n; ++a) {
        const std::int64_t d = s[static_cast<std::size_t>(a)] * step;
        grad[static_cast<std::size_t>(a)] = (f[node + d] - f[node - d]) / (2.0 * spacing);
    }
    return grad;
}

/// Second-order Hessian stencils with the same step/spacing convention:
/// (f+ - 2f0 + f-)/spacing^2 on the diagonal, the symmetric four-point
/// cross over spacing^2*4 off it. Exact on quadratics.
[[nodiscard]] inline SymMatrix fd_hessian_step(const ScalarField& f, std::int64_t node, int step,
                                               double spacing) {
    const GridSpec& g = f.grid();
    if (g.boundary_distance(node) < step)
        throw std::domain_error("fd_hessian: node too close to the boundary");
    const std::array<std::int64_t, 3> s = g.strides();
    const double h2 = spacing * spacing;
    SymMatrix hess(g.n);
    for (int a = 0; a < g.n; ++a) {
        const std::int64_t da = s[static_cast<std::size_t>(a)] * step;
        hess.set(a, a, (f[node + da] - 2.0 * f[node] + f[node - da]) / h2);
        for (int b = a + 1; b < g.n; ++b) {
            const std::int64_t db = s[static_cast<std::size_t>(b)] * step;
            const double cross =
                (f[node + da + db] - f[node + da - db] - f[node - da + db] + f[node - da - db]) /
                (4.0 * h2);
            hess.set(a, b, cross);
        }
    }
    return hess;
}

[[nodiscard]] inline std::array<double, 3> fd_gradient(const ScalarField& f, std::int64_t node) {
    return fd_gradient_step(f, node, 1, f.grid().h());
}

[[nodiscard]] inline SymMatrix fd_hessian(const ScalarField& f, std::int64_t node) {
    return fd_hessian_step(f, node, 1, f.grid().h());
}

/// Pointwise curvature data of a graph (x, u(x)): the gradient, the
/// Hessian, v = sqrt(1 + |grad u|^2), and the symmetric matrix a whose
/// eigenvalues are the principal curvatures.
struct CurvatureFrame {
    std::array<double, 3> grad{0.0, 0.0, 0.0};
    SymMatrix hess;
    double v = 1.0;
    SymMatrix a;
};

/// Build the curvature matrix
///   a_ij = (1/v) ( u_ij - (u_i q_j + u_j q_i) / (v(1+v))
///                  + u_i u_j (q . grad u) / (v^2 (1+v)^2) ),
/// with q_i = u_k u_ki summed over k. In one dimension this reduces to
/// a = u'' / (1+u'^2)^{3/2}, which fixes the orientation: an upward
/// normal, so concave caps carry negative curvature.
[[nodiscard]] inline CurvatureFrame curvature_matrix(std::span<const double> grad,
                                                     const SymMatrix& hess) {
    const int n = hess.order();
    if (static_cast<int>(grad.size()) < n)
        throw std::invalid_argument("curvature_matrix: gradient/Hessian dimension mismatch");
    CurvatureFrame frame{{0.0, 0.0, 0.0}, hess, 1.0, SymMatrix(n)};
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) {
        frame.grad[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(i)];
        g2 += grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(i)];
    }
    const double v = std::sqrt(1.0 + g2);
    frame.v = v;

    std::array<double, 3> q{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            q[static_cast<std::size_t>(i)] += grad[static_cast<std::size_t>(k)] * hess(k, i);
    double qg = 0.0;
    for (int k = 0; k < n; ++k)
        qg += q[static_cast<std::size_t>(k)] * grad[static_cast<std::size_t>(k)];

    const double c1 = 1.0 / (v * (1.0 + v));
    const double c2 = 1.0 / (v * v * (1.0 + v) * (1.0 + v));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double ui = grad[static_cast<std::size_t>(i)];
            const double uj = grad[static_cast<std::size_t>(j)];
            const double val =
                (hess(i, j) - (ui * q[static_cast<std::size_t>(j)] + uj * q[static_cast<std::size_t>(i)]) * c1 +
                 ui * uj * qg * c2) /
                v;
            frame.a.set(i, j, val);
        }
    return frame;
}

/// sigma_k of the principal curvatures of the graph of u, evaluated from
/// the samples at every strictly interior node. Boundary nodes are set
/// to zero; the equation is never enforced there.
[[nodiscard]] inline ScalarField sigma_k_curvature(const ScalarField& u, int k) {
    const GridSpec& g = u.grid();
    if (k < 1 || k > g.n) throw std::domain_error("sigma_k_curvature: k out of range");
    ScalarField out(g);
    parallel_for(u.size(), [&](std::int64_t node) {
        if (!g.is_interior(node)) return;
        const std::array<double, 3> grad = fd_gradient(u, node);
        const SymMatrix hess = fd_hessian(u, node);
        const CurvatureFrame frame = curvature_matrix(std::span<const double>(grad.data(), static_cast<std::size_t>(g.n)), hess);
        out[node] = sigma_k_matrix(frame.a, k);
    });
    return out;
}

}  // namespace sigmak
