#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sigmak/nonlinear.hpp"

using namespace sigmak;

namespace {

SolverConfig make_config(int n, int k, SolveMode mode, const std::string& psi_text, double eps,
                         int G, bool convex_seed = false) {
    PsiExpr psi = PsiExpr::parse(psi_text, n);
    const double m = psi.eval_origin();
    MuVector mu = (k == n)          ? gauss_mu(n, m)
                  : (convex_seed)   ? convex_mu(n, k, m)
                                    : construct_mu(n, k, m);
    return SolverConfig{n, k, mode, std::move(mu), std::move(psi), eps, GridSpec(n, G)};
}

std::int64_t origin_node(const GridSpec& g) {
    return g.encode({(g.G - 1) / 2, (g.G - 1) / 2, (g.G - 1) / 2});
}

/// Smooth field vanishing on the whole boundary: prod (1 - x_i^2) shaped
/// by a gentle modulation.
ScalarField smooth_bump(const GridSpec& g) {
    return sample_field(g, [&](const std::array<double, 3>& x) {
        double b = 1.0;
        for (int a = 0; a < g.n; ++a)
            b *= 1.0 - x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        return b * (1.0 + 0.5 * std::sin(x[0] + 0.3 * x[1]));
    });
}

}  // namespace

TEST_CASE("residual_F at the seed") {
    SECTION("hessian mode with constant psi vanishes") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1", 0.1, 9);
        const ScalarField f = residual_F(ScalarField(cfg.grid), cfg);
        REQUIRE(f.max_abs_interior() <= 1e-13);
    }
    SECTION("curvature mode vanishes at the origin for any psi with psi(0)=M") {
        const SolverConfig cfg =
            make_config(3, 2, SolveMode::curvature, "-1 + x1 + sin(x2)", 0.1, 9);
        const ScalarField f = residual_F(ScalarField(cfg.grid), cfg);
        REQUIRE(std::fabs(f[origin_node(cfg.grid)]) <= 1e-13);
    }
    SECTION("modes agree exactly at the origin when w = 0") {
        const SolverConfig hess = make_config(3, 2, SolveMode::hessian, "-1 + x1", 0.1, 21);
        SolverConfig curv = hess;
        curv.mode = SolveMode::curvature;
        const ScalarField w(hess.grid);
        const std::int64_t node = origin_node(hess.grid);
        REQUIRE(residual_F(w, hess)[node] == residual_F(w, curv)[node]);
    }
    SECTION("constant-Hessian perturbation reproduces the expansion terms") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1", 0.1, 9);
        // w = (1/2) x^T B x has fd_hessian == B at every interior node.
        SymMatrix b(3);
        b.set(0, 0, 0.8);
        b.set(1, 1, -0.4);
        b.set(2, 2, 0.1);
        b.set(0, 1, 0.3);
        b.set(0, 2, -0.2);
        b.set(1, 2, 0.5);
        const ScalarField w = sample_field(cfg.grid, [&](const std::array<double, 3>& x) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    s += 0.5 * x[static_cast<std::size_t>(i)] * b(i, j) *
                         x[static_cast<std::size_t>(j)];
            return s;
        });
        const ScalarField f = residual_F(w, cfg);
        // k = 2: sigma_2(D + eps B) is exactly quadratic in eps, so the
        // residual is exactly first + eps * second (plus the seed's own
        // 1e-9-level target error, divided by eps).
        const double expected = expansion_first_order(cfg.mu.mu, b, 2) +
                                cfg.epsilon * expansion_second_order(cfg.mu.mu, b, 2);
        for (std::int64_t node = 0; node < f.size(); ++node)
            if (cfg.grid.is_interior(node))
                REQUIRE(f[node] == Catch::Approx(expected).margin(1e-8));
    }
    SECTION("epsilon must be positive") {
        SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1", 0.1, 9);
        cfg.epsilon = 0.0;
        REQUIRE_THROWS_AS(residual_F(ScalarField(cfg.grid), cfg), std::domain_error);
    }
}

TEST_CASE("linearization consistency") {
    SECTION("hessian mode: (F(tw) - F(0))/t -> Lw at first order in t") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1 + x1", 0.1, 9);
        const ScalarField w = smooth_bump(cfg.grid);
        std::vector<double> coeffs;
        for (int i = 0; i < 3; ++i) coeffs.push_back(sigma_deleted(cfg.mu.mu, 1, i));
        const ScalarField lw = apply_L(EllipticOperator(coeffs, cfg.grid), w);
        const ScalarField f0 = residual_F(ScalarField(cfg.grid), cfg);

        auto deviation = [&](double t) {
            ScalarField tw(cfg.grid);
            for (std::int64_t i = 0; i < tw.size(); ++i) tw[i] = t * w[i];
            const ScalarField ft = residual_F(tw, cfg);
            double dev = 0.0;
            for (std::int64_t i = 0; i < tw.size(); ++i)
                if (cfg.grid.is_interior(i))
                    dev = std::max(dev, std::fabs((ft[i] - f0[i]) / t - lw[i]));
            return dev;
        };
        const double d1 = deviation(1e-2);
        const double d2 = deviation(1e-3);
        REQUIRE(d2 <= 0.2 * d1);  // first-order rate
        REQUIRE(d2 <= 1e-2);
    }
    SECTION("curvature mode differs from L only at higher order in epsilon") {
        auto deviation_at = [&](double eps) {
            const SolverConfig cfg = make_config(3, 2, SolveMode::curvature, "-1 + x1", eps, 9);
            const ScalarField w = smooth_bump(cfg.grid);
            std::vector<double> coeffs;
            for (int i = 0; i < 3; ++i) coeffs.push_back(sigma_deleted(cfg.mu.mu, 1, i));
            const ScalarField lw = apply_L(EllipticOperator(coeffs, cfg.grid), w);
            const ScalarField f0 = residual_F(ScalarField(cfg.grid), cfg);
            const double t = 1e-5;
            ScalarField tw(cfg.grid);
            for (std::int64_t i = 0; i < tw.size(); ++i) tw[i] = t * w[i];
            const ScalarField ft = residual_F(tw, cfg);
            double dev = 0.0;
            for (std::int64_t i = 0; i < tw.size(); ++i)
                if (cfg.grid.is_interior(i))
                    dev = std::max(dev, std::fabs((ft[i] - f0[i]) / t - lw[i]));
            return dev;
        };
        // The gradient corrections enter the curvature matrix at |grad u|^2
        // ~ eps^4, and that is the observed decay: halving eps divides the
        // deviation by ~16.
        const double dev_coarse = deviation_at(0.2);
        const double dev_fine = deviation_at(0.1);
        REQUIRE(dev_fine <= 5e-3);
        REQUIRE(dev_fine <= dev_coarse / 8.0);
    }
}

TEST_CASE("picard_solve") {
    SECTION("constant psi converges at iteration zero") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1", 0.1, 9);
        const PicardResult r = picard_solve(cfg);
        REQUIRE(r.report.converged);
        REQUIRE(r.report.iterations == 0);
        REQUIRE(r.w.max_abs() == 0.0);
    }

    SECTION("headline problem, hessian mode") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1 + x1", 0.1, 21);
        const PicardResult r = picard_solve(cfg);
        REQUIRE(r.report.converged);
        REQUIRE(r.report.residual_history.back() <= 1e-9);
        REQUIRE(r.report.iterations <= 25);
        // History is nonincreasing past the first entry, contraction at
        // least 1/2 per step away from the floor.
        const std::vector<double>& hist = r.report.residual_history;
        for (std::size_t m = 1; m + 1 < hist.size(); ++m) {
            REQUIRE(hist[m + 1] <= hist[m]);
            if (hist[m] > cfg.tol) REQUIRE(hist[m + 1] <= 0.5 * hist[m]);
        }
    }

    SECTION("headline problem, curvature mode, both signs of psi(0)") {
        for (const char* psi : {"-1 + x1", "1 + x1"}) {
            const SolverConfig cfg = make_config(3, 2, SolveMode::curvature, psi, 0.1, 9);
            const PicardResult r = picard_solve(cfg);
            REQUIRE(r.report.converged);
            REQUIRE(r.report.residual_history.back() <= 1e-9);
        }
    }

    SECTION("w scales like epsilon") {
        auto w_norm = [](double eps) {
            const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1 + x1", eps, 9);
            const PicardResult r = picard_solve(cfg);
            REQUIRE(r.report.converged);
            return r.report.final_w_maxnorm;
        };
        const double ratio = w_norm(0.05) / w_norm(0.1);
        REQUIRE(ratio > 0.3);
        REQUIRE(ratio < 0.7);
    }
}

TEST_CASE("reconstruct_u") {
    SECTION("zero w gives the pure quadratic") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1", 0.1, 9);
        const ScalarField u = reconstruct_u(ScalarField(cfg.grid), cfg);
        const double eps2 = cfg.epsilon * cfg.epsilon;
        for (std::int64_t node = 0; node < u.size(); ++node) {
            const std::array<int, 3> idx = cfg.grid.decode(node);
            double expected = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double xt = eps2 * cfg.grid.coord(idx[static_cast<std::size_t>(i)]);
                expected += 0.5 * cfg.mu.mu[static_cast<std::size_t>(i)] * xt * xt;
            }
            REQUIRE(u[node] == expected);
        }
    }
    SECTION("u deviates from u0 by exactly eps^5 w") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1 + x1", 0.1, 9);
        const PicardResult r = picard_solve(cfg);
        const ScalarField u = reconstruct_u(r.w, cfg);
        const ScalarField u0 = reconstruct_u(ScalarField(cfg.grid), cfg);
        const double eps5 = std::pow(cfg.epsilon, 5);
        double dev = 0.0;
        for (std::int64_t i = 0; i < u.size(); ++i)
            dev = std::max(dev, std::fabs(u[i] - u0[i]));
        REQUIRE(dev <= eps5 * r.report.final_w_maxnorm * (1.0 + 1e-12));
    }
    SECTION("convex seed keeps the reconstructed u convex at the origin") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "1 + x1", 0.1, 9, true);
        const PicardResult r = picard_solve(cfg);
        REQUIRE(r.report.converged);
        const ScalarField u = reconstruct_u(r.w, cfg);
        const double spacing = cfg.epsilon * cfg.epsilon * cfg.grid.h();
        const SymMatrix hess = fd_hessian_step(u, origin_node(cfg.grid), 1, spacing);
        const RealVector eig = jacobi_eigenvalues(hess);
        for (double lambda : eig) REQUIRE(lambda > 0.0);
    }
}

TEST_CASE("verify_solution") {
    SECTION("pure quadratic with constant psi verifies to machine precision") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1", 0.1, 9);
        const ScalarField u = reconstruct_u(ScalarField(cfg.grid), cfg);
        const ScalarField err = verify_solution(u, cfg);
        REQUIRE(err.max_abs() <= 1e-9);
    }
    SECTION("a corrupted sample spikes only inside its stencil reach") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1 + x1", 0.1, 13);
        const PicardResult r = picard_solve(cfg);
        const ScalarField clean = reconstruct_u(r.w, cfg);
        const ScalarField base_err = verify_solution(clean, cfg);

        ScalarField dirty = clean;
        const std::array<int, 3> target{6, 6, 6};
        dirty[cfg.grid.encode(target)] += 1e-3;
        const ScalarField err = verify_solution(dirty, cfg);

        double far_dev = 0.0;
        double near_peak = 0.0;
        for (std::int64_t node = 0; node < err.size(); ++node) {
            const std::array<int, 3> idx = cfg.grid.decode(node);
            const bool in_reach = std::abs(idx[0] - target[0]) <= 2 &&
                                  std::abs(idx[1] - target[1]) <= 2 &&
                                  std::abs(idx[2] - target[2]) <= 2;
            const double dev = std::fabs(err[node] - base_err[node]);
            if (in_reach)
                near_peak = std::max(near_peak, dev);
            else
                far_dev = std::max(far_dev, dev);
        }
        REQUIRE(far_dev == 0.0);
        REQUIRE(near_peak > 1e3 * (base_err.max_abs() + 1e-30));
    }
    SECTION("a config with the wrong k reports a large error") {
        const SolverConfig cfg = make_config(3, 2, SolveMode::hessian, "-1 + x1", 0.1, 9);
        const PicardResult r = picard_solve(cfg);
        const ScalarField u = reconstruct_u(r.w, cfg);
        SolverConfig wrong = cfg;
        wrong.k = 1;
        const ScalarField err = verify_solution(u, wrong);
        REQUIRE(err.max_abs() > 0.1);
    }
}
