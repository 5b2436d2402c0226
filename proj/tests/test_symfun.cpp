#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sigmak/expansion_probe.hpp"
#include "sigmak/rng.hpp"
#include "sigmak/symfun.hpp"

using namespace sigmak;

namespace {

SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    SymMatrix a(static_cast<int>(rows.size()));
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) {
            if (j >= i) a.set(i, j, v);
            ++j;
        }
        ++i;
    }
    return a;
}

}  // namespace

TEST_CASE("sigma on plain vectors") {
    REQUIRE(sigma(RealVector{1, 1, 1}, 2) == 3.0);
    REQUIRE(sigma(RealVector{1, 2, 3}, 3) == 6.0);
    REQUIRE(sigma(RealVector{1, 2, 3}, 2) == 11.0);
    REQUIRE(sigma(RealVector{1, 2, 3}, 0) == 1.0);
    REQUIRE(sigma(RealVector{1, 2, 3}, 4) == 0.0);
    REQUIRE_THROWS_AS(sigma(RealVector{1.0}, -1), std::domain_error);
}

TEST_CASE("elementary_symmetric matches sigma at every order") {
    Rng rng(11);
    const RealVector mu = rng.vector(7, -2.0, 2.0);
    const RealVector e = elementary_symmetric(mu);
    REQUIRE(e.size() == 8);
    for (int j = 0; j <= 7; ++j)
        REQUIRE(e[static_cast<std::size_t>(j)] == Catch::Approx(sigma(mu, j)).margin(1e-14));
}

TEST_CASE("sigma_deleted") {
    REQUIRE(sigma_deleted(RealVector{1, 2, 3}, 1, 1) == 4.0);  // delete the 2
    REQUIRE(sigma_deleted(RealVector{5}, 0, 0) == 1.0);
    REQUIRE(sigma_deleted(RealVector{1, 1, 1, 1}, 2, 3) == 3.0);
    REQUIRE_THROWS_AS(sigma_deleted(RealVector{1, 2}, 0, 2), std::domain_error);
    REQUIRE_THROWS_AS(sigma_deleted(RealVector{1, 2}, 2, 0), std::domain_error);
}

TEST_CASE("sigma_deleted2") {
    REQUIRE(sigma_deleted2(RealVector{1, 2, 3, 4}, 1, 0, 3) == 5.0);  // 2 + 3
    REQUIRE(sigma_deleted2(RealVector{1, 2, 3}, 0, 0, 2) == 1.0);
    REQUIRE(sigma_deleted2(RealVector{2, 2, 2, 2}, 2, 1, 2) == 4.0);
    REQUIRE_THROWS_AS(sigma_deleted2(RealVector{1, 2, 3}, 1, 1, 1), std::domain_error);
}

TEST_CASE("laplace-style deletion recursion holds at machine precision") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(2, 8);
        const RealVector mu = rng.vector(n, -3.0, 3.0);
        for (int k = 1; k <= n - 1; ++k) {
            const double whole = sigma(mu, k);
            for (int i = 0; i < n; ++i) {
                const double split =
                    sigma_deleted(mu, k, i) +
                    (k >= 1 ? mu[static_cast<std::size_t>(i)] * sigma_deleted(mu, k - 1, i) : 0.0);
                REQUIRE(whole == Catch::Approx(split).margin(1e-11 * (1.0 + std::fabs(whole))));
            }
        }
    }
}

TEST_CASE("sigma_k_matrix on small fixed matrices") {
    REQUIRE(sigma_k_matrix(SymMatrix::identity(3), 2) == 3.0);
    REQUIRE(sigma_k_matrix(from_rows({{0, 1}, {1, 0}}), 2) == -1.0);
    REQUIRE_THROWS_AS(sigma_k_matrix(SymMatrix::identity(3), 0), std::domain_error);
    REQUIRE_THROWS_AS(sigma_k_matrix(SymMatrix::identity(3), 4), std::domain_error);
}

TEST_CASE("jacobi eigenvalue route on fixed matrices") {
    const RealVector d{1, 2, 3};
    REQUIRE(sigma_k_matrix_eig(SymMatrix::diagonal(d), 2) == Catch::Approx(11.0).margin(1e-12));
    REQUIRE(sigma_k_matrix_eig(SymMatrix::identity(2), 1) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("principal-minor and eigenvalue routes agree on random matrices") {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = rng.uniform_int(2, 5);
        const SymMatrix a = rng.sym_matrix(n, -1.0, 1.0);
        for (int k = 1; k <= n; ++k) {
            const double minors = sigma_k_matrix(a, k);
            const double eig = sigma_k_matrix_eig(a, k);
            REQUIRE(std::fabs(minors - eig) <= 1e-8 * (1.0 + std::fabs(minors)));
        }
    }
}

TEST_CASE("expansion_first_order") {
    const RealVector ones{1, 1, 1};
    REQUIRE(expansion_first_order(ones, SymMatrix::identity(3), 2) == 6.0);

    SymMatrix zero_diag(3);
    zero_diag.set(0, 1, 0.7);
    zero_diag.set(0, 2, -0.3);
    zero_diag.set(1, 2, 1.1);
    REQUIRE(expansion_first_order(RealVector{2, -1, 4}, zero_diag, 2) == 0.0);

    // Richardson limit of (sigma_k(D+tB) - sigma_k(mu)) / t at t = 1e-3, 1e-4.
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(2, 5);
        const int k = rng.uniform_int(1, n);
        const RealVector mu = rng.vector(n, -1.0, 1.0);
        const SymMatrix b = rng.sym_matrix(n, -1.0, 1.0);
        const SymMatrix d = SymMatrix::diagonal(mu);
        const double s0 = sigma_k_matrix(d, k);
        auto fd = [&](double t) { return (sigma_k_matrix(add_scaled(d, t, b), k) - s0) / t; };
        const double extrapolated = (10.0 * fd(1e-4) - fd(1e-3)) / 9.0;
        const double first = expansion_first_order(mu, b, k);
        REQUIRE(extrapolated == Catch::Approx(first).margin(1e-6 * (1.0 + std::fabs(first))));
    }
}

TEST_CASE("expansion_second_order") {
    REQUIRE(expansion_second_order(RealVector{1, 1}, from_rows({{0, 1}, {1, 0}}), 2) == -1.0);
    REQUIRE(expansion_second_order(RealVector{3, -2}, SymMatrix::diagonal(RealVector{2.5, -4.0}),
                                   2) == 2.5 * -4.0);
    REQUIRE_THROWS_AS(expansion_second_order(RealVector{1, 1}, SymMatrix::identity(2), 1),
                      std::domain_error);

    // Richardson limit of (sigma_k(D+tB) - sigma_k - t*first) / t^2.
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(2, 5);
        const int k = rng.uniform_int(2, n);
        const RealVector mu = rng.vector(n, -1.0, 1.0);
        const SymMatrix b = rng.sym_matrix(n, -1.0, 1.0);
        const SymMatrix d = SymMatrix::diagonal(mu);
        const double s0 = sigma_k_matrix(d, k);
        const double first = expansion_first_order(mu, b, k);
        auto fd = [&](double t) {
            return (sigma_k_matrix(add_scaled(d, t, b), k) - s0 - t * first) / (t * t);
        };
        const double extrapolated = (10.0 * fd(1e-4) - fd(1e-3)) / 9.0;
        const double second = expansion_second_order(mu, b, k);
        REQUIRE(extrapolated == Catch::Approx(second).margin(1e-5 * (1.0 + std::fabs(second))));
    }
}

TEST_CASE("remainder decay windows") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(2, 5);
        const RealVector mu = rng.vector(n, -1.0, 1.0);
        const SymMatrix b = rng.unit_sym_matrix(n);

        // k = 2 makes r1 exactly quadratic in t, k = 3 makes r2 exactly
        // cubic: the windows are sharp there and catch any coefficient bug.
        REQUIRE(first_order_window_ok(probe_remainders(mu, b, 2)));
        if (n >= 3) REQUIRE(second_order_window_ok(probe_remainders(mu, b, 3)));

        // General k, escape-aware.
        const int k = rng.uniform_int(2, n);
        const RemainderProbe p = probe_remainders(mu, b, k);
        REQUIRE(first_order_window_ok(p));
        REQUIRE(second_order_window_ok(p));
    }
}

TEST_CASE("newton_gap") {
    REQUIRE(newton_gap(RealVector{1, 1}, 1) == 0.0);
    REQUIRE(newton_gap(RealVector{1, 0}, 1) == 0.25);
    REQUIRE_THROWS_AS(newton_gap(RealVector{1, 2}, 2), std::domain_error);

    Rng rng(43);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = rng.uniform_int(2, 9);
        const RealVector mu = rng.vector(m, -2.0, 2.0);
        const int j = rng.uniform_int(1, m - 1);
        REQUIRE(newton_gap(mu, j) >= -1e-12);
    }
}

TEST_CASE("symmetric storage is exact") {
    Rng rng(47);
    const SymMatrix a = rng.sym_matrix(5, -10.0, 10.0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) REQUIRE(a(i, j) == a(j, i));
    REQUIRE_THROWS_AS(SymMatrix(13), std::domain_error);
}

TEST_CASE("binomial equals sigma of ones") {
    for (int m = 0; m <= 12; ++m) {
        const RealVector ones(static_cast<std::size_t>(m), 1.0);
        for (int j = 0; j <= m; ++j) REQUIRE(binomial(m, j) == sigma(ones, j));
    }
    REQUIRE(binomial(4, 5) == 0.0);
}
