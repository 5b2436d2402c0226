#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sigmak/expansion_probe.hpp"
#include "sigmak/rng.hpp"
#include "sigmak/symfun.hpp"

namespace sigmak {

struct CheckRow {
    std::string name;
    int trials = 0;
    double worst = 0.0;
    bool pass = true;
    bool skipped = false;
    std::string note;
};

/// The randomized sigma-algebra diagnostics behind `expand-check`:
/// deletion recursion, minors-vs-eigenvalues agreement, the two
/// remainder-order windows of the expansion, and the Newton-inequality
/// gap on the deleted (n-2)-dimensional instance the positivity proof
/// uses. Deterministic for a fixed seed.
[[nodiscard]] inline std::vector<CheckRow> run_expand_checks(int n, int k, int trials,
                                                             std::uint64_t seed) {
    if (n < 2 || n > SymMatrix::max_order)
        throw std::domain_error("expand-check: need 2 <= n <= 12");
    if (k < 1 || k > n) throw std::domain_error("expand-check: need 1 <= k <= n");
    if (trials < 1) throw std::domain_error("expand-check: need at least one trial");

    std::vector<CheckRow> rows;
    Rng rng(seed);

    {
        CheckRow row{"laplace recursion", trials};
        const int j = std::min(k, n - 1);
        for (int t = 0; t < trials; ++t) {
            const RealVector mu = rng.vector(n, -2.0, 2.0);
            const double whole = sigma(mu, j);
            for (int i = 0; i < n; ++i) {
                const double split = sigma_deleted(mu, j, i) +
                                     mu[static_cast<std::size_t>(i)] * sigma_deleted(mu, j - 1, i);
                row.worst = std::max(row.worst,
                                     std::fabs(whole - split) / (1.0 + std::fabs(whole)));
            }
        }
        row.pass = row.worst <= 1e-12;
        rows.push_back(row);
    }

    {
        CheckRow row{"sigma_k minors vs eigenvalues", trials};
        for (int t = 0; t < trials; ++t) {
            const SymMatrix a = rng.sym_matrix(n, -1.0, 1.0);
            for (int kk = 1; kk <= n; ++kk) {
                const double minors = sigma_k_matrix(a, kk);
                const double eig = sigma_k_matrix_eig(a, kk);
                row.worst =
                    std::max(row.worst, std::fabs(minors - eig) / (1.0 + std::fabs(minors)));
            }
        }
        row.pass = row.worst <= 1e-8;
        rows.push_back(row);
    }

    {
        CheckRow first{"first-order remainder O(t^2)", trials};
        CheckRow second{"second-order remainder O(t^3)", trials};
        if (k < 2) {
            second.skipped = true;
            second.note = "needs k >= 2";
        }
        for (int t = 0; t < trials; ++t) {
            const RealVector mu = rng.vector(n, -1.0, 1.0);
            const SymMatrix b = rng.unit_sym_matrix(n);
            const RemainderProbe p = probe_remainders(mu, b, k);
            if (!first_order_window_ok(p)) first.pass = false;
            const double fine1 =
                std::fabs(p.r1[2]) > p.floor[2] ? std::fabs(p.r1[1] / p.r1[2]) : 100.0;
            first.worst = std::max(first.worst, std::fabs(fine1 - 100.0));
            if (!second.skipped) {
                if (!second_order_window_ok(p)) second.pass = false;
                const double fine2 =
                    std::fabs(p.r2[2]) > p.floor[2] ? std::fabs(p.r2[1] / p.r2[2]) : 1000.0;
                second.worst = std::max(second.worst, std::fabs(fine2 - 1000.0));
            }
        }
        rows.push_back(first);
        rows.push_back(second);
    }

    {
        CheckRow row{"newton gap (deleted instance)", trials};
        if (n >= 4 && k >= 2 && k <= n - 2) {
            double worst_gap = std::numeric_limits<double>::infinity();
            for (int t = 0; t < trials; ++t) {
                const RealVector mu = rng.vector(n - 2, -2.0, 2.0);
                worst_gap = std::min(worst_gap, newton_gap(mu, k - 1));
            }
            row.worst = worst_gap;
            row.pass = worst_gap >= -1e-12;
        } else {
            row.skipped = true;
            row.note = "needs n-2 >= 2 deleted entries and 1 <= k-1 <= n-3";
        }
        rows.push_back(row);
    }

    return rows;
}

}  // namespace sigmak
