#pragma once

#include <cstdint>
#include <random>

#include "sigmak/symfun.hpp"

namespace sigmak {

/// Seeded random source with hand-rolled distributions, so identical seeds
/// produce identical streams on every platform (std:: distributions are
/// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    RealVector vector(int n, double lo, double hi) {
        RealVector v(static_cast<std::size_t>(n));
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

    SymMatrix sym_matrix(int n, double lo, double hi) {
        SymMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) a.set(i, j, uniform(lo, hi));
        return a;
    }

    /// Random symmetric matrix scaled to unit Frobenius norm.
    SymMatrix unit_sym_matrix(int n) {
        SymMatrix a = sym_matrix(n, -1.0, 1.0);
        const double f = a.frobenius_norm();
        if (f > 0.0) a *= 1.0 / f;
        return a;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace sigmak
