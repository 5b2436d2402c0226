#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmak {

using RealVector = std::vector<double>;

/// Dense symmetric matrix of small order. Only the upper triangle is
/// stored, so A(i,j) == A(j,i) holds exactly by construction. The order
/// is capped at 12: sums of principal minors stay cheap, and nothing in
/// this library needs larger matrices.
class SymMatrix {
public:
    static constexpr int max_order = 12;

    explicit SymMatrix(int n) : n_(n) {
        if (n < 1 || n > max_order)
            throw std::domain_error("SymMatrix: order must be in [1, " +
                                    std::to_string(max_order) + "]");
        tri_.fill(0.0);
    }

    static SymMatrix identity(int n) {
        SymMatrix a(n);
        for (int i = 0; i < n; ++i) a.set(i, i, 1.0);
        return a;
    }

    static SymMatrix diagonal(std::span<const double> d) {
        SymMatrix a(static_cast<int>(d.size()));
        for (int i = 0; i < a.order(); ++i) a.set(i, i, d[i]);
        return a;
    }

    [[nodiscard]] int order() const { return n_; }

    [[nodiscard]] double operator()(int i, int j) const { return tri_[slot(i, j)]; }

    void set(int i, int j, double v) { tri_[slot(i, j)] = v; }

    [[nodiscard]] double frobenius_norm() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    SymMatrix& operator*=(double s) {
        for (double& v : tri_) v *= s;
        return *this;
    }

private:
    [[nodiscard]] int slot(int i, int j) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_)
            throw std::domain_error("SymMatrix: index out of range");
        if (i > j) std::swap(i, j);
        return i * n_ - i * (i - 1) / 2 + (j - i);
    }

    int n_;
    std::array<double, max_order*(max_order + 1) / 2> tri_;
};

/// A + t*B, entrywise on the shared triangle.
[[nodiscard]] inline SymMatrix add_scaled(const SymMatrix& a, double t, const SymMatrix& b) {
    if (a.order() != b.order())
        throw std::invalid_argument("add_scaled: order mismatch");
    SymMatrix r(a.order());
    for (int i = 0; i < a.order(); ++i)
        for (int j = i; j < a.order(); ++j) r.set(i, j, a(i, j) + t * b(i, j));
    return r;
}

/// All elementary symmetric functions e_0, ..., e_m of z in one O(m^2)
/// pass of the recurrence e_j <- e_j + z_i * e_{j-1}. Stable and exact on
/// integer inputs; avoids the cancellation of the naive subset sum.
[[nodiscard]] inline RealVector elementary_symmetric(std::span<const double> z) {
    const int m = static_cast<int>(z.size());
    RealVector e(static_cast<std::size_t>(m) + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j >= 1; --j) e[j] += z[i] * e[j - 1];
    return e;
}

/// sigma_j(mu): sum of all j-fold products of distinct entries.
/// sigma_0 = 1 and sigma_j = 0 for j > dim(mu). Truncated recurrence,
/// one pass, O(n*j).
[[nodiscard]] inline double sigma(std::span<const double> mu, int j) {
    if (j < 0) throw std::domain_error("sigma: order j must be nonnegative");
    const int n = static_cast<int>(mu.size());
    if (j == 0) return 1.0;
    if (j > n) return 0.0;
    std::array<double, 64> e{};
    if (j >= static_cast<int>(e.size()))
        throw std::domain_error("sigma: order j too large");
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int q = std::min(j, i + 1); q >= 1; --q) e[q] += mu[i] * e[q - 1];
    return e[j];
}

[[nodiscard]] inline double sigma(const RealVector& mu, int j) {
    return sigma(std::span<const double>(mu), j);
}

namespace detail {
inline void check_index(std::span<const double> mu, int i, const char* who) {
    if (i < 0 || i >= static_cast<int>(mu.size()))
        throw std::domain_error(std::string(who) + ": index out of range");
}
}  // namespace detail

/// sigma_j of mu with entry i deleted (i is a 0-based index).
[[nodiscard]] inline double sigma_deleted(std::span<const double> mu, int j, int i) {
    detail::check_index(mu, i, "sigma_deleted");
    if (j < 0 || j > static_cast<int>(mu.size()) - 1)
        throw std::domain_error("sigma_deleted: order j out of range");
    RealVector rest;
    rest.reserve(mu.size() - 1);
    for (int q = 0; q < static_cast<int>(mu.size()); ++q)
        if (q != i) rest.push_back(mu[q]);
    return sigma(rest, j);
}

/// sigma_j of mu with the two distinct entries i and l deleted.
[[nodiscard]] inline double sigma_deleted2(std::span<const double> mu, int j, int i, int l) {
    detail::check_index(mu, i, "sigma_deleted2");
    detail::check_index(mu, l, "sigma_deleted2");
    if (i == l) throw std::domain_error("sigma_deleted2: indices must differ");
    if (j < 0 || j > static_cast<int>(mu.size()) - 2)
        throw std::domain_error("sigma_deleted2: order j out of range");
    RealVector rest;
    rest.reserve(mu.size() - 2);
    for (int q = 0; q < static_cast<int>(mu.size()); ++q)
        if (q != i && q != l) rest.push_back(mu[q]);
    return sigma(rest, j);
}

namespace detail {

/// Determinant of a k x k buffer (row-major) by in-place LU with partial
/// pivoting. A zero pivot means a singular minor: determinant 0.
inline double det_inplace(double* a, int k) {
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::fabs(a[r * k + c]) > std::fabs(a[piv * k + c])) piv = r;
        if (a[piv * k + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int q = 0; q < k; ++q) std::swap(a[piv * k + q], a[c * k + q]);
            det = -det;
        }
        det *= a[c * k + c];
        for (int r = c + 1; r < k; ++r) {
            const double f = a[r * k + c] / a[c * k + c];
            for (int q = c; q < k; ++q) a[r * k + q] -= f * a[c * k + q];
        }
    }
    return det;
}

}  // namespace detail

/// sigma_k of the eigenvalues of A, evaluated without eigenvalues: it
/// equals the sum of all k x k principal minors of A, an exact polynomial
/// identity. This is the authoritative route; see sigma_k_matrix_eig for
/// the eigenvalue cross-check.
[[nodiscard]] inline double sigma_k_matrix(const SymMatrix& a, int k) {
    const int n = a.order();
    if (k < 1 || k > n) throw std::domain_error("sigma_k_matrix: k out of range");
    std::array<int, SymMatrix::max_order> idx{};
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::array<double, SymMatrix::max_order * SymMatrix::max_order> sub{};
    double total = 0.0;
    while (true) {
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) sub[r * k + c] = a(idx[r], idx[c]);
        total += detail::det_inplace(sub.data(), k);
        // next k-combination of {0, ..., n-1}
        int p = k - 1;
        while (p >= 0 && idx[p] == n - k + p) --p;
        if (p < 0) break;
        ++idx[p];
        for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
    return total;
}

/// Thrown when an iterative numeric routine fails to reach its tolerance.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_(achieved) {}
    [[nodiscard]] double achieved() const { return achieved_; }

private:
    double achieved_;
};

/// All eigenvalues of A by cyclic Jacobi rotations, sorted ascending.
/// Sweeps until the off-diagonal Frobenius norm drops below tol relative
/// to the matrix scale.
[[nodiscard]] inline RealVector jacobi_eigenvalues(const SymMatrix& a0, double tol = 1e-12,
                                                   int max_sweeps = 100) {
    const int n = a0.order();
    std::array<double, SymMatrix::max_order * SymMatrix::max_order> a{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i * n + j] = a0(i, j);
    const double scale = std::max(1.0, a0.frobenius_norm());

    auto off_norm = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += 2.0 * a[p * n + q] * a[p * n + q];
        return std::sqrt(s);
    };

    double off = off_norm();
    for (int sweep = 0; sweep < max_sweeps && off > tol * scale; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = a[q * n + p] = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[r * n + p], arq = a[r * n + q];
                    a[r * n + p] = a[p * n + r] = arp - s * (arq + tau * arp);
                    a[r * n + q] = a[q * n + r] = arq + s * (arp - tau * arq);
                }
            }
        }
        off = off_norm();
    }
    if (off > tol * scale)
        throw numeric_error("jacobi_eigenvalues: no convergence after " +
                                std::to_string(max_sweeps) + " sweeps",
                            off);
    RealVector lam(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) lam[static_cast<std::size_t>(i)] = a[i * n + i];
    std::sort(lam.begin(), lam.end());
    return lam;
}

/// sigma_k of A via its Jacobi eigenvalues. Cross-check route for
/// sigma_k_matrix; the main code paths never use it.
[[nodiscard]] inline double sigma_k_matrix_eig(const SymMatrix& a, int k) {
    if (k < 1 || k > a.order())
        throw std::domain_error("sigma_k_matrix_eig: k out of range");
    return sigma(jacobi_eigenvalues(a), k);
}

/// First-order term of sigma_k(D + B) around the diagonal D = diag(mu):
/// sum_i sigma_{k-1}(mu|i) * b_ii. Off-diagonal entries of B do not enter
/// at this order.
[[nodiscard]] inline double expansion_first_order(std::span<const double> mu,
                                                  const SymMatrix& b, int k) {
    const int n = static_cast<int>(mu.size());
    if (n != b.order()) throw std::invalid_argument("expansion_first_order: dimension mismatch");
    if (k < 1 || k > n) throw std::domain_error("expansion_first_order: k out of range");
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sigma_deleted(mu, k - 1, i) * b(i, i);
    return s;
}

/// Second-order term of sigma_k(D + B):
/// sum_{i<j} sigma_{k-2}(mu|i,j) * (b_ii b_jj - b_ij^2).
[[nodiscard]] inline double expansion_second_order(std::span<const double> mu,
                                                   const SymMatrix& b, int k) {
    const int n = static_cast<int>(mu.size());
    if (n != b.order()) throw std::invalid_argument("expansion_second_order: dimension mismatch");
    if (k < 2 || k > n) throw std::domain_error("expansion_second_order: k out of range");
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            s += sigma_deleted2(mu, k - 2, i, j) * (b(i, i) * b(j, j) - b(i, j) * b(i, j));
    return s;
}

/// Newton's inequality gap for a real vector mu of dimension m:
///   (j(m-j) / ((j+1)(m-j+1))) * sigma_j(mu)^2  -  sigma_{j-1}(mu) * sigma_{j+1}(mu),
/// nonnegative for every real mu. With m = n-2 and j = k-1 this is exactly
/// the estimate used to keep the linearization coefficients positive.
[[nodiscard]] inline double newton_gap(std::span<const double> mu, int j) {
    const int m = static_cast<int>(mu.size());
    if (j < 1 || j > m - 1) throw std::domain_error("newton_gap: need 1 <= j <= dim-1");
    const double coef = static_cast<double>(j) * static_cast<double>(m - j) /
                        (static_cast<double>(j + 1) * static_cast<double>(m - j + 1));
    const double sj = sigma(mu, j);
    return coef * sj * sj - sigma(mu, j - 1) * sigma(mu, j + 1);
}

/// Binomial coefficient C(m, j) as a double; equals sigma_j(1, ..., 1) on
/// m ones. Zero outside 0 <= j <= m.
[[nodiscard]] inline double binomial(int m, int j) {
    if (j < 0 || j > m) return 0.0;
    j = std::min(j, m - j);
    double r = 1.0;
    for (int i = 1; i <= j; ++i) r = r * static_cast<double>(m - j + i) / static_cast<double>(i);
    return std::round(r);
}

}  // namespace sigmak
