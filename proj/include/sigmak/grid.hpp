#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sigmak {

/// Uniform Cartesian grid on the solver cube [-1,1]^n. G is odd so the
/// origin is a node; spacing h = 2/(G-1). Nodes are stored row-major
/// with the last axis fastest.
struct GridSpec {
    int n = 2;
    int G = 5;

    GridSpec(int n_, int G_) : n(n_), G(G_) {
        if (n < 2 || n > 3) throw std::domain_error("GridSpec: dimension must be 2 or 3");
        if (G < 5 || G % 2 == 0) throw std::domain_error("GridSpec: G must be odd and >= 5");
    }

    [[nodiscard]] double h() const { return 2.0 / (G - 1); }

    [[nodiscard]] std::int64_t node_count() const {
        std::int64_t c = 1;
        for (int a = 0; a < n; ++a) c *= G;
        return c;
    }

    /// Flat-index stride of each axis (last axis fastest).
    [[nodiscard]] std::array<std::int64_t, 3> strides() const {
        std::array<std::int64_t, 3> s{0, 0, 0};
        std::int64_t acc = 1;
        for (int a = n - 1; a >= 0; --a) {
            s[static_cast<std::size_t>(a)] = acc;
            acc *= G;
        }
        return s;
    }

    [[nodiscard]] std::array<int, 3> decode(std::int64_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = n - 1; a >= 0; --a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % G);
            flat /= G;
        }
        return idx;
    }

    [[nodiscard]] std::int64_t encode(const std::array<int, 3>& idx) const {
        std::int64_t flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * G + idx[static_cast<std::size_t>(a)];
        return flat;
    }

    /// Node coordinate -1 + h*i, computed as (2i - (G-1))/(G-1) so the
    /// center node is exactly 0 and coordinates are exactly antisymmetric.
    [[nodiscard]] double coord(int axis_index) const {
        return static_cast<double>(2 * axis_index - (G - 1)) / (G - 1);
    }

    /// Distance to the nearest face in node counts; 0 means boundary.
    [[nodiscard]] int boundary_distance(std::int64_t flat) const {
        const std::array<int, 3> idx = decode(flat);
        int d = G;
        for (int a = 0; a < n; ++a) {
            const int i = idx[static_cast<std::size_t>(a)];
            d = std::min(d, std::min(i, G - 1 - i));
        }
        return d;
    }

    [[nodiscard]] bool is_interior(std::int64_t flat) const { return boundary_distance(flat) >= 1; }

    [[nodiscard]] bool operator==(const GridSpec& o) const { return n == o.n && G == o.G; }
};

/// Real-valued samples on every node of a grid, in row-major node order.
class ScalarField {
public:
    explicit ScalarField(const GridSpec& grid)
        : grid_(grid), values_(static_cast<std::size_t>(grid.node_count()), 0.0) {}

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

    [[nodiscard]] double operator[](std::int64_t i) const {
        return values_[static_cast<std::size_t>(i)];
    }
    [[nodiscard]] double& operator[](std::int64_t i) { return values_[static_cast<std::size_t>(i)]; }

    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::fabs(v));
        return m;
    }

    /// Max-norm over strictly interior nodes.
    [[nodiscard]] double max_abs_interior() const {
        double m = 0.0;
        for (std::int64_t i = 0; i < size(); ++i)
            if (grid_.is_interior(i)) m = std::max(m, std::fabs(values_[static_cast<std::size_t>(i)]));
        return m;
    }

    ScalarField& operator+=(const ScalarField& o) {
        if (!(grid_ == o.grid_)) throw std::invalid_argument("ScalarField: grid mismatch");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Sample a callable f(x) with x the solver coordinates of each node.
template <typename F>
[[nodiscard]] ScalarField sample_field(const GridSpec& grid, F&& f) {
    ScalarField out(grid);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        const std::array<int, 3> idx = grid.decode(i);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < grid.n; ++a)
            x[static_cast<std::size_t>(a)] = grid.coord(idx[static_cast<std::size_t>(a)]);
        out[i] = f(x);
    }
    return out;
}

}  // namespace sigmak
