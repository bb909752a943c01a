#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ghostfd {

/// Uniform N x N cell grid on [-1,1]^2: (N+1)^2 nodes, spacing h = 2/N.
struct GridSpec {
    int n = 0;
    double h = 0.0;

    explicit GridSpec(int N) : n(N), h(2.0 / N) {
        if (N < 8) throw std::invalid_argument("GridSpec: N must be >= 8");
    }

    int nodes_per_axis() const { return n + 1; }
    int num_nodes() const { return (n + 1) * (n + 1); }
    double x(int i) const { return -1.0 + i * h; }
    double y(int j) const { return -1.0 + j * h; }
    bool contains(int i, int j) const { return i >= 0 && i <= n && j >= 0 && j <= n; }

    bool operator==(const GridSpec&) const = default;
};

/// Row-major node ordering: k = i + j*(N+1). Used by assembly and all file output.
inline int linear_index(int i, int j, const GridSpec& spec) {
    if (!spec.contains(i, j))
        throw std::out_of_range("linear_index: node (" + std::to_string(i) + "," +
                                std::to_string(j) + ") outside grid");
    return i + j * (spec.n + 1);
}

/// Scalar samples on the grid nodes, row-major.
struct GridField {
    GridSpec spec;
    std::vector<double> values;

    explicit GridField(const GridSpec& s, double fill = 0.0)
        : spec(s), values(static_cast<size_t>(s.num_nodes()), fill) {}

    double operator()(int i, int j) const { return values[linear_index(i, j, spec)]; }
    double& operator()(int i, int j) { return values[linear_index(i, j, spec)]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

enum class NeighborKind { StarDist1, StarDist2, Box };

/// Neighbor set of a node, silently clipped at the rectangle edge.
std::vector<std::pair<int, int>> neighbor_set(int i, int j, NeighborKind kind,
                                              const GridSpec& spec);

}  // namespace ghostfd
