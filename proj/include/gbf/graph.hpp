#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace gbf {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class LaplacianKind { Adjacency, Standard, Normalized, Custom };

constexpr std::string_view to_string(LaplacianKind kind) noexcept {
    switch (kind) {
    case LaplacianKind::Adjacency: return "adjacency";
    case LaplacianKind::Standard: return "standard";
    case LaplacianKind::Normalized: return "normalized";
    case LaplacianKind::Custom: return "custom";
    }
    return "custom";
}

inline LaplacianKind parse_laplacian_kind(std::string_view name) {
    if (name == "adjacency") return LaplacianKind::Adjacency;
    if (name == "standard") return LaplacianKind::Standard;
    if (name == "normalized") return LaplacianKind::Normalized;
    if (name == "custom") return LaplacianKind::Custom;
    detail::fail(ErrorKind::ConfigError, "unknown Laplacian kind '" + std::string(name) + "'");
}

/// Undirected weighted edge, 0-based vertex indices, stored with i < j.
struct Edge {
    Index i = 0;
    Index j = 0;
    double w = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Symmetry tolerance relative to the largest absolute matrix entry.
inline constexpr double kSymmetryTolerance = 1e-12;

struct LaplacianReport {
    bool valid = true;
    bool symmetric = true;
    /// Off-diagonal index pairs (row < col) that are asymmetric or positive.
    std::vector<std::pair<Index, Index>> violations;

    explicit operator bool() const noexcept { return valid; }
};

/// Checks the generalized-Laplacian sign pattern: symmetric, off-diagonal
/// entries nonpositive (negative exactly at edges), diagonal unrestricted.
inline LaplacianReport validate_generalized_laplacian(const Matrix& m) {
    LaplacianReport report;
    if (m.rows() != m.cols()) {
        report.valid = false;
        report.symmetric = false;
        return report;
    }
    const double scale = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
    const double tol = kSymmetryTolerance * scale;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = i + 1; j < m.cols(); ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            const bool asym = std::abs(a - b) > tol || (a < 0.0) != (b < 0.0);
            if (asym) report.symmetric = false;
            if (asym || a > 0.0 || b > 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
                report.valid = false;
                report.violations.emplace_back(i, j);
            }
        }
    }
    return report;
}

/// Immutable graph with its generalized Laplacian.
class Graph {
public:
    /// L_A = -A, L_S = D - A, L_N = I - D^{-1/2} A D^{-1/2}; weights enter A directly.
    static Graph build(Index n, std::vector<Edge> edges, LaplacianKind kind) {
        detail::require(n >= 1, ErrorKind::InvalidParameter, "vertex count must be positive");
        detail::require(kind != LaplacianKind::Custom, ErrorKind::InvalidParameter,
                        "custom Laplacians are built with Graph::from_laplacian");
        std::set<std::pair<Index, Index>> seen;
        for (auto& e : edges) {
            const std::string where = "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ")";
            detail::require(e.i >= 0 && e.i < n && e.j >= 0 && e.j < n, ErrorKind::InvalidEdge,
                            where + " has an out-of-range vertex");
            detail::require(e.i != e.j, ErrorKind::InvalidEdge, where + " is a self-loop");
            detail::require(std::isfinite(e.w) && e.w > 0.0, ErrorKind::InvalidEdge,
                            where + " has a nonpositive weight");
            if (e.i > e.j) std::swap(e.i, e.j);
            detail::require(seen.emplace(e.i, e.j).second, ErrorKind::InvalidEdge, where + " is duplicated");
        }
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });

        Vector degree = Vector::Zero(n);
        for (const auto& e : edges) {
            degree(e.i) += e.w;
            degree(e.j) += e.w;
        }

        Matrix lap = Matrix::Zero(n, n);
        switch (kind) {
        case LaplacianKind::Adjacency:
            for (const auto& e : edges) lap(e.i, e.j) = lap(e.j, e.i) = -e.w;
            break;
        case LaplacianKind::Standard:
            for (const auto& e : edges) lap(e.i, e.j) = lap(e.j, e.i) = -e.w;
            lap.diagonal() = degree;
            break;
        case LaplacianKind::Normalized: {
            for (Index v = 0; v < n; ++v) {
                detail::require(degree(v) > 0.0, ErrorKind::DegenerateVertex,
                                "vertex " + std::to_string(v) + " is isolated; L_N needs positive degrees");
            }
            const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
            for (const auto& e : edges) lap(e.i, e.j) = lap(e.j, e.i) = -e.w * inv_sqrt(e.i) * inv_sqrt(e.j);
            lap.diagonal().setOnes();
            break;
        }
        case LaplacianKind::Custom:
            break;
        }
        return Graph(n, std::move(edges), std::move(lap), kind, std::move(degree));
    }

    /// Wraps an arbitrary generalized Laplacian; the edge set is read off the
    /// negative off-diagonal entries with weight -L(i, j).
    static Graph from_laplacian(const Matrix& lap, LaplacianKind kind = LaplacianKind::Custom) {
        detail::require(lap.rows() == lap.cols() && lap.rows() >= 1, ErrorKind::InvalidParameter,
                        "Laplacian must be a nonempty square matrix");
        const auto report = validate_generalized_laplacian(lap);
        if (!report.valid) {
            const auto [i, j] = report.violations.empty() ? std::pair<Index, Index>{0, 0} : report.violations.front();
            detail::fail(ErrorKind::InvalidEdge, "not a generalized Laplacian; first violation at (" +
                                                     std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        const Index n = lap.rows();
        std::vector<Edge> edges;
        Vector degree = Vector::Zero(n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (lap(i, j) < 0.0) {
                    edges.push_back({i, j, -lap(i, j)});
                    degree(i) -= lap(i, j);
                    degree(j) -= lap(i, j);
                }
            }
        }
        Matrix sym = 0.5 * (lap + lap.transpose());
        return Graph(n, std::move(edges), std::move(sym), kind, std::move(degree));
    }

    [[nodiscard]] Index size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const Matrix& laplacian() const noexcept { return laplacian_; }
    [[nodiscard]] LaplacianKind kind() const noexcept { return kind_; }
    /// Weighted degrees (row sums of the weighted adjacency matrix).
    [[nodiscard]] const Vector& degrees() const noexcept { return degree_; }

    [[nodiscard]] Matrix adjacency() const {
        Matrix a = Matrix::Zero(n_, n_);
        for (const auto& e : edges_) a(e.i, e.j) = a(e.j, e.i) = e.w;
        return a;
    }

    /// The same edge set with a different Laplacian construction.
    [[nodiscard]] Graph with_kind(LaplacianKind kind) const { return build(n_, edges_, kind); }

private:
    Graph(Index n, std::vector<Edge> edges, Matrix lap, LaplacianKind kind, Vector degree)
        : n_(n), edges_(std::move(edges)), laplacian_(std::move(lap)), kind_(kind), degree_(std::move(degree)) {}

    Index n_;
    std::vector<Edge> edges_;
    Matrix laplacian_;
    LaplacianKind kind_;
    Vector degree_;
};

inline Graph build_graph(Index n, std::vector<Edge> edges, LaplacianKind kind) {
    return Graph::build(n, std::move(edges), kind);
}

/// Component id per vertex (0-based, in order of first appearance).
inline std::vector<Index> connected_components(const Graph& g) {
    const Index n = g.size();
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
    for (const auto& e : g.edges()) {
        adj[static_cast<std::size_t>(e.i)].push_back(e.j);
        adj[static_cast<std::size_t>(e.j)].push_back(e.i);
    }
    std::vector<Index> comp(static_cast<std::size_t>(n), -1);
    Index next = 0;
    for (Index s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::queue<Index> queue;
        queue.push(s);
        comp[static_cast<std::size_t>(s)] = next;
        while (!queue.empty()) {
            const Index v = queue.front();
            queue.pop();
            for (Index w : adj[static_cast<std::size_t>(v)]) {
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = next;
                    queue.push(w);
                }
            }
        }
        ++next;
    }
    return comp;
}

inline bool is_connected(const Graph& g) {
    const auto comp = connected_components(g);
    return std::all_of(comp.begin(), comp.end(), [](Index c) { return c == 0; });
}

/// Dense Kronecker product A (x) B.
inline Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// A (+) B = A (x) I + I (x) B.
inline Matrix kronecker_sum(const Matrix& a, const Matrix& b) {
    return kronecker(a, Matrix::Identity(b.rows(), b.cols())) + kronecker(Matrix::Identity(a.rows(), a.cols()), b);
}

struct ProductGraph {
    std::vector<Graph> factors;
    Graph graph;
    std::vector<Index> factor_dims;
};

/// Default cap on the number of entries (n n')^2 of the dense product Laplacian.
inline constexpr double kMaxProductEntries = 1e6;

/// Cartesian product with Laplacian L^G (+) L^F.  Vertex (i, i') of the
/// product has flat index i * n' + i'.
inline ProductGraph cartesian_product(const Graph& g, const Graph& f, double max_entries = kMaxProductEntries) {
    const double dim = static_cast<double>(g.size()) * static_cast<double>(f.size());
    detail::require(dim * dim <= max_entries, ErrorKind::SizeOverflow,
                    "product dimension " + std::to_string(static_cast<long long>(dim)) + " exceeds the configured maximum");
    Matrix lap = kronecker_sum(g.laplacian(), f.laplacian());
    LaplacianKind kind = LaplacianKind::Custom;
    if (g.kind() == f.kind() && (g.kind() == LaplacianKind::Standard || g.kind() == LaplacianKind::Adjacency)) {
        kind = g.kind();
    }
    Graph product = Graph::from_laplacian(lap, kind);
    return ProductGraph{{g, f}, std::move(product), {g.size(), f.size()}};
}

/// Left fold over several factors: ((G1 x G2) x G3) x ...
inline ProductGraph cartesian_product(std::span<const Graph> factors, double max_entries = kMaxProductEntries) {
    detail::require(!factors.empty(), ErrorKind::InvalidParameter, "no factors given");
    if (factors.size() == 1) return ProductGraph{{factors[0]}, factors[0], {factors[0].size()}};
    ProductGraph acc = cartesian_product(factors[0], factors[1], max_entries);
    for (std::size_t k = 2; k < factors.size(); ++k) {
        ProductGraph next = cartesian_product(acc.graph, factors[k], max_entries);
        acc.factors.push_back(factors[k]);
        acc.factor_dims.push_back(factors[k].size());
        acc.graph = std::move(next.graph);
    }
    return acc;
}

}  // namespace gbf
