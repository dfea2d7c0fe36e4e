#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gbf/gbf.hpp"

namespace gbf::testing {

/// Connected random graph: a random spanning tree plus extra edges with
/// probability p, weights uniform in [0.5, 2] unless unweighted.
inline Graph random_connected_graph(std::mt19937_64& rng, Index n, LaplacianKind kind, double p = 0.3,
                                    bool weighted = true) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    std::vector<std::vector<bool>> used(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    std::vector<Edge> edges;
    auto add = [&](Index i, Index j) {
        if (i > j) std::swap(i, j);
        if (i == j || used[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) return;
        used[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        edges.push_back({i, j, weighted ? weight(rng) : 1.0});
    };
    for (Index v = 1; v < n; ++v) {
        std::uniform_int_distribution<Index> parent(0, v - 1);
        add(parent(rng), v);
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (unit(rng) < p) add(i, j);
        }
    }
    return build_graph(n, std::move(edges), kind);
}

inline LaplacianKind random_kind(std::mt19937_64& rng) {
    static const LaplacianKind kinds[] = {LaplacianKind::Adjacency, LaplacianKind::Standard, LaplacianKind::Normalized};
    return kinds[std::uniform_int_distribution<int>(0, 2)(rng)];
}

inline Vector random_signal(std::mt19937_64& rng, Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = g(rng);
    return x;
}

inline std::vector<Index> random_subset(std::mt19937_64& rng, Index n, Index k) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(k));
    return all;
}

inline std::vector<int> random_binary(std::mt19937_64& rng, Index n) {
    std::bernoulli_distribution coin(0.5);
    std::vector<int> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = coin(rng) ? 1 : -1;
    return out;
}

inline Graph path_graph(Index n, LaplacianKind kind) {
    std::vector<Edge> edges;
    for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
    return build_graph(n, std::move(edges), kind);
}

/// Characteristic polynomial roots of a small symmetric matrix via a
/// generic (non-symmetric) eigensolver, sorted.
inline Vector reference_eigenvalues(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    Vector ev = es.eigenvalues().real();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
}

}  // namespace gbf::testing
