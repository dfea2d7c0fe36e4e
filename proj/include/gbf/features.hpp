#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "graph.hpp"
#include "kernels.hpp"
#include "spectral.hpp"

namespace gbf {

enum class FeatureKind { Binary, Similarity };

/// A feature map psi: V -> V^F together with its feature kernel K^F.
///
/// Binary features map onto the two-node graph {-1, +1} with kernel
/// [[1, alpha], [alpha, 1]]; similarity features map onto a point cloud with
/// the Gaussian kernel exp(-alpha |r_v - r_w|^2).  Kernel entries are
/// evaluated per vertex pair on demand.
class FeatureSpec {
public:
    static FeatureSpec binary(std::vector<int> labels, double alpha) {
        detail::require(alpha >= -1.0 && alpha <= 1.0, ErrorKind::AlphaOutOfRange,
                        "binary feature kernel needs -1 <= alpha <= 1, got " + std::to_string(alpha));
        detail::require(!labels.empty(), ErrorKind::InvalidParameter, "empty feature map");
        for (int l : labels) {
            detail::require(l == 1 || l == -1, ErrorKind::InvalidParameter, "binary feature values must be +1 or -1");
        }
        FeatureSpec f;
        f.kind_ = FeatureKind::Binary;
        f.alpha_ = alpha;
        f.labels_ = std::move(labels);
        return f;
    }

    /// `points` holds one feature vector r_v per row.
    static FeatureSpec similarity(Matrix points, double alpha) {
        detail::require(points.rows() > 0, ErrorKind::EmptyPointCloud, "similarity feature needs points");
        detail::require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidParameter,
                        "similarity feature kernel needs alpha > 0");
        detail::require(points.allFinite(), ErrorKind::NonFinite, "similarity feature values must be finite");
        FeatureSpec f;
        f.kind_ = FeatureKind::Similarity;
        f.alpha_ = alpha;
        f.points_ = std::move(points);
        return f;
    }

    /// Scalar similarity feature r_v in R^1.
    static FeatureSpec similarity(const Vector& values, double alpha) {
        return similarity(Matrix(values), alpha);
    }

    [[nodiscard]] FeatureKind kind() const noexcept { return kind_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] Index size() const noexcept {
        return kind_ == FeatureKind::Binary ? static_cast<Index>(labels_.size()) : points_.rows();
    }
    [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
    [[nodiscard]] const Matrix& points() const noexcept { return points_; }

    /// K^F(psi(v), psi(w)).
    [[nodiscard]] double update(Index v, Index w) const {
        if (kind_ == FeatureKind::Binary) {
            return labels_[static_cast<std::size_t>(v)] == labels_[static_cast<std::size_t>(w)] ? 1.0 : alpha_;
        }
        if (v == w) return 1.0;
        const double d2 = (points_.row(v) - points_.row(w)).squaredNorm();
        return std::max(std::exp(-alpha_ * d2), std::numeric_limits<double>::min());
    }

    /// The globally flipped binary feature (-psi).
    [[nodiscard]] FeatureSpec flipped() const {
        detail::require(kind_ == FeatureKind::Binary, ErrorKind::InvalidParameter, "only binary features flip");
        std::vector<int> neg(labels_.size());
        for (std::size_t k = 0; k < labels_.size(); ++k) neg[k] = -labels_[k];
        return binary(std::move(neg), alpha_);
    }

private:
    FeatureSpec() = default;

    FeatureKind kind_ = FeatureKind::Binary;
    double alpha_ = 0.0;
    std::vector<int> labels_;
    Matrix points_;
};

/// [[1, alpha], [alpha, 1]] = (1 + alpha) I - alpha L^{F_bin}.
inline Eigen::Matrix2d binary_feature_kernel(double alpha) {
    detail::require(alpha >= -1.0 && alpha <= 1.0, ErrorKind::AlphaOutOfRange,
                    "binary feature kernel needs -1 <= alpha <= 1, got " + std::to_string(alpha));
    Eigen::Matrix2d k;
    k << 1.0, alpha, alpha, 1.0;
    return k;
}

/// The two-node feature graph with L = [[1, -1], [-1, 1]].
inline Graph binary_feature_graph() { return build_graph(2, {{0, 1, 1.0}}, LaplacianKind::Standard); }

/// Generating GBF of the binary feature kernel, f^ = (1 + alpha, 1 - alpha).
inline Gbf binary_feature_gbf(double alpha) {
    detail::require(alpha >= -1.0 && alpha <= 1.0, ErrorKind::AlphaOutOfRange, "alpha out of [-1, 1]");
    Vector fhat(2);
    fhat << 1.0 + alpha, 1.0 - alpha;
    return Gbf{std::move(fhat), provenance::Polynomial{{1.0 + alpha, -alpha}}};
}

/// Gaussian kernel matrix exp(-alpha |r_i - r_j|^2) over a point cloud (rows).
inline KernelMatrix similarity_feature_kernel(const Matrix& points, double alpha) {
    detail::require(points.rows() > 0, ErrorKind::EmptyPointCloud, "similarity kernel needs points");
    const auto f = FeatureSpec::similarity(points, alpha);
    const Index n = points.rows();
    Matrix k(n, n);
    for (Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) k(i, j) = k(j, i) = f.update(i, j);
    }
    return KernelMatrix{std::move(k), std::nullopt};
}

/// Shi-Malik bipartition from an eigendecomposition of L_N:
/// sign(D^{-1/2} u_2), zero mapped to +1.
inline FeatureSpec spectral_bipartition(const Graph& g, const Spectrum& normalized, double alpha = -1.0) {
    detail::require(normalized.size() == g.size(), ErrorKind::DimensionMismatch, "spectrum does not match graph");
    detail::require(g.size() >= 2, ErrorKind::InvalidParameter, "bipartition needs at least two vertices");
    for (Index v = 0; v < g.size(); ++v) {
        detail::require(g.degrees()(v) > 0.0, ErrorKind::DegenerateVertex,
                        "vertex " + std::to_string(v) + " is isolated");
    }
    detail::require(is_connected(g), ErrorKind::DisconnectedGraph, "spectral bipartition needs a connected graph");
    const auto u2 = normalized.eigenvector(1);
    std::vector<int> labels(static_cast<std::size_t>(g.size()));
    for (Index v = 0; v < g.size(); ++v) {
        labels[static_cast<std::size_t>(v)] = u2(v) / std::sqrt(g.degrees()(v)) >= 0.0 ? 1 : -1;
    }
    return FeatureSpec::binary(std::move(labels), alpha);
}

inline FeatureSpec spectral_bipartition(const Graph& g, double alpha = -1.0) {
    for (Index v = 0; v < g.size(); ++v) {
        detail::require(g.degrees()(v) > 0.0, ErrorKind::DegenerateVertex,
                        "vertex " + std::to_string(v) + " is isolated");
    }
    detail::require(is_connected(g), ErrorKind::DisconnectedGraph, "spectral bipartition needs a connected graph");
    const Graph normalized = g.kind() == LaplacianKind::Normalized ? g : g.with_kind(LaplacianKind::Normalized);
    return spectral_bipartition(normalized, eigendecompose(normalized), alpha);
}

/// Kernel after the Schur-Hadamard feature updates.
struct AugmentedKernel {
    KernelMatrix base;
    std::vector<FeatureSpec> features;
    KernelMatrix values;
    /// Multiplications spent on the update: d * n * N.
    std::size_t multiplications = 0;
};

/// K_psi(v, w) = K(v, w) * prod_i K^{F_i}(psi_i(v), psi_i(w)), on a full kernel
/// or on the n x N column block at its centers.
inline AugmentedKernel augment_kernel(KernelMatrix base, std::vector<FeatureSpec> features) {
    const Index n = base.rows();
    for (const auto& f : features) {
        detail::require(f.size() == n, ErrorKind::DimensionMismatch,
                        "feature map has length " + std::to_string(f.size()) + ", kernel has " + std::to_string(n) + " rows");
    }
    detail::require(base.is_full() ? base.cols() == n : static_cast<Index>(base.centers->size()) == base.cols(),
                    ErrorKind::DimensionMismatch, "kernel columns do not match its centers");
    KernelMatrix out = base;
    std::size_t mults = 0;
    for (const auto& f : features) {
        for (Index c = 0; c < out.cols(); ++c) {
            const Index w = base.is_full() ? c : (*base.centers)[static_cast<std::size_t>(c)];
            for (Index v = 0; v < n; ++v) out.values(v, c) *= f.update(v, w);
        }
        mults += static_cast<std::size_t>(n) * static_cast<std::size_t>(out.cols());
    }
    return AugmentedKernel{std::move(base), std::move(features), std::move(out), mults};
}

}  // namespace gbf
