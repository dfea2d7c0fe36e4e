#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "graph.hpp"
#include "kernels.hpp"
#include "spectral.hpp"

namespace gbf {

/// Labeled nodes W = (w_1, ..., w_N) with values y(w_i).
struct LabeledSet {
    std::vector<Index> nodes;
    Vector values;

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(nodes.size()); }
};

inline void validate_labeled_set(const LabeledSet& d, Index n) {
    detail::require(!d.nodes.empty(), ErrorKind::InvalidParameter, "at least one labeled node is required");
    detail::require(d.values.size() == d.size(), ErrorKind::DimensionMismatch,
                    std::to_string(d.nodes.size()) + " nodes but " + std::to_string(d.values.size()) + " labels");
    std::set<Index> seen;
    for (Index w : d.nodes) {
        detail::require(w >= 0 && w < n, ErrorKind::InvalidCenter,
                        "labeled node " + std::to_string(w) + " out of range for n = " + std::to_string(n));
        detail::require(seen.insert(w).second, ErrorKind::InvalidCenter, "labeled node " + std::to_string(w) + " repeated");
    }
    detail::require(d.values.allFinite(), ErrorKind::NonFinite, "labels must be finite");
}

/// LabeledSet taking the values of `truth` at `nodes`.
inline LabeledSet labeled_from(const std::vector<Index>& nodes, const Vector& truth) {
    LabeledSet d{nodes, Vector(static_cast<Index>(nodes.size()))};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        detail::require(nodes[i] >= 0 && nodes[i] < truth.size(), ErrorKind::InvalidCenter, "labeled node out of range");
        d.values(static_cast<Index>(i)) = truth(nodes[i]);
    }
    return d;
}

struct RlsModel {
    std::vector<Index> centers;
    Vector coefficients;
    double gamma = 0.0;
    std::string kernel_spec;  ///< free-form description carried into model dumps
};

struct FitOptions {
    /// Required for gamma = 0: the predictor then interpolates the labels.
    bool interpolate = false;
    std::string kernel_spec;
};

namespace detail {
inline double pivot_ratio(const Vector& pivots) {
    const double hi = pivots.maxCoeff();
    return hi > 0.0 ? pivots.minCoeff() / hi : 0.0;
}
}  // namespace detail

/// Reciprocal condition numbers below this make an interpolation system singular.
inline constexpr double kMinReciprocalCondition = 1e-12;

/// The N x N matrix K_W from a full kernel or from its column block at W.
inline Matrix center_submatrix(const KernelMatrix& k, const std::vector<Index>& w) {
    if (k.is_full()) {
        detail::require(k.cols() == k.rows(), ErrorKind::DimensionMismatch, "full kernel must be square");
        detail::check_centers(w, k.rows());
        return principal_submatrix(k.values, w, w);
    }
    detail::require(*k.centers == w, ErrorKind::DimensionMismatch, "kernel columns are not at the labeled nodes");
    detail::check_centers(w, k.rows());
    Matrix out(static_cast<Index>(w.size()), static_cast<Index>(w.size()));
    for (std::size_t a = 0; a < w.size(); ++a) out.row(static_cast<Index>(a)) = k.values.row(w[a]);
    return out;
}

/// Solves (K_W + gamma N I) c = y.
inline RlsModel fit(const KernelMatrix& k, const LabeledSet& data, double gamma, const FitOptions& opts = {}) {
    validate_labeled_set(data, k.rows());
    detail::require(std::isfinite(gamma) && gamma >= 0.0, ErrorKind::InvalidParameter, "gamma must be >= 0");
    detail::require(gamma > 0.0 || opts.interpolate, ErrorKind::InvalidParameter,
                    "gamma = 0 requires the interpolate option");
    const Index n_lab = data.size();
    Matrix a = center_submatrix(k, data.nodes);
    detail::require(a.allFinite(), ErrorKind::NonFinite, "kernel values at the labeled nodes are not finite");
    a.diagonal().array() += gamma * static_cast<double>(n_lab);

    // Eigen's LDLT rcond() can miss an exactly singular system (zero pivot),
    // so the pivot ratio of the factor diagonal bounds it as well.
    Vector c;
    double rcond = 0.0;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
        c = llt.solve(data.values);
        const Vector d = Matrix(llt.matrixL()).diagonal();
        rcond = std::min(llt.rcond(), detail::pivot_ratio(d.cwiseAbs2()));
    } else {
        Eigen::LDLT<Matrix> ldlt(a);
        if (ldlt.info() != Eigen::Success) detail::fail(ErrorKind::SingularSystem, "RLS system could not be factorized");
        c = ldlt.solve(data.values);
        rcond = std::min(ldlt.rcond(), detail::pivot_ratio(ldlt.vectorD().cwiseAbs()));
    }
    if (gamma == 0.0 && !(rcond >= kMinReciprocalCondition)) {
        detail::fail(ErrorKind::SingularSystem,
                     "interpolation matrix is numerically singular (reciprocal condition " + std::to_string(rcond) + ")");
    }
    if (!(rcond > 0.0)) detail::fail(ErrorKind::SingularSystem, "RLS system is singular");
    detail::require(c.allFinite(), ErrorKind::NonFinite, "RLS coefficients are not finite");
    return RlsModel{data.nodes, std::move(c), gamma, opts.kernel_spec};
}

/// y*(v) = sum_i c_i K(v, w_i) from the n x N block of kernel columns.
inline Signal predict(const RlsModel& m, const Matrix& columns) {
    detail::require(columns.cols() == static_cast<Index>(m.centers.size()), ErrorKind::DimensionMismatch,
                    "expected " + std::to_string(m.centers.size()) + " kernel columns, got " + std::to_string(columns.cols()));
    return columns * m.coefficients;
}

inline Signal predict(const RlsModel& m, const KernelMatrix& k) {
    if (k.is_full()) {
        detail::check_centers(m.centers, k.cols());
        Matrix block(k.rows(), static_cast<Index>(m.centers.size()));
        for (std::size_t c = 0; c < m.centers.size(); ++c) block.col(static_cast<Index>(c)) = k.values.col(m.centers[c]);
        return predict(m, block);
    }
    detail::require(*k.centers == m.centers, ErrorKind::DimensionMismatch, "kernel columns do not match model centers");
    return predict(m, k.values);
}

/// sign(y) with sign(0) = +1.
inline std::vector<int> classify(const Signal& y) {
    std::vector<int> out(static_cast<std::size_t>(y.size()));
    for (Index v = 0; v < y.size(); ++v) out[static_cast<std::size_t>(v)] = y(v) >= 0.0 ? 1 : -1;
    return out;
}

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    detail::require(pred.size() == truth.size(), ErrorKind::DimensionMismatch,
                    "prediction has " + std::to_string(pred.size()) + " labels, truth has " + std::to_string(truth.size()));
    detail::require(!pred.empty(), ErrorKind::DimensionMismatch, "empty label vectors");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

/// (1/N) sum_i (x(w_i) - y_i)^2 + gamma |x|_K^2.
inline double rls_functional(const Spectrum& s, const Gbf& f, const LabeledSet& data, double gamma, const Signal& x) {
    double misfit = 0.0;
    for (Index i = 0; i < data.size(); ++i) {
        const double r = x(data.nodes[static_cast<std::size_t>(i)]) - data.values(i);
        misfit += r * r;
    }
    return misfit / static_cast<double>(data.size()) + gamma * native_inner(s, f, x, x);
}

/// One-vs-rest reduction: one RLS fit per class with targets +1/-1, label by
/// the largest score.  Classes are the distinct values of `labels`, ascending.
struct MulticlassResult {
    std::vector<int> classes;
    Matrix scores;  ///< n x classes
    std::vector<int> labels;
};

inline MulticlassResult one_vs_rest(const KernelMatrix& k, const std::vector<Index>& nodes, const std::vector<int>& labels,
                                    double gamma) {
    detail::require(nodes.size() == labels.size(), ErrorKind::DimensionMismatch, "nodes and labels differ in length");
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    detail::require(classes.size() >= 2, ErrorKind::InvalidParameter, "one-vs-rest needs at least two classes");

    MulticlassResult out;
    out.classes = classes;
    out.scores.resize(k.rows(), static_cast<Index>(classes.size()));
    for (std::size_t c = 0; c < classes.size(); ++c) {
        LabeledSet d{nodes, Vector(static_cast<Index>(nodes.size()))};
        for (std::size_t i = 0; i < nodes.size(); ++i) d.values(static_cast<Index>(i)) = labels[i] == classes[c] ? 1.0 : -1.0;
        out.scores.col(static_cast<Index>(c)) = predict(fit(k, d, gamma), k);
    }
    out.labels.resize(static_cast<std::size_t>(k.rows()));
    for (Index v = 0; v < k.rows(); ++v) {
        Index best = 0;
        out.scores.row(v).maxCoeff(&best);
        out.labels[static_cast<std::size_t>(v)] = classes[static_cast<std::size_t>(best)];
    }
    return out;
}

}  // namespace gbf
