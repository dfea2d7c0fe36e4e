#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "features.hpp"
#include "kernels.hpp"
#include "rls.hpp"
#include "spectral.hpp"

namespace gbf {

/// Squared power values in [-kPowerClamp, 0) are rounding noise and become 0.
inline constexpr double kPowerClamp = 1e-10;

/// Relative slack allowed when checking the error bounds.
inline constexpr double kBoundSlack = 1e-6;

namespace detail {

inline void require_full(const KernelMatrix& k, const char* what) {
    require(k.is_full() && k.rows() == k.cols(), ErrorKind::DimensionMismatch, std::string(what) + " must be a full kernel");
}

inline void require_distinct(const std::vector<Index>& w, Index n) {
    require(!w.empty(), ErrorKind::InvalidParameter, "center set must be nonempty");
    check_centers(w, n);
    std::set<Index> seen(w.begin(), w.end());
    require(seen.size() == w.size(), ErrorKind::InvalidCenter, "centers must be distinct");
}

inline void require_bin_psi(const FeatureSpec& psi, Index n) {
    require(psi.kind() == FeatureKind::Binary && psi.alpha() == -1.0, ErrorKind::InvalidParameter,
            "a binary feature with alpha = -1 is required");
    require(psi.size() == n, ErrorKind::DimensionMismatch, "feature map does not match the kernel size");
}

}  // namespace detail

/// P_{W,K}(v) = sqrt(K(v,v) - k_W(v)^T K_W^{-1} k_W(v)).
///
/// At the centers the best approximation reproduces K(., w) exactly, so the
/// value there is set to 0 instead of the rounding residue.
inline Signal power_function(const KernelMatrix& k, const std::vector<Index>& w) {
    detail::require_full(k, "power function kernel");
    const Index n = k.rows();
    detail::require_distinct(w, n);
    const Matrix kw = principal_submatrix(k.values, w, w);
    Matrix b(static_cast<Index>(w.size()), n);
    for (std::size_t a = 0; a < w.size(); ++a) b.row(static_cast<Index>(a)) = k.values.row(w[a]);

    Eigen::LLT<Matrix> llt(kw);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15)) {
        detail::fail(ErrorKind::SingularSubkernel, "kernel restricted to the centers is not positive definite");
    }
    const Matrix ell = llt.solve(b);

    Signal p(n);
    for (Index v = 0; v < n; ++v) {
        double p2 = k.values(v, v) - b.col(v).dot(ell.col(v));
        if (p2 < 0.0) {
            if (p2 < -kPowerClamp * std::max(1.0, k.values(v, v))) {
                detail::fail(ErrorKind::NotPositiveDefinite,
                             "negative squared power " + std::to_string(p2) + " at vertex " + std::to_string(v));
            }
            p2 = 0.0;
        }
        p(v) = std::sqrt(p2);
    }
    for (Index c : w) p(c) = 0.0;
    return p;
}

struct PowerInvariance {
    bool invariant = false;
    double max_deviation = 0.0;
};

/// Compares P_{W,K_psi} with P_{W,K_f} for a binary feature with alpha = -1.
inline PowerInvariance power_invariance_check(const KernelMatrix& kf, const FeatureSpec& psi, const std::vector<Index>& w,
                                              double tolerance = 1e-7) {
    detail::require_full(kf, "base kernel");
    detail::require_bin_psi(psi, kf.rows());
    const auto kpsi = augment_kernel(kf, {psi});
    const Signal pf = power_function(kf, w);
    const Signal ppsi = power_function(kpsi.values, w);
    PowerInvariance out;
    out.max_deviation = (pf - ppsi).cwiseAbs().maxCoeff();
    out.invariant = out.max_deviation <= tolerance;
    return out;
}

/// |y|_{K_psi} from the eigensystem {psi . u_k, f^_k} of K_psi (alpha = -1).
inline double augmented_native_norm(const Spectrum& s, const Gbf& f, const FeatureSpec& psi, const Signal& y) {
    detail::check_gbf(s, f);
    detail::require_bin_psi(psi, s.size());
    detail::require_dims(y, s.size(), "signal");
    detail::require(is_positive_definite(f), ErrorKind::NotPositiveDefinite, "native norm needs a positive definite GBF");
    Signal py(y.size());
    for (Index v = 0; v < y.size(); ++v) py(v) = psi.labels()[static_cast<std::size_t>(v)] * y(v);
    // (psi . u_k)^T y = u_k^T (psi . y)
    const Signal coeffs = s.basis().transpose() * py;
    double acc = 0.0;
    for (Index k = 0; k < s.size(); ++k) acc += coeffs(k) * coeffs(k) / std::max(f.fhat(k), kMultiplierFloor);
    return std::sqrt(acc);
}

struct ErrorBoundReport {
    Signal power;               ///< P_{W,K_f}
    double lambda_min = 0.0;    ///< smallest eigenvalue of K_{f,W}
    double native_norm = 0.0;   ///< |y|_{K_psi}
    Signal regularization;      ///< gamma N sqrt(K_f(v,v)) / (lambda_min + gamma N) * |y|
    Signal bound;               ///< full right-hand side
    Signal prediction;          ///< y*_psi
    std::optional<Signal> interpolant;  ///< y°_psi, absent when K_{psi,W} is numerically singular
    bool holds = false;
    bool regularization_holds = false;
    Index worst_vertex = 0;     ///< largest ratio |y - y*| / bound
};

/// Evaluates |y(v) - y*_psi(v)| <= (P_{W,K_f}(v) + gamma N sqrt(K_f(v,v)) / (lambda_min + gamma N)) |y|_{K_psi}
/// and the regularization part |y°_psi(v) - y*_psi(v)| <= gamma N sqrt(K_f(v,v)) / (lambda_min + gamma N) |y|_{K_psi}.
///
/// Checks use the relative slack kBoundSlack plus an absolute floor of
/// 1e-12 (1 + |y|_inf) for terms that vanish in exact arithmetic.
inline ErrorBoundReport error_bound(const Spectrum& s, const Gbf& f, const FeatureSpec& psi, const std::vector<Index>& w,
                                    double gamma, const Signal& y) {
    detail::check_gbf(s, f);
    detail::require_bin_psi(psi, s.size());
    detail::require_dims(y, s.size(), "signal");
    detail::require(gamma >= 0.0 && std::isfinite(gamma), ErrorKind::InvalidParameter, "gamma must be >= 0");
    const Index n = s.size();
    detail::require_distinct(w, n);
    const double big_n = static_cast<double>(w.size());

    const KernelMatrix kf = kernel_matrix(s, f);
    const auto kpsi = augment_kernel(kf, {psi});
    const LabeledSet data = labeled_from(w, y);

    ErrorBoundReport r;
    r.power = power_function(kf, w);
    r.lambda_min = min_eigenvalue(principal_submatrix(kf.values, w, w));
    r.native_norm = augmented_native_norm(s, f, psi, y);
    r.regularization.resize(n);
    r.bound.resize(n);
    for (Index v = 0; v < n; ++v) {
        const double reg = gamma * big_n * std::sqrt(std::max(0.0, kf.values(v, v))) / (r.lambda_min + gamma * big_n);
        r.regularization(v) = reg * r.native_norm;
        r.bound(v) = (r.power(v) + reg) * r.native_norm;
    }

    FitOptions opts;
    opts.interpolate = gamma == 0.0;
    r.prediction = predict(fit(kpsi.values, data, gamma, opts), kpsi.values);
    try {
        r.interpolant = predict(fit(kpsi.values, data, 0.0, FitOptions{true, {}}), kpsi.values);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularSystem) throw;
    }

    const double floor = 1e-12 * (1.0 + y.cwiseAbs().maxCoeff());
    r.holds = true;
    double worst = -1.0;
    for (Index v = 0; v < n; ++v) {
        const double lhs = std::abs(y(v) - r.prediction(v));
        const double rhs = r.bound(v) * (1.0 + kBoundSlack) + floor;
        if (lhs > rhs) r.holds = false;
        const double ratio = lhs / rhs;
        if (ratio > worst) {
            worst = ratio;
            r.worst_vertex = v;
        }
    }
    r.regularization_holds = r.interpolant.has_value();
    if (r.interpolant) {
        for (Index v = 0; v < n; ++v) {
            const double lhs = std::abs((*r.interpolant)(v) - r.prediction(v));
            if (lhs > r.regularization(v) * (1.0 + kBoundSlack) + floor) r.regularization_holds = false;
        }
    }
    return r;
}

struct ConsistencyReport {
    bool labels_consistent = false;  ///< every label equals psi at its node
    bool applicable = false;         ///< N = 1, or gamma > 2 max_v K_f(v,v)
    bool consistent = false;         ///< sign(y*_psi) == psi everywhere
    std::optional<Index> counterexample;
    double gamma_threshold = 0.0;    ///< 2 max_v K_f(v,v)
    std::string reason;
};

/// Fits the psi-augmented classifier on prior-consistent labels and checks
/// that it reproduces the prior at every node.
inline ConsistencyReport consistency_check(const KernelMatrix& kf, const FeatureSpec& psi, const LabeledSet& data,
                                           double gamma) {
    detail::require_full(kf, "base kernel");
    detail::require_bin_psi(psi, kf.rows());
    validate_labeled_set(data, kf.rows());
    detail::require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::InvalidParameter, "gamma must be > 0");
    const double kmin = kf.values.minCoeff();
    detail::require(kmin > 0.0, ErrorKind::KernelNotPositive,
                    "kernel has a non-positive entry (" + std::to_string(kmin) + ")");

    ConsistencyReport r;
    r.gamma_threshold = 2.0 * kf.values.diagonal().maxCoeff();
    r.labels_consistent = true;
    for (Index i = 0; i < data.size(); ++i) {
        const Index w = data.nodes[static_cast<std::size_t>(i)];
        if (data.values(i) != static_cast<double>(psi.labels()[static_cast<std::size_t>(w)])) {
            r.labels_consistent = false;
            r.counterexample = w;
            r.reason = "label at vertex " + std::to_string(w) + " contradicts the prior";
            return r;
        }
    }
    r.applicable = data.size() == 1 || gamma > r.gamma_threshold;
    const auto kpsi = augment_kernel(kf, {psi});
    const auto labels = classify(predict(fit(kpsi.values, data, gamma), kpsi.values));
    r.consistent = true;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        if (labels[v] != psi.labels()[v]) {
            r.consistent = false;
            r.counterexample = static_cast<Index>(v);
            r.reason = "vertex " + std::to_string(v) + " classified against the prior";
            break;
        }
    }
    if (!r.applicable && r.reason.empty()) r.reason = "N > 1 and gamma <= 2 max K(v,v): no guarantee";
    return r;
}

/// Per-node diagnostics for a fitted configuration.
struct DiagnosticsReport {
    Signal power;
    double lambda_min_w = 0.0;
    Signal bound;  ///< P(v) + gamma N sqrt(K(v,v)) / (lambda_min + gamma N)
    bool single_label = false;        ///< N = 1 scenario
    bool large_gamma = false;         ///< gamma > 2 max K(v,v) scenario
};

inline DiagnosticsReport diagnose(const KernelMatrix& k, const std::vector<Index>& w, double gamma) {
    detail::require_full(k, "kernel");
    DiagnosticsReport d;
    d.power = power_function(k, w);
    d.lambda_min_w = min_eigenvalue(principal_submatrix(k.values, w, w));
    const double big_n = static_cast<double>(w.size());
    d.bound.resize(k.rows());
    for (Index v = 0; v < k.rows(); ++v) {
        d.bound(v) = d.power(v) + gamma * big_n * std::sqrt(std::max(0.0, k.values(v, v))) / (d.lambda_min_w + gamma * big_n);
    }
    d.single_label = w.size() == 1;
    d.large_gamma = gamma > 2.0 * k.values.diagonal().maxCoeff();
    return d;
}

}  // namespace gbf
