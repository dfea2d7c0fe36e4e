#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "error.hpp"
#include "graph.hpp"
#include "spectral.hpp"

namespace gbf {

namespace provenance {
struct Diffusion {
    double t = 0.0;
};
struct VariationalSpline {
    double epsilon = 0.0;
    double s = 1.0;
};
struct Polynomial {
    std::vector<double> coeffs;  ///< monomial basis, coeffs[k] multiplies lambda^k
};
struct Explicit {};
}  // namespace provenance

using GbfProvenance =
    std::variant<provenance::Diffusion, provenance::VariationalSpline, provenance::Polynomial, provenance::Explicit>;

/// Graph basis function stored by its spectral multipliers f^_k.
struct Gbf {
    Vector fhat;
    GbfProvenance provenance = provenance::Explicit{};

    [[nodiscard]] Index size() const noexcept { return fhat.size(); }
};

/// p.d. iff every multiplier is strictly positive (exact sign test).
inline bool is_positive_definite(const Gbf& f) {
    if (f.fhat.size() == 0) return false;
    for (Index k = 0; k < f.fhat.size(); ++k) {
        if (!(f.fhat(k) > 0.0)) return false;
    }
    return true;
}

/// f^_k = g(lambda_k).
template <class Filter>
Gbf gbf_from_filter(const Spectrum& s, Filter&& g, GbfProvenance prov = provenance::Explicit{}) {
    Vector fhat(s.size());
    for (Index k = 0; k < s.size(); ++k) {
        fhat(k) = static_cast<double>(g(s.eigenvalue(k)));
        detail::require(std::isfinite(fhat(k)), ErrorKind::NonFiniteFilterValue,
                        "filter is not finite at eigenvalue " + std::to_string(s.eigenvalue(k)));
    }
    return Gbf{std::move(fhat), std::move(prov)};
}

/// Diffusion GBF, f^ = exp(-t lambda).
inline Gbf diffusion_gbf(const Spectrum& s, double t) {
    return gbf_from_filter(s, [t](double lambda) { return std::exp(-t * lambda); }, provenance::Diffusion{t});
}

/// Variational spline GBF, f^ = (eps + lambda)^{-s}.
inline Gbf spline_gbf(const Spectrum& s, double epsilon, double power) {
    return gbf_from_filter(
        s, [epsilon, power](double lambda) { return std::pow(epsilon + lambda, -power); },
        provenance::VariationalSpline{epsilon, power});
}

inline double horner(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// Polynomial GBF, f^ = p(lambda) with monomial coefficients.
inline Gbf polynomial_gbf(const Spectrum& s, std::vector<double> coeffs) {
    detail::require(!coeffs.empty(), ErrorKind::InvalidParameter, "polynomial needs at least one coefficient");
    Gbf f = gbf_from_filter(s, [&coeffs](double lambda) { return horner(coeffs, lambda); });
    f.provenance = provenance::Polynomial{std::move(coeffs)};
    return f;
}

/// Symmetric kernel values, either the full n x n matrix or the n x N block
/// of columns at `centers`.
struct KernelMatrix {
    Matrix values;
    std::optional<std::vector<Index>> centers;

    [[nodiscard]] bool is_full() const noexcept { return !centers.has_value(); }
    [[nodiscard]] Index rows() const noexcept { return values.rows(); }
    [[nodiscard]] Index cols() const noexcept { return values.cols(); }
};

namespace detail {

inline void check_centers(std::span<const Index> centers, Index n) {
    for (Index w : centers) {
        require(w >= 0 && w < n, ErrorKind::InvalidCenter,
                "center " + std::to_string(w) + " out of range for n = " + std::to_string(n));
    }
}

inline void check_gbf(const Spectrum& s, const Gbf& f) {
    require(f.size() == s.size(), ErrorKind::DimensionMismatch,
            "GBF has " + std::to_string(f.size()) + " multipliers, spectrum has " + std::to_string(s.size()));
}

}  // namespace detail

/// K_f = U diag(f^) U^T, or its columns at the given centers.
inline KernelMatrix kernel_matrix(const Spectrum& s, const Gbf& f,
                                  std::optional<std::vector<Index>> centers = std::nullopt) {
    detail::check_gbf(s, f);
    const Matrix& u = s.basis();
    if (!centers) {
        Matrix k = u * f.fhat.asDiagonal() * u.transpose();
        // Exact symmetry; the product above is only symmetric to rounding.
        k = 0.5 * (k + k.transpose()).eval();
        return KernelMatrix{std::move(k), std::nullopt};
    }
    detail::check_centers(*centers, s.size());
    Matrix rows(static_cast<Index>(centers->size()), s.size());
    for (std::size_t c = 0; c < centers->size(); ++c) rows.row(static_cast<Index>(c)) = u.row((*centers)[c]);
    Matrix block = u * f.fhat.asDiagonal() * rows.transpose();
    return KernelMatrix{std::move(block), std::move(centers)};
}

/// Columns of p(L) at the centers by Horner's scheme on sparse matrix-vector
/// products; no eigendecomposition involved.
inline KernelMatrix polynomial_kernel_columns(const Graph& g, std::span<const double> coeffs,
                                              std::vector<Index> centers) {
    detail::require(!coeffs.empty(), ErrorKind::InvalidParameter, "polynomial needs at least one coefficient");
    const Index n = g.size();
    detail::check_centers(centers, n);

    using Sparse = Eigen::SparseMatrix<double>;
    std::vector<Eigen::Triplet<double>> trip;
    const Matrix& lap = g.laplacian();
    for (Index v = 0; v < n; ++v) {
        if (lap(v, v) != 0.0) trip.emplace_back(v, v, lap(v, v));
    }
    for (const auto& e : g.edges()) {
        trip.emplace_back(e.i, e.j, lap(e.i, e.j));
        trip.emplace_back(e.j, e.i, lap(e.j, e.i));
    }
    Sparse sl(n, n);
    sl.setFromTriplets(trip.begin(), trip.end());

    const auto degree = static_cast<std::ptrdiff_t>(coeffs.size()) - 1;
    Matrix out(n, static_cast<Index>(centers.size()));
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const Index w = centers[c];
        Vector acc = Vector::Zero(n);
        acc(w) = coeffs[static_cast<std::size_t>(degree)];
        for (std::ptrdiff_t k = degree - 1; k >= 0; --k) {
            Vector next = sl * acc;
            next(w) += coeffs[static_cast<std::size_t>(k)];
            acc = std::move(next);
        }
        out.col(static_cast<Index>(c)) = acc;
    }
    return KernelMatrix{std::move(out), std::move(centers)};
}

/// Multipliers below this are clamped before division in the native inner product.
inline constexpr double kMultiplierFloor = 1e-300;

struct NativeProduct {
    double value = 0.0;
    bool clamped = false;  ///< some f^_k was raised to kMultiplierFloor
};

/// <x, y>_K = sum_k x^_k y^_k / f^_k, reporting whether the floor was applied.
inline NativeProduct native_inner_checked(const Spectrum& s, const Gbf& f, const Signal& x, const Signal& y) {
    detail::check_gbf(s, f);
    detail::require(is_positive_definite(f), ErrorKind::NotPositiveDefinite,
                    "native space inner product needs strictly positive multipliers");
    const Signal xhat = gft(s, x);
    const Signal yhat = gft(s, y);
    NativeProduct out;
    for (Index k = 0; k < s.size(); ++k) {
        double fk = f.fhat(k);
        if (fk < kMultiplierFloor) {
            fk = kMultiplierFloor;
            out.clamped = true;
        }
        out.value += xhat(k) * yhat(k) / fk;
    }
    return out;
}

inline double native_inner(const Spectrum& s, const Gbf& f, const Signal& x, const Signal& y) {
    return native_inner_checked(s, f, x, y).value;
}

inline double native_norm(const Spectrum& s, const Gbf& f, const Signal& x) {
    return std::sqrt(std::max(0.0, native_inner(s, f, x, x)));
}

/// Multipliers f^_k e^_k' at Kronecker index k * n' + k'.
inline Gbf tensor_gbf(const Gbf& f, const Gbf& e) {
    detail::require(f.size() > 0 && e.size() > 0, ErrorKind::DimensionMismatch, "empty factor GBF");
    const Index n = f.size();
    const Index m = e.size();
    Vector fhat(n * m);
    for (Index k = 0; k < n; ++k) {
        for (Index kp = 0; kp < m; ++kp) fhat(k * m + kp) = f.fhat(k) * e.fhat(kp);
    }
    return Gbf{std::move(fhat), provenance::Explicit{}};
}

/// tensor_gbf rearranged to the column order of a TensorSpectrum.
inline Gbf tensor_gbf(const Gbf& f, const Gbf& e, const TensorSpectrum& ts) {
    const Gbf kron = tensor_gbf(f, e);
    detail::require(kron.size() == ts.spectrum.size(), ErrorKind::DimensionMismatch,
                    "tensor GBF does not match the product spectrum");
    Vector fhat(kron.size());
    for (Index c = 0; c < kron.size(); ++c) fhat(c) = kron.fhat(ts.order[static_cast<std::size_t>(c)]);
    return Gbf{std::move(fhat), provenance::Explicit{}};
}

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

/// Principal submatrix K(W, W) of a full kernel, or the rows W of a column
/// block whose centers are W.
inline Matrix principal_submatrix(const Matrix& k, std::span<const Index> rows, std::span<const Index> cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) out(static_cast<Index>(a), static_cast<Index>(b)) = k(rows[a], cols[b]);
    }
    return out;
}

/// Columns of a full kernel at the given centers.
inline KernelMatrix kernel_columns(const KernelMatrix& full, std::vector<Index> centers) {
    detail::require(full.is_full(), ErrorKind::DimensionMismatch, "column extraction needs a full kernel");
    detail::check_centers(centers, full.rows());
    Matrix block(full.rows(), static_cast<Index>(centers.size()));
    for (std::size_t c = 0; c < centers.size(); ++c) block.col(static_cast<Index>(c)) = full.values.col(centers[c]);
    return KernelMatrix{std::move(block), std::move(centers)};
}

}  // namespace gbf
