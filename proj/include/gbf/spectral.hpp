#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "graph.hpp"

namespace gbf {

/// A real signal over the ordered vertex set.
using Signal = Eigen::VectorXd;

/// Residual tolerances every eigendecomposition must meet.
inline constexpr double kOrthonormalityTolerance = 1e-8;
inline constexpr double kEigenResidualTolerance = 1e-8;

namespace detail {

/// FNV-1a over the dimension and raw bytes of a matrix.
inline std::string matrix_digest(const Matrix& m) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= p[k];
            h *= 1099511628211ULL;
        }
    };
    const std::int64_t dims[2] = {static_cast<std::int64_t>(m.rows()), static_cast<std::int64_t>(m.cols())};
    mix(dims, sizeof dims);
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            const double v = m(i, j) == 0.0 ? 0.0 : m(i, j);  // fold -0.0
            mix(&v, sizeof v);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void require_dims(const Signal& x, Index n, const char* what) {
    require(x.size() == n, ErrorKind::DimensionMismatch,
            std::string(what) + " has length " + std::to_string(x.size()) + ", expected " + std::to_string(n));
}

}  // namespace detail

/// Orthonormal eigendecomposition L = U diag(lambda) U^T.
///
/// Eigenvalues ascend; columns of U follow the sign convention that each
/// column's entry of largest magnitude is positive (first such index on ties).
class Spectrum {
public:
    Spectrum(Vector eigenvalues, Matrix basis, std::string source_hash)
        : eigenvalues_(std::move(eigenvalues)), basis_(std::move(basis)), source_hash_(std::move(source_hash)) {
        detail::require(basis_.rows() == basis_.cols() && basis_.cols() == eigenvalues_.size(),
                        ErrorKind::DimensionMismatch, "eigenvector matrix does not match eigenvalue count");
    }

    [[nodiscard]] Index size() const noexcept { return eigenvalues_.size(); }
    [[nodiscard]] const Vector& eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] double eigenvalue(Index k) const { return eigenvalues_(k); }
    /// Column k is the eigenvector u_k.
    [[nodiscard]] const Matrix& basis() const noexcept { return basis_; }
    [[nodiscard]] auto eigenvector(Index k) const { return basis_.col(k); }
    [[nodiscard]] const std::string& source_hash() const noexcept { return source_hash_; }

    /// U diag(values) U^T.
    [[nodiscard]] Matrix synthesize(const Vector& values) const {
        return basis_ * values.asDiagonal() * basis_.transpose();
    }

private:
    Vector eigenvalues_;
    Matrix basis_;
    std::string source_hash_;
};

/// Flips each column so its largest-magnitude entry is positive.
inline void normalize_signs(Matrix& basis) {
    for (Index k = 0; k < basis.cols(); ++k) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < basis.rows(); ++i) {
            const double a = std::abs(basis(i, k));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (basis(arg, k) < 0.0) basis.col(k) = -basis.col(k);
    }
}

struct SpectrumResiduals {
    double orthonormality = 0.0;  ///< max |U^T U - I|
    double eigen = 0.0;           ///< max |L U - U diag(lambda)|
};

inline SpectrumResiduals spectrum_residuals(const Matrix& lap, const Spectrum& s) {
    const Matrix& u = s.basis();
    SpectrumResiduals r;
    r.orthonormality = (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
    r.eigen = (lap * u - u * s.eigenvalues().asDiagonal()).cwiseAbs().maxCoeff();
    return r;
}

/// Dense symmetric eigendecomposition of a Laplacian matrix.
inline Spectrum eigendecompose(const Matrix& lap) {
    detail::require(lap.rows() == lap.cols() && lap.rows() >= 1, ErrorKind::DimensionMismatch,
                    "Laplacian must be a nonempty square matrix");
    detail::require(lap.allFinite(), ErrorKind::NonFinite, "Laplacian has non-finite entries");
    const Index n = lap.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(lap, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        detail::fail(ErrorKind::ConvergenceFailure, "symmetric eigensolver did not converge for n = " + std::to_string(n));
    }
    // Eigen already sorts ascending; a stable pass pins the tie order.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const Vector& raw = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&raw](Index a, Index b) { return raw(a) < raw(b); });
    Vector values(n);
    Matrix basis(n, n);
    for (Index k = 0; k < n; ++k) {
        values(k) = raw(order[static_cast<std::size_t>(k)]);
        basis.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    }
    normalize_signs(basis);
    Spectrum s(std::move(values), std::move(basis), detail::matrix_digest(lap));

    const auto res = spectrum_residuals(lap, s);
    const double scale = 1.0 + lap.cwiseAbs().maxCoeff();
    if (res.orthonormality > kOrthonormalityTolerance || res.eigen > kEigenResidualTolerance * scale) {
        detail::fail(ErrorKind::ConvergenceFailure,
                     "eigendecomposition residuals too large (orthonormality " + std::to_string(res.orthonormality) +
                         ", eigen " + std::to_string(res.eigen) + ")");
    }
    return s;
}

inline Spectrum eigendecompose(const Graph& g) { return eigendecompose(g.laplacian()); }

/// Graph Fourier transform x^ = U^T x.
inline Signal gft(const Spectrum& s, const Signal& x) {
    detail::require_dims(x, s.size(), "signal");
    return s.basis().transpose() * x;
}

/// Inverse transform x = U x^.
inline Signal igft(const Spectrum& s, const Signal& xhat) {
    detail::require_dims(xhat, s.size(), "spectral signal");
    return s.basis() * xhat;
}

/// x * y = U diag(x^) U^T y.
inline Signal convolve(const Spectrum& s, const Signal& x, const Signal& y) {
    detail::require_dims(x, s.size(), "left signal");
    detail::require_dims(y, s.size(), "right signal");
    const Signal xhat = s.basis().transpose() * x;
    const Signal yhat = s.basis().transpose() * y;
    return s.basis() * xhat.cwiseProduct(yhat);
}

/// Convolution operator C_x = U diag(x^) U^T as a matrix.
inline Matrix convolution_operator(const Spectrum& s, const Signal& x) {
    detail::require_dims(x, s.size(), "signal");
    return s.synthesize(gft(s, x));
}

/// Operator norm of C_x, i.e. max_k |x^_k|.
inline double algebra_norm(const Spectrum& s, const Signal& x) {
    const Signal xhat = gft(s, x);
    return xhat.size() == 0 ? 0.0 : xhat.cwiseAbs().maxCoeff();
}

/// Unity element of the convolution, sum_k u_k.
inline Signal unity_element(const Spectrum& s) { return s.basis().rowwise().sum(); }

/// Unit impulse delta_v.
inline Signal delta(Index n, Index v) {
    detail::require(v >= 0 && v < n, ErrorKind::InvalidCenter, "vertex " + std::to_string(v) + " out of range");
    Signal d = Signal::Zero(n);
    d(v) = 1.0;
    return d;
}

/// Spectrum of a Cartesian product assembled from the factor spectra.
///
/// Eigenvector u_k^G (x) u_k'^F sits at Kronecker index k * n' + k'.  The
/// returned spectrum is sorted ascending (stable in the Kronecker index), and
/// order[c] is the Kronecker index of column c.
struct TensorSpectrum {
    Spectrum spectrum;
    std::vector<Index> order;
};

inline TensorSpectrum tensor_spectrum(const Spectrum& g, const Spectrum& f) {
    const Index n = g.size();
    const Index m = f.size();
    Vector sums(n * m);
    for (Index k = 0; k < n; ++k) {
        for (Index kp = 0; kp < m; ++kp) sums(k * m + kp) = g.eigenvalue(k) + f.eigenvalue(kp);
    }
    const Matrix kron = kronecker(g.basis(), f.basis());
    std::vector<Index> order(static_cast<std::size_t>(n * m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&sums](Index a, Index b) { return sums(a) < sums(b); });
    Vector values(n * m);
    Matrix basis(n * m, n * m);
    for (Index c = 0; c < n * m; ++c) {
        values(c) = sums(order[static_cast<std::size_t>(c)]);
        basis.col(c) = kron.col(order[static_cast<std::size_t>(c)]);
    }
    const Matrix lap = kronecker_sum(g.synthesize(g.eigenvalues()), f.synthesize(f.eigenvalues()));
    return TensorSpectrum{Spectrum(std::move(values), std::move(basis), detail::matrix_digest(lap)), std::move(order)};
}

}  // namespace gbf
