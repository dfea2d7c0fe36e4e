#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace gbf;
using gbf::testing::random_binary;
using gbf::testing::random_connected_graph;
using gbf::testing::random_signal;
using gbf::testing::random_subset;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::ConfigError;
}

/// P(v) straight from the definition: the native norm of K(., v) minus its
/// best approximation from the columns at W, with explicit inverses.
double power_oracle(const Spectrum& s, const Gbf& f, const Matrix& k, const std::vector<Index>& w, Index v) {
    const auto big_n = static_cast<Index>(w.size());
    Matrix kw(big_n, big_n);
    Vector kv(big_n);
    for (Index a = 0; a < big_n; ++a) {
        kv(a) = k(w[a], v);
        for (Index b = 0; b < big_n; ++b) kw(a, b) = k(w[a], w[b]);
    }
    const Vector ell = kw.inverse() * kv;
    Vector resid = k.col(v);
    for (Index a = 0; a < big_n; ++a) resid -= ell(a) * k.col(w[a]);
    return native_norm(s, f, resid);
}

FeatureSpec random_psi(std::mt19937_64& rng, Index n) { return FeatureSpec::binary(random_binary(rng, n), -1.0); }

struct TwoMoon {
    Graph graph;
    Spectrum s;
    Gbf f;
    KernelMatrix k;
    FeatureSpec psi;
};

const TwoMoon& two_moon() {
    static const TwoMoon tm = [] {
        const auto pc = gen_two_moon(0, 300, 0.01);
        auto g = epsilon_graph(pc, 0.5, LaplacianKind::Normalized).graph;
        auto s = eigendecompose(g);
        auto f = diffusion_gbf(s, 50.0);
        auto k = kernel_matrix(s, f);
        auto psi = spectral_bipartition(g, s, -1.0);
        return TwoMoon{std::move(g), std::move(s), std::move(f), std::move(k), std::move(psi)};
    }();
    return tm;
}

}  // namespace

TEST(PowerFunction, ZeroAtCentersAndForFullSet) {
    std::mt19937_64 rng(1);
    const auto s = eigendecompose(random_connected_graph(rng, 12, LaplacianKind::Standard));
    const auto k = kernel_matrix(s, diffusion_gbf(s, 0.5));
    const auto w = random_subset(rng, 12, 4);
    const Signal p = power_function(k, w);
    for (Index v : w) EXPECT_LE(std::abs(p(v)), 1e-7);
    EXPECT_TRUE((p.array() >= 0.0).all());
    std::vector<Index> all(12);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_LE(power_function(k, all).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(PowerFunction, MatchesDefinitionViaNativeNorm) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = eigendecompose(random_connected_graph(rng, 8, trial % 2 ? LaplacianKind::Standard : LaplacianKind::Normalized));
        const auto f = spline_gbf(s, 0.5, 1.0 + trial % 3);
        const auto k = kernel_matrix(s, f);
        const auto w = random_subset(rng, 8, 3);
        const Signal p = power_function(k, w);
        for (Index v = 0; v < 8; ++v) {
            const bool center = std::find(w.begin(), w.end(), v) != w.end();
            if (center) continue;
            EXPECT_NEAR(p(v), power_oracle(s, f, k.values, w, v), 1e-8 * (1.0 + p(v)));
        }
    }
}

TEST(PowerFunction, LagrangeCoefficientsAreTheBestApproximation) {
    std::mt19937_64 rng(3);
    const auto s = eigendecompose(random_connected_graph(rng, 9, LaplacianKind::Normalized));
    const auto f = diffusion_gbf(s, 0.3);
    const auto k = kernel_matrix(s, f);
    const std::vector<Index> w{1, 4, 6};
    const Signal p = power_function(k, w);
    for (int trial = 0; trial < 50; ++trial) {
        const Index v = trial % 9;
        const Vector coeffs = random_signal(rng, 3);
        Vector resid = k.values.col(v);
        for (Index a = 0; a < 3; ++a) resid -= coeffs(a) * k.values.col(w[static_cast<std::size_t>(a)]);
        EXPECT_LE(p(v), native_norm(s, f, resid) + 1e-10);
    }
}

TEST(PowerFunction, BoundedByDiagonalAndMonotoneInW) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 10 + trial;
        const auto s = eigendecompose(random_connected_graph(rng, n, gbf::testing::random_kind(rng)));
        const auto k = kernel_matrix(s, diffusion_gbf(s, 0.2 + 0.1 * trial));
        auto chain = random_subset(rng, n, n / 2 + 1);
        Signal prev = k.values.diagonal().cwiseSqrt();
        for (std::size_t size = 1; size <= chain.size(); ++size) {
            const std::vector<Index> w(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(size));
            const Signal p = power_function(k, w);
            EXPECT_TRUE((p.array() <= k.values.diagonal().cwiseSqrt().array() + 1e-12).all());
            EXPECT_TRUE((p.array() <= prev.array() + 1e-9).all()) << "W of size " << size;
            prev = p;
        }
    }
}

TEST(PowerFunction, Errors) {
    std::mt19937_64 rng(5);
    const auto s = eigendecompose(random_connected_graph(rng, 6, LaplacianKind::Standard));
    const auto k = kernel_matrix(s, diffusion_gbf(s, 1.0));
    EXPECT_EQ(kind_of([&] { power_function(k, {}); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([&] { power_function(k, {1, 1}); }), ErrorKind::InvalidCenter);
    Vector fhat = Vector::Zero(6);
    fhat(0) = 1.0;
    const auto rank_one = kernel_matrix(s, Gbf{fhat, provenance::Explicit{}});
    EXPECT_EQ(kind_of([&] { power_function(rank_one, {0, 3}); }), ErrorKind::SingularSubkernel);
}

TEST(PowerInvariance, TwoMoonRandomFeature) {
    // t = 50 leaves K_W numerically singular for most center sets; t = 5 keeps it well posed
    const auto& tm = two_moon();
    const auto k = kernel_matrix(tm.s, diffusion_gbf(tm.s, 5.0));
    std::mt19937_64 rng(6);
    const auto w = random_subset(rng, 600, 8);
    const auto r = power_invariance_check(k, random_psi(rng, 600), w);
    EXPECT_TRUE(r.invariant) << r.max_deviation;
}

TEST(PowerInvariance, ConstantFeatureIsTrivial) {
    std::mt19937_64 rng(7);
    const auto s = eigendecompose(random_connected_graph(rng, 10, LaplacianKind::Standard));
    const auto k = kernel_matrix(s, diffusion_gbf(s, 1.0));
    const auto r = power_invariance_check(k, FeatureSpec::binary(std::vector<int>(10, 1), -1.0), {2, 5});
    EXPECT_TRUE(r.invariant);
    EXPECT_EQ(r.max_deviation, 0.0);
}

TEST(PowerInvariance, RandomFeaturesAgainstTwoSidedOracle) {
    std::mt19937_64 rng(8);
    const auto s = eigendecompose(random_connected_graph(rng, 8, LaplacianKind::Normalized));
    const auto f = diffusion_gbf(s, 0.7);
    const auto kf = kernel_matrix(s, f);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = random_psi(rng, 8);
        const auto w = random_subset(rng, 8, 3);
        EXPECT_TRUE(power_invariance_check(kf, psi, w).invariant);
        // independent evaluation: K_psi has eigenvectors psi . u_k, so its native
        // norm is taken in the conjugated basis
        const Matrix kpsi = augment_kernel(kf, {psi}).values.values;
        for (Index v = 0; v < 8; ++v) {
            if (std::find(w.begin(), w.end(), v) != w.end()) continue;
            const double pf = power_oracle(s, f, kf.values, w, v);
            const Index big_n = 3;
            Matrix kw(big_n, big_n);
            Vector kv(big_n);
            for (Index a = 0; a < big_n; ++a) {
                kv(a) = kpsi(w[a], v);
                for (Index b = 0; b < big_n; ++b) kw(a, b) = kpsi(w[a], w[b]);
            }
            const Vector ell = kw.inverse() * kv;
            Vector resid = kpsi.col(v);
            for (Index a = 0; a < big_n; ++a) resid -= ell(a) * kpsi.col(w[a]);
            EXPECT_NEAR(augmented_native_norm(s, f, psi, resid), pf, 1e-8);
        }
    }
}

TEST(PowerInvariance, RequiresBinaryMinusOne) {
    std::mt19937_64 rng(9);
    const auto s = eigendecompose(random_connected_graph(rng, 5, LaplacianKind::Standard));
    const auto k = kernel_matrix(s, diffusion_gbf(s, 1.0));
    EXPECT_THROW(power_invariance_check(k, FeatureSpec::binary(random_binary(rng, 5), -0.5), {0}), Error);
}

TEST(AugmentedNativeNorm, MatchesExplicitInverse) {
    std::mt19937_64 rng(10);
    const auto s = eigendecompose(random_connected_graph(rng, 9, LaplacianKind::Standard));
    const auto f = spline_gbf(s, 1.0, 1.0);
    const auto psi = random_psi(rng, 9);
    const Matrix kpsi = augment_kernel(kernel_matrix(s, f), {psi}).values.values;
    for (int trial = 0; trial < 10; ++trial) {
        const Vector y = random_signal(rng, 9);
        const double direct = std::sqrt(y.dot(kpsi.inverse() * y));
        EXPECT_NEAR(augmented_native_norm(s, f, psi, y), direct, 1e-10 * direct);
    }
}

TEST(ErrorBound, InterpolationOfSpanHasZeroError) {
    std::mt19937_64 rng(11);
    const auto s = eigendecompose(random_connected_graph(rng, 10, LaplacianKind::Normalized));
    const auto f = diffusion_gbf(s, 0.5);
    const auto psi = random_psi(rng, 10);
    const Matrix kpsi = augment_kernel(kernel_matrix(s, f), {psi}).values.values;
    const std::vector<Index> w{0, 3, 7};
    Vector y = Vector::Zero(10);
    const Vector c = random_signal(rng, 3);
    for (Index a = 0; a < 3; ++a) y += c(a) * kpsi.col(w[static_cast<std::size_t>(a)]);
    const auto r = error_bound(s, f, psi, w, 0.0, y);
    EXPECT_LE((r.prediction - y).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(r.holds);
    EXPECT_TRUE(r.regularization_holds);
}

TEST(ErrorBound, RandomSignalAgainstDirectSolve) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = eigendecompose(random_connected_graph(rng, 10, gbf::testing::random_kind(rng)));
        const auto f = diffusion_gbf(s, 0.3 + 0.05 * trial);
        const auto psi = random_psi(rng, 10);
        const auto w = random_subset(rng, 10, 2 + trial % 5);
        const Vector y = random_signal(rng, 10);
        const double gamma = 0.01;
        const auto r = error_bound(s, f, psi, w, gamma, y);
        EXPECT_TRUE(r.holds) << "trial " << trial << " worst vertex " << r.worst_vertex;
        EXPECT_TRUE(r.regularization_holds) << "trial " << trial;

        // oracle: explicit inverse for the RLS solution and the right-hand side
        const Matrix kf = kernel_matrix(s, f).values;
        const Matrix kpsi = augment_kernel(kernel_matrix(s, f), {psi}).values.values;
        const auto big_n = static_cast<Index>(w.size());
        Matrix a(big_n, big_n), kwf(big_n, big_n);
        Vector yw(big_n);
        for (Index i = 0; i < big_n; ++i) {
            yw(i) = y(w[i]);
            for (Index j = 0; j < big_n; ++j) {
                a(i, j) = kpsi(w[i], w[j]);
                kwf(i, j) = kf(w[i], w[j]);
            }
        }
        Matrix reg = a;
        reg.diagonal().array() += gamma * big_n;
        const Vector c = reg.inverse() * yw;
        Vector ystar = Vector::Zero(10);
        for (Index i = 0; i < big_n; ++i) ystar += c(i) * kpsi.col(w[i]);
        EXPECT_LT((ystar - r.prediction).cwiseAbs().maxCoeff(), 1e-9);

        const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(kwf).eigenvalues()(0);
        EXPECT_NEAR(r.lambda_min, lmin, 1e-12);
        const double norm = std::sqrt(y.dot(kpsi.inverse() * y));
        EXPECT_NEAR(r.native_norm, norm, 1e-8 * norm);
        for (Index v = 0; v < 10; ++v) {
            const double rhs = (power_oracle(s, f, kf, w, v) + gamma * big_n * std::sqrt(kf(v, v)) / (lmin + gamma * big_n)) * norm;
            EXPECT_LE(std::abs(y(v) - ystar(v)), rhs * (1.0 + 1e-6) + 1e-12);
        }
    }
}

TEST(ErrorBound, RegularizationComponentAlone) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = eigendecompose(random_connected_graph(rng, 12, LaplacianKind::Standard));
        const auto f = spline_gbf(s, 0.5, 2.0);
        const auto psi = random_psi(rng, 12);
        const auto w = random_subset(rng, 12, 5);
        const Vector y = random_signal(rng, 12);
        for (double gamma : {1e-3, 0.1, 1.0}) {
            const auto r = error_bound(s, f, psi, w, gamma, y);
            ASSERT_TRUE(r.interpolant.has_value());
            const Vector gap = (*r.interpolant - r.prediction).cwiseAbs();
            EXPECT_TRUE((gap.array() <= r.regularization.array() * (1.0 + 1e-6) + 1e-12).all());
            EXPECT_TRUE(r.regularization_holds);
        }
    }
}

TEST(Consistency, SingleLabelOnTwoMoon) {
    const auto& tm = two_moon();
    ASSERT_GT(tm.k.values.minCoeff(), 0.0);
    for (Index w : {0, 123, 450}) {
        Vector prior(600);
        for (Index v = 0; v < 600; ++v) prior(v) = tm.psi.labels()[static_cast<std::size_t>(v)];
        const auto r = consistency_check(tm.k, tm.psi, labeled_from({w}, prior), 1e-4);
        EXPECT_TRUE(r.labels_consistent);
        EXPECT_TRUE(r.applicable);
        EXPECT_TRUE(r.consistent) << r.reason;
    }
}

TEST(Consistency, ManyLabelsWithLargeGamma) {
    const auto& tm = two_moon();
    std::mt19937_64 rng(14);
    Vector prior(600);
    for (Index v = 0; v < 600; ++v) prior(v) = tm.psi.labels()[static_cast<std::size_t>(v)];
    const double gamma = 2.5 * tm.k.values.diagonal().maxCoeff();
    const auto r = consistency_check(tm.k, tm.psi, labeled_from(random_subset(rng, 600, 16), prior), gamma);
    EXPECT_TRUE(r.applicable);
    EXPECT_TRUE(r.consistent) << r.reason;
    EXPECT_DOUBLE_EQ(r.gamma_threshold, 2.0 * tm.k.values.diagonal().maxCoeff());
}

TEST(Consistency, ContradictingLabelIsReported) {
    std::mt19937_64 rng(15);
    const auto s = eigendecompose(random_connected_graph(rng, 8, LaplacianKind::Standard));
    const auto k = kernel_matrix(s, diffusion_gbf(s, 1.0));
    std::vector<int> labels(8, 1);
    labels[5] = -1;
    const auto psi = FeatureSpec::binary(labels, -1.0);
    LabeledSet d{{0, 5}, Vector(2)};
    d.values << 1.0, 1.0;
    const auto r = consistency_check(k, psi, d, 10.0);
    EXPECT_FALSE(r.labels_consistent);
    EXPECT_FALSE(r.consistent);
    ASSERT_TRUE(r.counterexample.has_value());
    EXPECT_EQ(*r.counterexample, 5);
}

TEST(Consistency, NonPositiveKernelRejected) {
    const auto s = eigendecompose(gbf::testing::path_graph(4, LaplacianKind::Standard));
    const auto k = kernel_matrix(s, Gbf{Vector::Ones(4), provenance::Explicit{}});  // identity
    const auto psi = FeatureSpec::binary({1, 1, -1, -1}, -1.0);
    EXPECT_EQ(kind_of([&] { consistency_check(k, psi, LabeledSet{{0}, Vector::Ones(1)}, 1.0); }),
              ErrorKind::KernelNotPositive);
}

TEST(Diagnose, ScenarioFlagsAndBound) {
    std::mt19937_64 rng(16);
    const auto s = eigendecompose(random_connected_graph(rng, 10, LaplacianKind::Normalized));
    const auto k = kernel_matrix(s, diffusion_gbf(s, 1.0));
    const auto one = diagnose(k, {3}, 1e-3);
    EXPECT_TRUE(one.single_label);
    EXPECT_FALSE(one.large_gamma);
    EXPECT_NEAR(one.lambda_min_w, k.values(3, 3), 1e-14);
    const double big = 3.0 * k.values.diagonal().maxCoeff();
    const auto many = diagnose(k, {1, 4, 8}, big);
    EXPECT_FALSE(many.single_label);
    EXPECT_TRUE(many.large_gamma);
    for (Index v = 0; v < 10; ++v) {
        const double reg = big * 3.0 * std::sqrt(k.values(v, v)) / (many.lambda_min_w + big * 3.0);
        EXPECT_NEAR(many.bound(v), many.power(v) + reg, 1e-14);
    }
}

TEST(SubkernelSpectra, SmallestEigenvalueUnchangedBySignConjugation) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = eigendecompose(random_connected_graph(rng, 11, gbf::testing::random_kind(rng)));
        const auto kf = kernel_matrix(s, diffusion_gbf(s, 0.6));
        const auto kpsi = augment_kernel(kf, {random_psi(rng, 11)}).values;
        const auto w = random_subset(rng, 11, 4);
        EXPECT_NEAR(min_eigenvalue(principal_submatrix(kf.values, w, w)), min_eigenvalue(principal_submatrix(kpsi.values, w, w)),
                    1e-12);
    }
}
