#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace gbf;
using gbf::testing::path_graph;
using gbf::testing::random_connected_graph;
using gbf::testing::random_signal;

TEST(Eigendecompose, PathStandard) {
    const auto s = eigendecompose(path_graph(3, LaplacianKind::Standard));
    EXPECT_NEAR(s.eigenvalue(0), 0.0, 1e-12);
    EXPECT_NEAR(s.eigenvalue(1), 1.0, 1e-12);
    EXPECT_NEAR(s.eigenvalue(2), 3.0, 1e-12);
}

TEST(Eigendecompose, ConstantVectorForConnectedStandard) {
    std::mt19937_64 rng(3);
    const auto g = random_connected_graph(rng, 11, LaplacianKind::Standard);
    const auto s = eigendecompose(g);
    EXPECT_NEAR(s.eigenvalue(0), 0.0, 1e-10);
    const double c = 1.0 / std::sqrt(11.0);
    // sign convention makes the constant vector positive
    for (Index i = 0; i < 11; ++i) EXPECT_NEAR(s.eigenvector(0)(i), c, 1e-10);
}

TEST(Eigendecompose, BinaryFeatureGraph) {
    Matrix l(2, 2);
    l << 1, -1, -1, 1;
    const auto s = eigendecompose(l);
    EXPECT_NEAR(s.eigenvalue(0), 0.0, 1e-14);
    EXPECT_NEAR(s.eigenvalue(1), 2.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(s.eigenvector(0)(0)), r, 1e-14);
    EXPECT_NEAR(s.eigenvector(0)(0), s.eigenvector(0)(1), 1e-14);
    EXPECT_NEAR(s.eigenvector(1)(0), -s.eigenvector(1)(1), 1e-14);
}

TEST(Eigendecompose, SignConventionLargestEntryPositiveFirstOnTies) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = eigendecompose(random_connected_graph(rng, 3 + trial % 9, gbf::testing::random_kind(rng)));
        for (Index k = 0; k < s.size(); ++k) {
            Index arg = 0;
            s.eigenvector(k).cwiseAbs().maxCoeff(&arg);
            EXPECT_GT(s.eigenvector(k)(arg), 0.0);
        }
    }
    // ties: (1/sqrt2)(1, -1) becomes (+, -) because index 0 comes first
    Matrix l(2, 2);
    l << 1, -1, -1, 1;
    EXPECT_GT(eigendecompose(l).eigenvector(1)(0), 0.0);
}

TEST(Eigendecompose, ResidualInvariantsAndAscendingOrder) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = random_connected_graph(rng, 2 + trial % 20, gbf::testing::random_kind(rng));
        const auto s = eigendecompose(g);
        const auto r = spectrum_residuals(g.laplacian(), s);
        EXPECT_LE(r.orthonormality, 1e-8);
        EXPECT_LE(r.eigen, 1e-8 * (1.0 + g.laplacian().cwiseAbs().maxCoeff()));
        for (Index k = 1; k < s.size(); ++k) EXPECT_LE(s.eigenvalue(k - 1), s.eigenvalue(k));
        EXPECT_LT((s.synthesize(s.eigenvalues()) - g.laplacian()).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Eigendecompose, BitIdenticalAndHashed) {
    std::mt19937_64 rng(6);
    const auto g = random_connected_graph(rng, 15, LaplacianKind::Normalized);
    const auto a = eigendecompose(g);
    const auto b = eigendecompose(g);
    EXPECT_TRUE((a.eigenvalues().array() == b.eigenvalues().array()).all());
    EXPECT_TRUE((a.basis().array() == b.basis().array()).all());
    EXPECT_EQ(a.source_hash(), b.source_hash());
    EXPECT_EQ(a.source_hash().size(), 16u);
    const auto other = eigendecompose(g.with_kind(LaplacianKind::Standard));
    EXPECT_NE(a.source_hash(), other.source_hash());
}

TEST(Eigendecompose, RejectsNonFinite) {
    Matrix l = Matrix::Zero(2, 2);
    l(0, 0) = std::numeric_limits<double>::quiet_NaN();
    try {
        eigendecompose(l);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

TEST(Gft, ExamplesAndParseval) {
    std::mt19937_64 rng(7);
    const auto g = random_connected_graph(rng, 10, LaplacianKind::Standard);
    const auto s = eigendecompose(g);
    const Vector u3 = s.eigenvector(2);
    const Vector hat = gft(s, u3);
    for (Index k = 0; k < 10; ++k) EXPECT_NEAR(hat(k), k == 2 ? 1.0 : 0.0, 1e-12);
    EXPECT_EQ(gft(s, Vector::Zero(10)).cwiseAbs().maxCoeff(), 0.0);
    const Vector chat = gft(s, Vector::Constant(10, 2.5));
    EXPECT_NEAR(chat(0), 2.5 * std::sqrt(10.0), 1e-10);
    EXPECT_LT(chat.tail(9).cwiseAbs().maxCoeff(), 1e-10);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector x = random_signal(rng, 10);
        EXPECT_NEAR(gft(s, x).norm(), x.norm(), 1e-10 * x.norm());
        EXPECT_LT((igft(s, gft(s, x)) - x).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Gft, DimensionMismatch) {
    const auto s = eigendecompose(path_graph(4, LaplacianKind::Standard));
    EXPECT_THROW(gft(s, Vector::Zero(3)), Error);
    EXPECT_THROW(igft(s, Vector::Zero(5)), Error);
    EXPECT_THROW(convolve(s, Vector::Zero(4), Vector::Zero(3)), Error);
}

TEST(Igft, DeltaAndUnity) {
    std::mt19937_64 rng(8);
    const auto s = eigendecompose(random_connected_graph(rng, 8, LaplacianKind::Normalized));
    EXPECT_LT((igft(s, delta(8, 4)) - s.eigenvector(4)).cwiseAbs().maxCoeff(), 0.0 + 1e-15);
    EXPECT_LT((igft(s, Vector::Ones(8)) - unity_element(s)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Convolve, UnityCommutativityDistributivity) {
    std::mt19937_64 rng(9);
    const auto s = eigendecompose(random_connected_graph(rng, 12, LaplacianKind::Adjacency));
    const Vector one = unity_element(s);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector x = random_signal(rng, 12), y = random_signal(rng, 12), z = random_signal(rng, 12);
        EXPECT_LT((convolve(s, x, one) - x).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((convolve(s, x, y) - convolve(s, y, x)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((convolve(s, x + y, z) - convolve(s, x, z) - convolve(s, y, z)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((convolve(s, convolve(s, x, y), z) - convolve(s, x, convolve(s, y, z))).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((convolve(s, 3.5 * x, y) - 3.5 * convolve(s, x, y)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((convolution_operator(s, x) * y - convolve(s, x, y)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(AlgebraNorm, Examples) {
    std::mt19937_64 rng(10);
    const auto s = eigendecompose(random_connected_graph(rng, 9, LaplacianKind::Standard));
    EXPECT_NEAR(algebra_norm(s, unity_element(s)), 1.0, 1e-12);
    EXPECT_EQ(algebra_norm(s, Vector::Zero(9)), 0.0);
    const Vector x = random_signal(rng, 9);
    const double norm = algebra_norm(s, x);
    double sup = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Vector y = random_signal(rng, 9);
        y.normalize();
        const double ratio = convolve(s, x, y).norm();
        EXPECT_LE(ratio, norm * (1.0 + 1e-12));
        sup = std::max(sup, ratio);
    }
    // the supremum is attained at the eigenvector of the largest |x^_k|
    Index arg = 0;
    gft(s, x).cwiseAbs().maxCoeff(&arg);
    EXPECT_NEAR(convolve(s, x, s.eigenvector(arg)).norm(), norm, 1e-12);
    EXPECT_LE(sup, norm * (1.0 + 1e-12));
}

TEST(Delta, RangeChecked) {
    EXPECT_EQ(delta(3, 1), Vector::Unit(3, 1));
    try {
        delta(3, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidCenter);
    }
}

TEST(TensorSpectrum, MatchesProductLaplacian) {
    std::mt19937_64 rng(11);
    const auto g = random_connected_graph(rng, 5, LaplacianKind::Standard);
    const auto f = random_connected_graph(rng, 4, LaplacianKind::Normalized);
    const auto ts = tensor_spectrum(eigendecompose(g), eigendecompose(f));
    const auto prod = cartesian_product(g, f);
    const auto direct = eigendecompose(prod.graph);
    EXPECT_LT((ts.spectrum.eigenvalues() - direct.eigenvalues()).cwiseAbs().maxCoeff(), 1e-8);
    const auto r = spectrum_residuals(prod.graph.laplacian(), ts.spectrum);
    EXPECT_LE(r.orthonormality, 1e-10);
    EXPECT_LE(r.eigen, 1e-10);
    // order[c] is the Kronecker index k * n' + k'
    const auto sg = eigendecompose(g);
    const auto sf = eigendecompose(f);
    for (Index c = 0; c < ts.spectrum.size(); ++c) {
        const Index idx = ts.order[static_cast<std::size_t>(c)];
        EXPECT_NEAR(ts.spectrum.eigenvalue(c), sg.eigenvalue(idx / 4) + sf.eigenvalue(idx % 4), 1e-14);
    }
}
