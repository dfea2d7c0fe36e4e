#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "graph.hpp"

namespace gbf {

/// Points as rows of an n x d matrix, optional +-1 ground truth.
struct PointCloud {
    Matrix points;
    std::optional<std::vector<int>> truth;
    std::vector<std::string> names;

    [[nodiscard]] Index size() const noexcept { return points.rows(); }
    [[nodiscard]] Index dim() const noexcept { return points.cols(); }
};

struct Circle {
    Eigen::Vector2d center{0.0, 0.0};
    double radius = 1.0;
};

/// Segment from a to b; distances are taken to the infinite line through it.
struct Segment {
    Eigen::Vector2d a{-1.3, -1.3};
    Eigen::Vector2d b{1.3, 1.3};
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, Index count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    return out;
}

inline void jitter(Matrix& pts, std::uint64_t seed, double noise) {
    if (noise <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise);
    for (Index i = 0; i < pts.rows(); ++i) {
        for (Index j = 0; j < pts.cols(); ++j) pts(i, j) += gauss(rng);
    }
}

inline void check_generator_args(Index count, double noise) {
    require(count >= 1, ErrorKind::InvalidParameter, "point count must be >= 1");
    require(noise >= 0.0 && std::isfinite(noise), ErrorKind::InvalidParameter, "noise must be >= 0");
}

}  // namespace detail

/// Two interleaved half circles: A = (cos t, sin t), B = (1 - cos t, 0.5 - sin t),
/// t evenly spaced on [0, pi].  Truth +1 on A, -1 on B.
inline PointCloud gen_two_moon(std::uint64_t seed, Index n_per_moon = 300, double noise = 0.0) {
    detail::check_generator_args(n_per_moon, noise);
    const auto theta = detail::linspace(0.0, std::numbers::pi, n_per_moon);
    PointCloud pc;
    pc.points.resize(2 * n_per_moon, 2);
    std::vector<int> truth(static_cast<std::size_t>(2 * n_per_moon));
    for (Index k = 0; k < n_per_moon; ++k) {
        const double t = theta[static_cast<std::size_t>(k)];
        pc.points.row(k) << std::cos(t), std::sin(t);
        pc.points.row(n_per_moon + k) << 1.0 - std::cos(t), 0.5 - std::sin(t);
        truth[static_cast<std::size_t>(k)] = 1;
        truth[static_cast<std::size_t>(n_per_moon + k)] = -1;
    }
    detail::jitter(pc.points, seed, noise);
    pc.truth = std::move(truth);
    return pc;
}

struct SlashedO {
    PointCloud cloud;
    Circle circle;
    Segment line;
};

/// Unit circle (angles 2 pi k / n) slashed by the segment (-1.3,-1.3)-(1.3,1.3).
/// Truth +1 on the circle, -1 on the line.
inline SlashedO gen_slashed_o(std::uint64_t seed, Index n_per_part, double noise) {
    detail::check_generator_args(n_per_part, noise);
    SlashedO out;
    auto& pc = out.cloud;
    pc.points.resize(2 * n_per_part, 2);
    std::vector<int> truth(static_cast<std::size_t>(2 * n_per_part));
    const auto s = detail::linspace(0.0, 1.0, n_per_part);
    for (Index k = 0; k < n_per_part; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_per_part);
        pc.points.row(k) = out.circle.center.transpose() + out.circle.radius * Eigen::RowVector2d(std::cos(a), std::sin(a));
        pc.points.row(n_per_part + k) =
            (out.line.a + s[static_cast<std::size_t>(k)] * (out.line.b - out.line.a)).transpose();
        truth[static_cast<std::size_t>(k)] = 1;
        truth[static_cast<std::size_t>(n_per_part + k)] = -1;
    }
    detail::jitter(pc.points, seed, noise);
    pc.truth = std::move(truth);
    return out;
}

/// | |p - c| - r | per point.
inline Vector geometric_prior(const PointCloud& pc, const Circle& c) {
    detail::require(pc.dim() == 2, ErrorKind::DimensionMismatch, "geometric priors need planar points");
    Vector r(pc.size());
    for (Index i = 0; i < pc.size(); ++i) r(i) = std::abs((pc.points.row(i).transpose() - c.center).norm() - c.radius);
    return r;
}

/// Perpendicular distance to the line through the segment.
inline Vector geometric_prior(const PointCloud& pc, const Segment& l) {
    detail::require(pc.dim() == 2, ErrorKind::DimensionMismatch, "geometric priors need planar points");
    const Eigen::Vector2d d = l.b - l.a;
    const double len = d.norm();
    detail::require(len > 0.0, ErrorKind::InvalidParameter, "degenerate reference segment");
    Vector r(pc.size());
    for (Index i = 0; i < pc.size(); ++i) {
        const Eigen::Vector2d q = pc.points.row(i).transpose() - l.a;
        r(i) = std::abs(d.x() * q.y() - d.y() * q.x()) / len;
    }
    return r;
}

struct EpsilonGraph {
    Graph graph;
    bool connected = false;
};

/// Unweighted edge (i, j) iff |p_i - p_j| < radius.
inline EpsilonGraph epsilon_graph(const PointCloud& pc, double radius, LaplacianKind kind) {
    detail::require(radius > 0.0 && std::isfinite(radius), ErrorKind::InvalidParameter, "radius must be > 0");
    detail::require(pc.size() > 0, ErrorKind::EmptyPointCloud, "empty point cloud");
    std::vector<Edge> edges;
    for (Index i = 0; i < pc.size(); ++i) {
        for (Index j = i + 1; j < pc.size(); ++j) {
            if ((pc.points.row(i) - pc.points.row(j)).norm() < radius) edges.push_back({i, j, 1.0});
        }
    }
    Graph g = build_graph(pc.size(), std::move(edges), kind);
    const bool conn = is_connected(g);
    return EpsilonGraph{std::move(g), conn};
}

/// Complete graph with weights exp(-alpha |r_i - r_j|^2).  Weights that
/// underflow are raised to the smallest normal double, so every pair stays
/// an edge.
inline Graph complete_similarity_graph(const PointCloud& pc, double alpha, LaplacianKind kind) {
    detail::require(pc.size() > 0, ErrorKind::EmptyPointCloud, "empty point cloud");
    detail::require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidParameter, "alpha must be > 0");
    const Index n = pc.size();
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double d2 = (pc.points.row(i) - pc.points.row(j)).squaredNorm();
            edges.push_back({i, j, std::max(std::exp(-alpha * d2), std::numeric_limits<double>::min())});
        }
    }
    return build_graph(n, std::move(edges), kind);
}

/// scale * ln 2 / median of the pairwise squared distances.
inline double median_alpha(const PointCloud& pc, double scale = 1.0) {
    detail::require(pc.size() >= 2, ErrorKind::EmptyPointCloud, "need at least two points");
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(pc.size() * (pc.size() - 1) / 2));
    for (Index i = 0; i < pc.size(); ++i) {
        for (Index j = i + 1; j < pc.size(); ++j) d2.push_back((pc.points.row(i) - pc.points.row(j)).squaredNorm());
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    double med = d2[mid];
    if (d2.size() % 2 == 0) {
        med = 0.5 * (med + *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    detail::require(med > 0.0, ErrorKind::InvalidParameter, "median squared distance is zero");
    return scale * std::numbers::ln2 / med;
}

/// Scales each column to [0, 1]; constant columns become 0.
inline void min_max_scale(PointCloud& pc) {
    for (Index j = 0; j < pc.dim(); ++j) {
        const double lo = pc.points.col(j).minCoeff();
        const double hi = pc.points.col(j).maxCoeff();
        if (hi > lo) {
            pc.points.col(j) = (pc.points.col(j).array() - lo) / (hi - lo);
        } else {
            pc.points.col(j).setZero();
        }
    }
}

/// Column layout of a labeled CSV file (0-based columns).
struct DatasetSchema {
    Index label_column = 0;
    std::string positive_label;
    std::string negative_label;
    std::string missing_marker = "?";
    bool drop_missing = true;
    std::vector<Index> feature_columns;
    std::optional<Index> name_column;
};

/// id, 9 attributes, class 2 (benign, +1) / 4 (malignant, -1).
inline DatasetSchema wbc_schema() {
    DatasetSchema s;
    s.label_column = 10;
    s.positive_label = "2";
    s.negative_label = "4";
    for (Index c = 1; c <= 9; ++c) s.feature_columns.push_back(c);
    s.name_column = 0;
    return s;
}

/// 34 attributes, class g (+1) / b (-1).
inline DatasetSchema ionosphere_schema() {
    DatasetSchema s;
    s.label_column = 34;
    s.positive_label = "g";
    s.negative_label = "b";
    for (Index c = 0; c < 34; ++c) s.feature_columns.push_back(c);
    return s;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses CSV text (no header) according to the schema.
inline PointCloud parse_csv(std::istream& in, const DatasetSchema& schema) {
    detail::require(!schema.feature_columns.empty(), ErrorKind::InvalidParameter, "schema has no feature columns");
    Index needed = schema.label_column;
    for (Index c : schema.feature_columns) needed = std::max(needed, c);
    if (schema.name_column) needed = std::max(needed, *schema.name_column);

    std::vector<std::vector<double>> rows;
    std::vector<int> truth;
    std::vector<std::string> names;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (static_cast<Index>(fields.size()) <= needed) {
            detail::fail(ErrorKind::ParseError, "row " + std::to_string(lineno) + ": expected at least " +
                                                    std::to_string(needed + 1) + " columns, found " +
                                                    std::to_string(fields.size()));
        }
        bool missing = false;
        std::vector<double> row;
        row.reserve(schema.feature_columns.size());
        for (Index c : schema.feature_columns) {
            const auto& f = fields[static_cast<std::size_t>(c)];
            if (f == schema.missing_marker) {
                missing = true;
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0.0;
            if (!detail::parse_double(f, v)) {
                detail::fail(ErrorKind::ParseError, "row " + std::to_string(lineno) + ", column " + std::to_string(c + 1) +
                                                        ": cannot parse '" + f + "' as a number");
            }
            row.push_back(v);
        }
        if (missing) {
            if (schema.drop_missing) continue;
            detail::fail(ErrorKind::ParseError, "row " + std::to_string(lineno) + " has missing values");
        }
        const auto& label = fields[static_cast<std::size_t>(schema.label_column)];
        if (label == schema.positive_label) {
            truth.push_back(1);
        } else if (label == schema.negative_label) {
            truth.push_back(-1);
        } else {
            detail::fail(ErrorKind::UnknownLabel, "row " + std::to_string(lineno) + ": unknown label '" + label + "'");
        }
        if (schema.name_column) names.push_back(fields[static_cast<std::size_t>(*schema.name_column)]);
        rows.push_back(std::move(row));
    }
    detail::require(!rows.empty(), ErrorKind::EmptyPointCloud, "no usable rows");

    PointCloud pc;
    pc.points.resize(static_cast<Index>(rows.size()), static_cast<Index>(schema.feature_columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) pc.points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    pc.truth = std::move(truth);
    pc.names = std::move(names);
    return pc;
}

inline PointCloud load_csv(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorKind::IoError, "cannot open '" + path + "'");
    return parse_csv(in, schema);
}

}  // namespace gbf
