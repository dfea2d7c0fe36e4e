#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "data.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "rls.hpp"
#include "spectral.hpp"

namespace gbf {

namespace io {

using nlohmann::json;

/// {"n": n, "kind": ..., "edges": [[i, j, w], ...]} with 1-based vertices.
inline json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back({e.i + 1, e.j + 1, e.w});
    std::string kind(to_string(g.kind()));
    return {{"n", g.size()}, {"kind", kind}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
    try {
        const auto n = j.at("n").get<Index>();
        LaplacianKind kind = LaplacianKind::Standard;
        try {
            kind = parse_laplacian_kind(j.value("kind", std::string("standard")));
        } catch (const Error& e) {
            detail::fail(ErrorKind::ParseError, std::string("malformed graph file: ") + e.what());
        }
        detail::require(kind != LaplacianKind::Custom, ErrorKind::ParseError, "graph files cannot store custom Laplacians");
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            detail::require(e.is_array() && (e.size() == 2 || e.size() == 3), ErrorKind::ParseError,
                            "edges must be [i, j] or [i, j, w]");
            const double w = e.size() == 3 ? e[2].get<double>() : 1.0;
            edges.push_back({e[0].get<Index>() - 1, e[1].get<Index>() - 1, w});
        }
        return build_graph(n, std::move(edges), kind);
    } catch (const json::exception& e) {
        detail::fail(ErrorKind::ParseError, std::string("malformed graph file: ") + e.what());
    }
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorKind::IoError, "cannot open '" + path.string() + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::parse_error& e) {
        detail::fail(ErrorKind::ParseError, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    detail::require(out.good(), ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << text;
    detail::require(out.good(), ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

inline Graph read_graph(const std::filesystem::path& path) { return graph_from_json(read_json_file(path)); }

inline void write_graph(const std::filesystem::path& path, const Graph& g) { write_file(path, graph_to_json(g).dump(1) + "\n"); }

/// True when every eigenvalue lies in [0, 2] up to `tol`.
inline bool in_normalized_range(const Spectrum& s, double tol = 1e-10) {
    return s.size() == 0 || (s.eigenvalues().minCoeff() >= -tol && s.eigenvalues().maxCoeff() <= 2.0 + tol);
}

inline json spectrum_to_json(const Spectrum& s, LaplacianKind kind) {
    std::vector<double> values(s.eigenvalues().data(), s.eigenvalues().data() + s.size());
    json j{{"n", s.size()}, {"kind", std::string(to_string(kind))}, {"eigenvalues", values}, {"source_hash", s.source_hash()}};
    if (kind == LaplacianKind::Normalized) j["within_0_2"] = in_normalized_range(s);
    return j;
}

/// k,eigenvalue per line.
inline std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream os;
    os.precision(17);
    os << "k,eigenvalue\n";
    for (Index k = 0; k < s.size(); ++k) os << k << ',' << s.eigenvalue(k) << '\n';
    return os.str();
}

namespace detail {

template <class T>
void put_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    gbf::detail::require(in.gcount() == static_cast<std::streamsize>(sizeof(T)), ErrorKind::ParseError, "truncated basis file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace detail

/// 16-byte header ("GBFU", u32 n, 8 zero bytes), then U row-major as
/// little-endian doubles.
inline void write_basis(std::ostream& out, const Matrix& u) {
    gbf::detail::require(u.rows() == u.cols(), ErrorKind::DimensionMismatch, "basis must be square");
    out.write("GBFU", 4);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.rows()));
    detail::put_le<std::uint64_t>(out, 0);
    for (Index i = 0; i < u.rows(); ++i) {
        for (Index j = 0; j < u.cols(); ++j) detail::put_le<double>(out, u(i, j));
    }
}

inline Matrix read_basis(std::istream& in) {
    char magic[4] = {};
    in.read(magic, 4);
    gbf::detail::require(in.gcount() == 4 && std::memcmp(magic, "GBFU", 4) == 0, ErrorKind::ParseError, "not a GBFU basis file");
    const auto n = static_cast<Index>(detail::get_le<std::uint32_t>(in));
    (void)detail::get_le<std::uint64_t>(in);
    Matrix u(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) u(i, j) = detail::get_le<double>(in);
    }
    return u;
}

inline void write_basis(const std::filesystem::path& path, const Matrix& u) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    gbf::detail::require(out.good(), ErrorKind::IoError, "cannot write '" + path.string() + "'");
    write_basis(out, u);
}

inline Matrix read_basis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    gbf::detail::require(in.good(), ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return read_basis(in);
}

/// {centers, coefficients, gamma, kernel_spec}; centers are 0-based.
inline json model_to_json(const RlsModel& m) {
    std::vector<double> c(m.coefficients.data(), m.coefficients.data() + m.coefficients.size());
    return {{"centers", m.centers}, {"coefficients", c}, {"gamma", m.gamma}, {"kernel_spec", m.kernel_spec}};
}

inline RlsModel model_from_json(const json& j) {
    try {
        RlsModel m;
        m.centers = j.at("centers").get<std::vector<Index>>();
        const auto c = j.at("coefficients").get<std::vector<double>>();
        m.coefficients = Eigen::Map<const Vector>(c.data(), static_cast<Index>(c.size()));
        m.gamma = j.at("gamma").get<double>();
        m.kernel_spec = j.value("kernel_spec", std::string());
        return m;
    } catch (const json::exception& e) {
        gbf::detail::fail(ErrorKind::ParseError, std::string("malformed model: ") + e.what());
    }
}

inline json diagnostics_to_json(const DiagnosticsReport& d) {
    json nodes = json::array();
    for (Index v = 0; v < d.power.size(); ++v) nodes.push_back({{"vertex", v}, {"power", d.power(v)}, {"bound", d.bound(v)}});
    return {{"lambda_min_W", d.lambda_min_w},
            {"consistency", {{"single_label", d.single_label}, {"large_gamma", d.large_gamma}}},
            {"nodes", nodes}};
}

/// vertex,power,bound per line.
inline std::string diagnostics_csv(const DiagnosticsReport& d) {
    std::ostringstream os;
    os.precision(17);
    os << "vertex,power,bound\n";
    for (Index v = 0; v < d.power.size(); ++v) os << v << ',' << d.power(v) << ',' << d.bound(v) << '\n';
    return os.str();
}

/// x,y,...,label per row (coordinates as columns x0.. for d != 2).
inline std::string point_cloud_csv(const PointCloud& pc) {
    std::ostringstream os;
    os.precision(17);
    if (pc.dim() == 2) {
        os << "x,y";
    } else {
        for (Index j = 0; j < pc.dim(); ++j) os << (j ? "," : "") << 'x' << j;
    }
    if (pc.truth) os << ",label";
    os << '\n';
    for (Index i = 0; i < pc.size(); ++i) {
        for (Index j = 0; j < pc.dim(); ++j) os << (j ? "," : "") << pc.points(i, j);
        if (pc.truth) os << ',' << (*pc.truth)[static_cast<std::size_t>(i)];
        os << '\n';
    }
    return os.str();
}

}  // namespace io
}  // namespace gbf
