#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "data.hpp"
#include "error.hpp"
#include "experiment_schema.hpp"
#include "features.hpp"
#include "graph.hpp"
#include "kernels.hpp"
#include "rls.hpp"
#include "schema.hpp"
#include "spectral.hpp"

namespace gbf {

using nlohmann::json;

enum class Sampling { Stratified, Uniform };

struct DatasetConfig {
    std::string generator;  ///< "two-moon", "slashed-o" or "csv"
    Index n_per_class = 300;
    double noise = 0.0;
    std::filesystem::path csv;
    DatasetSchema schema;
    bool minmax = true;
};

struct GraphConfig {
    std::string type;  ///< "epsilon" or "complete-similarity"
    double radius = 0.0;
    std::optional<double> alpha;  ///< empty means the median rule
    double alpha_scale = 1.0;
    LaplacianKind kind = LaplacianKind::Normalized;
};

struct GbfConfig {
    std::string type;  ///< "diffusion", "spline" or "poly"
    double t = 0.0;
    double eps = 0.0;
    double s = 1.0;
    std::vector<double> coeffs;
};

struct FeatureConfig {
    FeatureKind kind = FeatureKind::Binary;
    double alpha = 0.0;
    std::string source;
};

struct FeatureSet {
    std::string name;
    std::vector<std::size_t> features;
};

struct OutputConfig {
    std::optional<std::filesystem::path> table, trials, predictions, diagnostics;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DatasetConfig dataset;
    GraphConfig graph;
    GbfConfig gbf;
    std::vector<FeatureConfig> features;
    std::vector<FeatureSet> feature_sets;
    double gamma = 0.0;
    bool interpolate = false;
    std::vector<Index> label_counts;
    std::vector<Index> labeled_nodes;
    Index trials = 100;
    std::uint64_t seed = 0;
    Sampling sampling = Sampling::Stratified;
    OutputConfig output;
};

namespace detail {

inline std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline DatasetSchema parse_schema(const json& j) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "wbc") return wbc_schema();
        if (name == "ionosphere") return ionosphere_schema();
        fail(ErrorKind::ConfigError, "unknown dataset schema '" + name + "'");
    }
    DatasetSchema s;
    s.label_column = j.at("label_column").get<Index>();
    s.positive_label = j.at("positive_label").get<std::string>();
    s.negative_label = j.at("negative_label").get<std::string>();
    s.missing_marker = j.value("missing_marker", std::string("?"));
    s.drop_missing = j.value("drop_missing", true);
    s.feature_columns = j.at("feature_columns").get<std::vector<Index>>();
    if (j.contains("name_column")) s.name_column = j["name_column"].get<Index>();
    return s;
}

}  // namespace detail

/// Validates `j` against the published schema and converts it.  Relative
/// paths resolve against `base_dir`; referenced input files must exist.
inline ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = ".") {
    static const SchemaValidator validator(json::parse(kExperimentSchema));
    const auto errs = validator.validate(j);
    if (!errs.empty()) {
        std::string msg = "config does not match the schema:";
        for (const auto& e : errs) msg += "\n  " + e;
        detail::fail(ErrorKind::ConfigError, msg);
    }

    ExperimentConfig c;
    c.name = j.value("name", std::string("experiment"));

    const auto& d = j["dataset"];
    if (d.contains("generator")) {
        c.dataset.generator = d["generator"].get<std::string>();
        c.dataset.n_per_class = d.value("n_per_class", Index{300});
        c.dataset.noise = d.value("noise", 0.0);
    } else {
        c.dataset.generator = "csv";
        c.dataset.csv = detail::resolve_path(base_dir, d["csv"].get<std::string>());
        c.dataset.schema = detail::parse_schema(d["schema"]);
        c.dataset.minmax = d.value("scale", std::string("minmax")) == "minmax";
        detail::require(std::filesystem::exists(c.dataset.csv), ErrorKind::ConfigError,
                        "dataset file '" + c.dataset.csv.string() + "' does not exist");
    }

    const auto& g = j["graph"];
    c.graph.type = g["type"].get<std::string>();
    c.graph.kind = parse_laplacian_kind(g.value("kind", std::string("normalized")));
    if (c.graph.type == "epsilon") {
        c.graph.radius = g["radius"].get<double>();
    } else {
        if (g.contains("alpha") && g["alpha"].is_number()) c.graph.alpha = g["alpha"].get<double>();
        c.graph.alpha_scale = g.value("alpha_scale", 1.0);
    }

    const auto& f = j["gbf"];
    c.gbf.type = f["type"].get<std::string>();
    if (c.gbf.type == "diffusion") c.gbf.t = f["t"].get<double>();
    if (c.gbf.type == "spline") {
        c.gbf.eps = f["eps"].get<double>();
        c.gbf.s = f["s"].get<double>();
    }
    if (c.gbf.type == "poly") c.gbf.coeffs = f["coeffs"].get<std::vector<double>>();

    for (const auto& fj : j.value("features", json::array())) {
        FeatureConfig fc;
        fc.kind = fj["kind"] == "binary" ? FeatureKind::Binary : FeatureKind::Similarity;
        fc.alpha = fj["alpha"].get<double>();
        fc.source = fj["source"].get<std::string>();
        if (fc.kind == FeatureKind::Binary && fc.source != "spectral") {
            detail::require(fc.source.rfind("file:", 0) == 0, ErrorKind::ConfigError,
                            "binary feature source must be 'spectral' or 'file:<path>'");
            const auto p = detail::resolve_path(base_dir, fc.source.substr(5));
            detail::require(std::filesystem::exists(p), ErrorKind::ConfigError, "feature file '" + p.string() + "' does not exist");
            fc.source = "file:" + p.string();
        }
        if ((fc.source == "circle-distance" || fc.source == "line-distance") && c.dataset.generator != "slashed-o") {
            detail::fail(ErrorKind::ConfigError, "feature source '" + fc.source + "' needs the slashed-o generator");
        }
        c.features.push_back(std::move(fc));
    }
    if (j.contains("feature_sets")) {
        for (const auto& s : j["feature_sets"]) {
            FeatureSet fs{s["name"].get<std::string>(), s["features"].get<std::vector<std::size_t>>()};
            for (auto idx : fs.features) {
                detail::require(idx < c.features.size(), ErrorKind::ConfigError,
                                "feature set '" + fs.name + "' refers to feature " + std::to_string(idx));
            }
            c.feature_sets.push_back(std::move(fs));
        }
    } else if (!c.features.empty()) {
        FeatureSet all{"psi-GBF-RLS", {}};
        for (std::size_t i = 0; i < c.features.size(); ++i) all.features.push_back(i);
        c.feature_sets.push_back(std::move(all));
    }

    c.gamma = j["gamma"].get<double>();
    c.interpolate = j.value("interpolate", false);
    detail::require(c.gamma > 0.0 || c.interpolate, ErrorKind::ConfigError, "gamma = 0 requires \"interpolate\": true");
    c.label_counts = j["label_counts"].get<std::vector<Index>>();
    if (j.contains("labeled_nodes")) c.labeled_nodes = j["labeled_nodes"].get<std::vector<Index>>();
    c.trials = j.value("trials", Index{100});
    c.seed = j.value("seed", std::uint64_t{0});
    c.sampling = j.value("sampling", std::string("stratified")) == "uniform" ? Sampling::Uniform : Sampling::Stratified;
    if (j.contains("output")) {
        const auto& o = j["output"];
        auto opt = [&](const char* key, std::optional<std::filesystem::path>& dst) {
            if (o.contains(key)) dst = detail::resolve_path(base_dir, o[key].get<std::string>());
        };
        opt("table", c.output.table);
        opt("trials", c.output.trials);
        opt("predictions", c.output.predictions);
        opt("diagnostics", c.output.diagnostics);
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorKind::ConfigError, "cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        detail::fail(ErrorKind::ConfigError, "config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// Everything a configuration builds before any labels are drawn.
struct Problem {
    PointCloud cloud;
    std::optional<SlashedO> shapes;
    Graph graph;
    bool connected = false;
    Spectrum spectrum;
    Gbf gbf;
    KernelMatrix kernel;
    std::vector<FeatureSpec> features;
    std::optional<std::size_t> spectral_feature;  ///< index of the spectral binary feature, if any
    std::vector<int> truth;
};

inline PointCloud load_dataset(const DatasetConfig& d, std::uint64_t seed, std::optional<SlashedO>* shapes = nullptr) {
    if (d.generator == "two-moon") return gen_two_moon(seed, d.n_per_class, d.noise);
    if (d.generator == "slashed-o") {
        auto so = gen_slashed_o(seed, d.n_per_class, d.noise);
        PointCloud pc = so.cloud;
        if (shapes) *shapes = std::move(so);
        return pc;
    }
    PointCloud pc = load_csv(d.csv.string(), d.schema);
    if (d.minmax) min_max_scale(pc);
    return pc;
}

inline Graph build_config_graph(const ExperimentConfig& c, const PointCloud& pc, bool* connected = nullptr) {
    if (c.graph.type == "epsilon") {
        auto eg = epsilon_graph(pc, c.graph.radius, c.graph.kind);
        if (connected) *connected = eg.connected;
        return std::move(eg.graph);
    }
    const double alpha = c.graph.alpha ? *c.graph.alpha * c.graph.alpha_scale : median_alpha(pc, c.graph.alpha_scale);
    Graph g = complete_similarity_graph(pc, alpha, c.graph.kind);
    if (connected) *connected = true;
    return g;
}

inline Gbf build_config_gbf(const GbfConfig& g, const Spectrum& s) {
    if (g.type == "diffusion") return diffusion_gbf(s, g.t);
    if (g.type == "spline") return spline_gbf(s, g.eps, g.s);
    return polynomial_gbf(s, g.coeffs);
}

inline std::vector<int> read_binary_feature_file(const std::string& path, Index n) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorKind::IoError, "cannot open feature file '" + path + "'");
    std::vector<int> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line == "1" || line == "+1") {
            out.push_back(1);
        } else if (line == "-1") {
            out.push_back(-1);
        } else {
            detail::fail(ErrorKind::ParseError, "feature file line " + std::to_string(lineno) + ": expected +1 or -1");
        }
    }
    detail::require(static_cast<Index>(out.size()) == n, ErrorKind::DimensionMismatch,
                    "feature file has " + std::to_string(out.size()) + " values for " + std::to_string(n) + " nodes");
    return out;
}

inline Problem prepare(const ExperimentConfig& c) {
    std::optional<SlashedO> shapes;
    PointCloud pc = load_dataset(c.dataset, c.seed, &shapes);
    detail::require(pc.truth.has_value(), ErrorKind::LabelsInconsistent, "dataset has no ground truth");
    bool connected = false;
    Graph g = build_config_graph(c, pc, &connected);
    Spectrum s = eigendecompose(g);
    Gbf f = build_config_gbf(c.gbf, s);
    KernelMatrix k = kernel_matrix(s, f);

    std::vector<FeatureSpec> feats;
    std::optional<std::size_t> spectral;
    for (std::size_t i = 0; i < c.features.size(); ++i) {
        const auto& fc = c.features[i];
        if (fc.kind == FeatureKind::Binary) {
            if (fc.source == "spectral") {
                if (g.kind() == LaplacianKind::Normalized) {
                    feats.push_back(spectral_bipartition(g, s, fc.alpha));
                } else {
                    feats.push_back(spectral_bipartition(g, fc.alpha));
                }
                if (!spectral) spectral = i;
            } else {
                feats.push_back(FeatureSpec::binary(read_binary_feature_file(fc.source.substr(5), pc.size()), fc.alpha));
            }
        } else if (fc.source == "circle-distance") {
            feats.push_back(FeatureSpec::similarity(geometric_prior(pc, shapes->circle), fc.alpha));
        } else if (fc.source == "line-distance") {
            feats.push_back(FeatureSpec::similarity(geometric_prior(pc, shapes->line), fc.alpha));
        } else {
            feats.push_back(FeatureSpec::similarity(pc.points, fc.alpha));
        }
    }
    std::vector<int> truth = *pc.truth;
    return Problem{std::move(pc), std::move(shapes), std::move(g), connected, std::move(s), std::move(f),
                   std::move(k), std::move(feats), spectral, std::move(truth)};
}

/// Augmented full kernel for one feature set.
inline KernelMatrix feature_set_kernel(const Problem& p, const FeatureSet& fs) {
    std::vector<FeatureSpec> chosen;
    for (auto idx : fs.features) chosen.push_back(p.features[idx]);
    return augment_kernel(p.kernel, std::move(chosen)).values;
}

/// Polarity-aligned accuracy of an unsupervised labeling.
inline double aligned_accuracy(const std::vector<int>& labels, const std::vector<int>& truth) {
    const double a = accuracy(labels, truth);
    return std::max(a, 1.0 - a);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of trial `trial` at label count `n_labels`.
inline std::uint64_t trial_seed(std::uint64_t seed, Index n_labels, Index trial) {
    return splitmix64(splitmix64(seed) ^ splitmix64((static_cast<std::uint64_t>(n_labels) << 32) ^ static_cast<std::uint64_t>(trial)));
}

/// N distinct nodes drawn uniformly; stratified draws are repeated until both
/// classes appear (N >= 2).
inline std::vector<Index> sample_labels(std::uint64_t seed, Index n_labels, const std::vector<int>& truth, Sampling mode) {
    const auto n = static_cast<Index>(truth.size());
    detail::require(n_labels >= 1 && n_labels <= n, ErrorKind::InvalidParameter,
                    "label count " + std::to_string(n_labels) + " out of range for n = " + std::to_string(n));
    std::mt19937_64 rng(seed);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::iota(perm.begin(), perm.end(), Index{0});
        for (Index i = 0; i < n_labels; ++i) {
            std::uniform_int_distribution<Index> pick(i, n - 1);
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<Index> w(perm.begin(), perm.begin() + n_labels);
        if (mode == Sampling::Uniform || n_labels < 2) return w;
        bool pos = false;
        bool neg = false;
        for (Index v : w) (truth[static_cast<std::size_t>(v)] > 0 ? pos : neg) = true;
        if (pos && neg) return w;
    }
    detail::fail(ErrorKind::LabelsInconsistent, "could not draw labels from both classes");
}

/// Accuracy of sign(y*) for labels at W taken from the truth.
inline double rls_accuracy(const KernelMatrix& k, const std::vector<Index>& w, const std::vector<int>& truth, double gamma,
                           bool interpolate) {
    LabeledSet d{w, Vector(static_cast<Index>(w.size()))};
    for (std::size_t i = 0; i < w.size(); ++i) d.values(static_cast<Index>(i)) = truth[static_cast<std::size_t>(w[i])];
    FitOptions opts;
    opts.interpolate = interpolate;
    return accuracy(classify(predict(fit(k, d, gamma, opts), k)), truth);
}

struct TrialRecord {
    Index label_count = 0;
    Index trial = 0;
    std::vector<Index> nodes;
    std::vector<double> accuracy;  ///< one per method
};

struct ExperimentResult {
    std::string name;
    std::vector<std::string> methods;
    std::vector<Index> label_counts;
    Matrix means;  ///< methods x label counts
    std::vector<TrialRecord> trials;
    Index nodes = 0;
    std::size_t edges = 0;
    bool connected = false;
    std::uint64_t seed = 0;
};

/// Worker count from GBF_THREADS, else the hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("GBF_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

using TrialLog = std::function<void(const TrialRecord&, const std::vector<std::string>& methods)>;

/// Runs every label count for `trials` trials.  Per-trial results depend only
/// on (seed, label count, trial index), so thread count does not change them.
inline ExperimentResult run_experiment(const ExperimentConfig& c, const Problem& p, const TrialLog& log = {}) {
    ExperimentResult r;
    r.name = c.name;
    r.label_counts = c.label_counts;
    r.nodes = p.graph.size();
    r.edges = p.graph.edges().size();
    r.connected = p.connected;
    r.seed = c.seed;

    double spectral_acc = 0.0;
    if (p.spectral_feature) {
        r.methods.push_back("Spectral");
        spectral_acc = aligned_accuracy(p.features[*p.spectral_feature].labels(), p.truth);
    }
    r.methods.push_back("GBF-RLS");
    std::vector<KernelMatrix> kernels{p.kernel};
    for (const auto& fs : c.feature_sets) {
        r.methods.push_back(fs.name);
        kernels.push_back(feature_set_kernel(p, fs));
    }
    const std::size_t offset = p.spectral_feature ? 1 : 0;

    const auto trials = static_cast<std::size_t>(c.trials);
    r.trials.resize(c.label_counts.size() * trials);
    const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(1, trials)));

    r.means = Matrix::Zero(static_cast<Index>(r.methods.size()), static_cast<Index>(c.label_counts.size()));
    for (std::size_t j = 0; j < c.label_counts.size(); ++j) {
        const Index n_labels = c.label_counts[j];
        auto run_trial = [&](std::size_t t) {
            TrialRecord rec;
            rec.label_count = n_labels;
            rec.trial = static_cast<Index>(t);
            rec.nodes = sample_labels(trial_seed(c.seed, n_labels, rec.trial), n_labels, p.truth, c.sampling);
            rec.accuracy.assign(r.methods.size(), 0.0);
            if (p.spectral_feature) rec.accuracy[0] = spectral_acc;
            for (std::size_t m = 0; m < kernels.size(); ++m) {
                rec.accuracy[offset + m] = rls_accuracy(kernels[m], rec.nodes, p.truth, c.gamma, c.interpolate);
            }
            r.trials[j * trials + t] = std::move(rec);
        };
        if (workers <= 1) {
            for (std::size_t t = 0; t < trials; ++t) run_trial(t);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(workers);
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t t = w; t < trials; t += workers) run_trial(t);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& rec = r.trials[j * trials + t];
            for (std::size_t m = 0; m < r.methods.size(); ++m) {
                r.means(static_cast<Index>(m), static_cast<Index>(j)) += rec.accuracy[m];
            }
            if (log) log(rec, r.methods);
        }
        r.means.col(static_cast<Index>(j)) /= static_cast<double>(trials);
    }
    return r;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c, const TrialLog& log = {}) {
    return run_experiment(c, prepare(c), log);
}

inline std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// method,N=2,N=4,... with 4 decimals.
inline std::string table_csv(const ExperimentResult& r) {
    std::ostringstream os;
    os << "method";
    for (Index n : r.label_counts) os << ",N=" << n;
    os << '\n';
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
        os << r.methods[m];
        for (Index j = 0; j < r.means.cols(); ++j) os << ',' << format4(r.means(static_cast<Index>(m), j));
        os << '\n';
    }
    return os.str();
}

/// Aligned plain-text table for terminals.
inline std::string table_text(const ExperimentResult& r) {
    std::size_t width = 6;
    for (const auto& m : r.methods) width = std::max(width, m.size());
    std::ostringstream os;
    os << r.name << " (" << r.nodes << " nodes, " << r.edges << " edges)\n";
    os << std::string(width, ' ');
    for (Index n : r.label_counts) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%8s", ("N=" + std::to_string(n)).c_str());
        os << buf;
    }
    os << '\n';
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
        os << r.methods[m] << std::string(width - r.methods[m].size(), ' ');
        for (Index j = 0; j < r.means.cols(); ++j) os << "  " << format4(r.means(static_cast<Index>(m), j));
        os << '\n';
    }
    return os.str();
}

/// Per-trial log.  Node indices are 0-based.
inline json trials_json(const ExperimentResult& r) {
    json j;
    j["name"] = r.name;
    j["seed"] = r.seed;
    j["graph"] = {{"nodes", r.nodes}, {"edges", r.edges}, {"connected", r.connected}};
    j["methods"] = r.methods;
    j["label_counts"] = r.label_counts;
    json means = json::object();
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
        std::vector<double> row(static_cast<std::size_t>(r.means.cols()));
        for (Index k = 0; k < r.means.cols(); ++k) row[static_cast<std::size_t>(k)] = r.means(static_cast<Index>(m), k);
        means[r.methods[m]] = row;
    }
    j["means"] = means;
    json trials = json::array();
    for (const auto& t : r.trials) {
        json acc = json::object();
        for (std::size_t m = 0; m < r.methods.size(); ++m) acc[r.methods[m]] = t.accuracy[m];
        trials.push_back({{"N", t.label_count}, {"trial", t.trial}, {"nodes", t.nodes}, {"accuracy", acc}});
    }
    j["trials"] = trials;
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    detail::require(out.good(), ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << text;
    detail::require(out.good(), ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace gbf
