// Command-line front end: generate | graph | spectrum | classify | experiment | diagnose.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gbf/gbf.hpp"

namespace fs = std::filesystem;
using gbf::Index;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<Index> trials;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
    if (needs_config) opt->required();
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_option("--out", c.out, "output path");
    cmd->add_flag("--quiet", c.quiet, "suppress progress output");
}

gbf::ExperimentConfig load(const Common& c) {
    auto cfg = gbf::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.trials) cfg.trials = *c.trials;
    return cfg;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
    return p.parent_path() / (p.stem().string() + suffix);
}

int cmd_generate(const std::string& dataset, const Common& c, Index n_per_class, double noise) {
    const std::uint64_t seed = c.seed.value_or(0);
    const fs::path out = c.out.empty() ? fs::path(dataset + ".csv") : fs::path(c.out);
    if (dataset == "two-moon") {
        gbf::io::write_file(out, gbf::io::point_cloud_csv(gbf::gen_two_moon(seed, n_per_class, noise)));
    } else {
        const auto so = gbf::gen_slashed_o(seed, n_per_class, noise);
        gbf::io::write_file(out, gbf::io::point_cloud_csv(so.cloud));
        const json shapes{
            {"circle", {{"center", {so.circle.center.x(), so.circle.center.y()}}, {"radius", so.circle.radius}}},
            {"line", {{"a", {so.line.a.x(), so.line.a.y()}}, {"b", {so.line.b.x(), so.line.b.y()}}}}};
        gbf::io::write_file(with_suffix(out, ".shapes.json"), shapes.dump(2) + "\n");
    }
    if (!c.quiet) std::cerr << "wrote " << out.string() << "\n";
    return kExitOk;
}

int cmd_graph(const Common& c) {
    const auto cfg = load(c);
    std::optional<gbf::SlashedO> shapes;
    const auto pc = gbf::load_dataset(cfg.dataset, cfg.seed, &shapes);
    bool connected = false;
    const auto g = gbf::build_config_graph(cfg, pc, &connected);
    const auto text = gbf::io::graph_to_json(g).dump(1) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        gbf::io::write_file(c.out, text);
    }
    if (!c.quiet) {
        std::cerr << g.size() << " nodes, " << g.edges().size() << " edges" << (connected ? "" : " (disconnected)") << "\n";
    }
    return kExitOk;
}

int cmd_spectrum(const std::string& graph_path, const Common& c, const std::string& csv, const std::string& basis) {
    const auto g = gbf::io::read_graph(graph_path);
    const auto s = gbf::eigendecompose(g);
    const auto j = gbf::io::spectrum_to_json(s, g.kind());
    if (!c.out.empty()) gbf::io::write_file(c.out, j.dump(1) + "\n");
    if (!csv.empty()) gbf::io::write_file(csv, gbf::io::spectrum_csv(s));
    if (!basis.empty()) gbf::io::write_basis(fs::path(basis), s.basis());
    if (!c.quiet) {
        for (Index k = 0; k < s.size(); ++k) std::printf("%.12g\n", s.eigenvalue(k));
        if (g.kind() == gbf::LaplacianKind::Normalized) {
            std::printf("# spectrum within [0, 2]: %s\n", gbf::io::in_normalized_range(s) ? "yes" : "no");
        }
    }
    return kExitOk;
}

std::vector<Index> labeled_nodes(const gbf::ExperimentConfig& cfg, const gbf::Problem& p) {
    if (!cfg.labeled_nodes.empty()) {
        for (Index w : cfg.labeled_nodes) {
            gbf::detail::require(w < p.graph.size(), gbf::ErrorKind::InvalidCenter,
                                 "labeled node " + std::to_string(w) + " out of range");
        }
        return cfg.labeled_nodes;
    }
    const Index n = cfg.label_counts.front();
    return gbf::sample_labels(gbf::trial_seed(cfg.seed, n, 0), n, p.truth, cfg.sampling);
}

/// Kernel of the first feature set, or the plain GBF kernel without features.
gbf::KernelMatrix classifier_kernel(const gbf::ExperimentConfig& cfg, const gbf::Problem& p) {
    return cfg.feature_sets.empty() ? p.kernel : gbf::feature_set_kernel(p, cfg.feature_sets.front());
}

/// The binary alpha = -1 feature of the first feature set, if that is all it holds.
std::optional<gbf::FeatureSpec> bin_psi(const gbf::ExperimentConfig& cfg, const gbf::Problem& p) {
    if (cfg.feature_sets.empty() || cfg.feature_sets.front().features.size() != 1) return std::nullopt;
    const auto& f = p.features[cfg.feature_sets.front().features.front()];
    if (f.kind() == gbf::FeatureKind::Binary && f.alpha() == -1.0) return f;
    return std::nullopt;
}

json diagnostics_json(const gbf::ExperimentConfig& cfg, const gbf::Problem& p, const gbf::KernelMatrix& k,
                      const std::vector<Index>& w) {
    json j;
    try {
        j = gbf::io::diagnostics_to_json(gbf::diagnose(k, w, cfg.gamma));
    } catch (const gbf::Error& e) {
        j["error"] = e.what();
    }
    if (auto psi = bin_psi(cfg, p)) {
        try {
            gbf::Vector prior(static_cast<Index>(psi->labels().size()));
            for (std::size_t i = 0; i < psi->labels().size(); ++i) prior(static_cast<Index>(i)) = psi->labels()[i];
            // labels taken from the prior itself, where the classifier must reproduce it
            const auto data = gbf::labeled_from(w, prior);
            const auto r = gbf::consistency_check(p.kernel, *psi, data, cfg.gamma);
            j["prior_consistency"] = {{"applicable", r.applicable},
                                      {"consistent", r.consistent},
                                      {"gamma_threshold", r.gamma_threshold},
                                      {"note", r.reason}};
        } catch (const gbf::Error& e) {
            j["prior_consistency"] = {{"error", e.what()}};
        }
        try {
            gbf::Vector truth(static_cast<Index>(p.truth.size()));
            for (std::size_t i = 0; i < p.truth.size(); ++i) truth(static_cast<Index>(i)) = p.truth[i];
            const auto b = gbf::error_bound(p.spectrum, p.gbf, *psi, w, cfg.gamma, truth);
            j["error_bound"] = {{"holds", b.holds},
                                {"native_norm", b.native_norm},
                                {"regularization_holds", b.regularization_holds},
                                {"interpolant_available", b.interpolant.has_value()}};
        } catch (const gbf::Error& e) {
            j["error_bound"] = {{"error", e.what()}};
        }
    }
    return j;
}

int cmd_classify(const Common& c, const std::string& diagnostics, const std::string& model_path) {
    const auto cfg = load(c);
    const auto p = gbf::prepare(cfg);
    const auto w = labeled_nodes(cfg, p);
    const auto k = classifier_kernel(cfg, p);
    gbf::LabeledSet data{w, gbf::Vector(static_cast<Index>(w.size()))};
    for (std::size_t i = 0; i < w.size(); ++i) data.values(static_cast<Index>(i)) = p.truth[static_cast<std::size_t>(w[i])];
    gbf::FitOptions opts;
    opts.interpolate = cfg.interpolate;
    opts.kernel_spec = cfg.name + (cfg.feature_sets.empty() ? "" : " / " + cfg.feature_sets.front().name);
    const auto model = gbf::fit(k, data, cfg.gamma, opts);
    const auto score = gbf::predict(model, k);
    const auto labels = gbf::classify(score);

    std::ostringstream os;
    os.precision(17);
    const bool planar = p.cloud.dim() == 2;
    os << (planar ? "index,x,y,score,label\n" : "index,score,label\n");
    for (Index v = 0; v < score.size(); ++v) {
        os << v << ',';
        if (planar) os << p.cloud.points(v, 0) << ',' << p.cloud.points(v, 1) << ',';
        os << score(v) << ',' << labels[static_cast<std::size_t>(v)] << '\n';
    }
    const fs::path out = !c.out.empty() ? fs::path(c.out) : cfg.output.predictions.value_or(fs::path(cfg.name + ".predictions.csv"));
    gbf::io::write_file(out, os.str());
    if (!model_path.empty()) gbf::io::write_file(model_path, gbf::io::model_to_json(model).dump(1) + "\n");

    std::optional<fs::path> diag;
    if (!diagnostics.empty()) diag = diagnostics;
    else if (cfg.output.diagnostics) diag = cfg.output.diagnostics;
    if (diag) gbf::io::write_file(*diag, diagnostics_json(cfg, p, k, w).dump(1) + "\n");

    if (!c.quiet) {
        std::printf("%zu labels, accuracy %s\n", w.size(), gbf::format4(gbf::accuracy(labels, p.truth)).c_str());
        if (p.spectral_feature) {
            const auto& prior = p.features[*p.spectral_feature].labels();
            std::printf("agreement with the spectral prior %s\n", gbf::format4(gbf::accuracy(labels, prior)).c_str());
        }
    }
    return kExitOk;
}

int cmd_experiment(const Common& c) {
    const auto cfg = load(c);
    gbf::TrialLog log;
    if (!c.quiet) {
        log = [](const gbf::TrialRecord& r, const std::vector<std::string>& methods) {
            std::fprintf(stderr, "N=%lld trial=%lld", static_cast<long long>(r.label_count), static_cast<long long>(r.trial));
            for (std::size_t m = 0; m < methods.size(); ++m) std::fprintf(stderr, " %s=%.4f", methods[m].c_str(), r.accuracy[m]);
            std::fputc('\n', stderr);
        };
    }
    const auto result = gbf::run_experiment(cfg, log);
    const fs::path table = !c.out.empty() ? fs::path(c.out) : cfg.output.table.value_or(fs::path(cfg.name + ".csv"));
    const fs::path trials = !c.out.empty() ? with_suffix(table, ".trials.json")
                                           : cfg.output.trials.value_or(with_suffix(table, ".trials.json"));
    gbf::io::write_file(table, gbf::table_csv(result));
    gbf::io::write_file(trials, gbf::trials_json(result).dump(1) + "\n");
    std::cout << gbf::table_text(result);
    return kExitOk;
}

int cmd_diagnose(const Common& c, const std::string& csv) {
    const auto cfg = load(c);
    const auto p = gbf::prepare(cfg);
    const auto w = labeled_nodes(cfg, p);
    const auto k = classifier_kernel(cfg, p);
    const auto j = diagnostics_json(cfg, p, k, w);
    if (c.out.empty()) {
        std::cout << j.dump(1) << "\n";
    } else {
        gbf::io::write_file(c.out, j.dump(1) + "\n");
    }
    if (!csv.empty()) gbf::io::write_file(csv, gbf::io::diagnostics_csv(gbf::diagnose(k, w, cfg.gamma)));
    return kExitOk;
}

int exit_code(gbf::ErrorKind kind) {
    switch (gbf::classify_error(kind)) {
    case gbf::ErrorClass::Config: return kExitUsage;
    case gbf::ErrorClass::Data: return kExitData;
    case gbf::ErrorClass::Numerical: return kExitNumerical;
    }
    return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph basis function classification with feature-augmented kernels"};
    app.require_subcommand(1);
    Common common;

    std::string dataset;
    Index n_per_class = 300;
    double noise = 0.0;
    auto* gen = app.add_subcommand("generate", "write a synthetic point cloud as CSV");
    gen->add_option("dataset", dataset, "two-moon | slashed-o")->required()->check(CLI::IsMember({"two-moon", "slashed-o"}));
    gen->add_option("--n-per-class", n_per_class, "points per class")->check(CLI::PositiveNumber);
    gen->add_option("--noise", noise, "std of the Gaussian jitter")->check(CLI::NonNegativeNumber);
    add_common(gen, common, false);

    auto* graph = app.add_subcommand("graph", "build the graph of a config and write it as JSON");
    add_common(graph, common, true);

    std::string graph_path, csv, basis;
    auto* spec = app.add_subcommand("spectrum", "eigenvalues of a graph file");
    spec->add_option("graph", graph_path, "graph JSON file")->required();
    spec->add_option("--csv", csv, "also write eigenvalues as CSV");
    spec->add_option("--basis", basis, "also write the eigenvector matrix (binary)");
    add_common(spec, common, false);

    std::string diagnostics, model;
    auto* cls = app.add_subcommand("classify", "fit one classifier and write per-node predictions");
    cls->add_option("--diagnostics", diagnostics, "write diagnostics JSON");
    cls->add_option("--model", model, "write the fitted model as JSON");
    add_common(cls, common, true);

    auto* exp = app.add_subcommand("experiment", "run the repeated-trial accuracy experiment");
    exp->add_option("--trials", common.trials, "override the number of trials")->check(CLI::PositiveNumber);
    add_common(exp, common, true);

    std::string diag_csv;
    auto* diag = app.add_subcommand("diagnose", "power function, bounds and consistency diagnostics");
    diag->add_option("--csv", diag_csv, "also write per-node diagnostics as CSV");
    add_common(diag, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen) return cmd_generate(dataset, common, n_per_class, noise);
        if (*graph) return cmd_graph(common);
        if (*spec) return cmd_spectrum(graph_path, common, csv, basis);
        if (*cls) return cmd_classify(common, diagnostics, model);
        if (*exp) return cmd_experiment(common);
        if (*diag) return cmd_diagnose(common, diag_csv);
    } catch (const gbf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
