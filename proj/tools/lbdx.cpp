// lbdx: build, export and serve literature-based discovery snapshots.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lbdx/pipeline.hpp"
#include "lbdx/render.hpp"
#include "lbdx/service.hpp"

namespace fs = std::filesystem;
using namespace lbdx;

namespace {

constexpr int kExitStageError = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitServeError = 3;

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("lbdx");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char *env = std::getenv("LBDX_LOG"); env != nullptr && *env != '\0') {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

int run_build(pipeline::PipelineConfig config) {
    for (const auto &path : {config.s_corpus, config.t_corpus}) {
        if (!fs::exists(path)) {
            std::cerr << "error: input file not found: " << path.string() << "\n";
            return kExitMissingInput;
        }
    }
    try {
        auto snap = pipeline::run_pipeline(config);
        pipeline::write_snapshot(snap, config.output);
        const auto &s = snap.summary;
        std::cout << "snapshot " << config.output.string() << "\n"
                  << "  documents S=" << s.documents_s << " T=" << s.documents_t << "\n"
                  << "  vocabulary a=" << s.vocabulary_a << " b=" << s.vocabulary_b << " c=" << s.vocabulary_c
                  << " (idf-discarded " << s.idf_discarded.size() << ")\n"
                  << "  redundant " << s.redundant << ", quality neighborhoods " << s.quality_neighborhoods
                  << ", entry points " << s.entry_points << "\n"
                  << "  content hash " << snap.content_hash << "\n";
    } catch (const pipeline::StageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageError;
    }
    return 0;
}

int run_export(const fs::path &snapshot_dir, const std::string &format, fs::path out_dir) {
    try {
        const auto snap = pipeline::load_snapshot(snapshot_dir);
        if (out_dir.empty()) out_dir = snapshot_dir / format;
        fs::create_directories(out_dir);
        for (std::size_t i = 0; i < snap.entry_points.size(); ++i) {
            const auto &ep = snap.entry_points[i];
            const fs::path base = out_dir / ("entry_point_" + std::to_string(ep.id));
            if (format == "json") {
                auto j = discovery::entry_point_to_json(ep, snap.vocabulary);
                j["layout"] = layout::layout_to_json(snap.layouts.at(i));
                write_text(base.string() + ".json", j.dump(2) + "\n");
            } else if (format == "dot") {
                write_text(base.string() + ".dot", render::entry_point_dot(ep, snap.vocabulary));
            } else {
                write_text(base.string() + ".svg", render::entry_point_svg(ep, snap.layouts.at(i), snap.vocabulary));
            }
        }
        std::cout << "wrote " << snap.entry_points.size() << " " << format << " files to " << out_dir.string() << "\n";
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageError;
    }
    return 0;
}

int run_serve(const fs::path &snapshot_dir, service::ServerOptions options) {
    std::shared_ptr<const pipeline::Snapshot> snap;
    try {
        snap = std::make_shared<const pipeline::Snapshot>(pipeline::load_snapshot(snapshot_dir));
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageError;
    }

    // Block the shutdown signals before httplib spawns its workers so only
    // the watcher thread below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto api = std::make_shared<service::Api>(std::move(snap));
    service::Server server(api, options);
    if (!server.bind()) {
        std::cerr << "error: cannot bind " << options.host << ":" << options.port << " (port in use?)\n";
        return kExitServeError;
    }
    std::cout << "listening on http://" << options.host << ":" << server.port() << std::endl;

    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("received signal {}, shutting down", sig);
        server.stop();
    });
    const bool ok = server.listen();
    // listen() also returns if the server failed; wake the watcher either way.
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    return ok ? 0 : kExitServeError;
}

}  // namespace

int main(int argc, char **argv) {
    configure_logging();

    CLI::App app{"Literature-based discovery engine: entry points from two keyword corpora"};
    app.require_subcommand(1);

    pipeline::PipelineConfig config;
    std::string redundancy_scope = "a";
    std::string quality_population = "nearest-c";
    std::string layout_forces = "mst";
    auto *build = app.add_subcommand("build", "Run the pipeline and write a snapshot directory");
    build->add_option("--s-corpus", config.s_corpus, "JSONL corpus of the source (S) literature")->required();
    build->add_option("--t-corpus", config.t_corpus, "JSONL corpus of the target (T) literature")->required();
    build->add_option("--alpha", config.alpha, "Context smoothing exponent")->capture_default_str();
    build->add_option("--k", config.k, "Embedding dimension")->capture_default_str();
    build->add_option("--knn", config.knn, "Neighbors per a-concept")->capture_default_str();
    build->add_option("--redundancy-eps", config.redundancy_eps, "Cosine distance for redundant tokens")
        ->capture_default_str();
    build->add_option("--quality-quantile", config.quality_quantile, "Quantile of nearest-c distances")
        ->capture_default_str();
    build->add_option("--idf-threshold", config.idf_threshold, "Drop tokens with idf below this")
        ->capture_default_str();
    build->add_option("--seed", config.seed, "Seed for the layout")->capture_default_str();
    build->add_option("--out", config.output, "Snapshot directory")->required();
    build->add_flag("--symmetrize", config.symmetrize, "Average the SPPMI matrix with its transpose");
    build->add_option("--sigma-exponent", config.sigma_exponent, "Embed rows of U·Σ^p")->capture_default_str();
    build->add_option("--redundancy-scope", redundancy_scope, "Prune duplicates among a-concepts or all tokens")
        ->check(CLI::IsMember({"a", "all"}))
        ->capture_default_str();
    build->add_option("--quality-population", quality_population, "Values the quality quantile is taken over")
        ->check(CLI::IsMember({"nearest-c", "nearest-any"}))
        ->capture_default_str();
    build->add_option("--layout-iterations", config.layout_iterations, "Force-directed iterations")
        ->capture_default_str();
    build->add_option("--layout-forces", layout_forces, "Springs on MST edges or all member pairs")
        ->check(CLI::IsMember({"mst", "complete"}))
        ->capture_default_str();

    fs::path export_snapshot;
    std::string export_format;
    fs::path export_out;
    auto *exp = app.add_subcommand("export", "Write one file per entry point");
    exp->add_option("snapshot", export_snapshot, "Snapshot directory")->required();
    exp->add_option("--format", export_format, "json, dot or svg")->required()->check(CLI::IsMember({"json", "dot", "svg"}));
    exp->add_option("--out", export_out, "Output directory (default: <snapshot>/<format>)");

    fs::path serve_snapshot;
    service::ServerOptions serve_options;
    auto *serve = app.add_subcommand("serve", "Serve a snapshot over the HTTP JSON API");
    serve->add_option("snapshot", serve_snapshot, "Snapshot directory")->required();
    serve->add_option("--port", serve_options.port, "TCP port (0 picks a free one)")->capture_default_str();
    serve->add_option("--host", serve_options.host, "Interface to bind")->capture_default_str();
    serve->add_option("--cors-origin", serve_options.cors_origin, "Access-Control-Allow-Origin value")
        ->capture_default_str();
    serve->add_option("--static-dir", serve_options.static_dir, "Directory with the browser client bundle");

    CLI11_PARSE(app, argc, argv);

    if (*build) {
        config.redundancy_scope =
            redundancy_scope == "all" ? discovery::RedundancyScope::All : discovery::RedundancyScope::AConcepts;
        config.quality_population = quality_population == "nearest-any" ? discovery::QualityPopulation::NearestAny
                                                                         : discovery::QualityPopulation::NearestC;
        config.layout_forces = layout_forces == "complete" ? pipeline::LayoutForces::Complete : pipeline::LayoutForces::Mst;
        return run_build(config);
    }
    if (*exp) return run_export(export_snapshot, export_format, export_out);
    return run_serve(serve_snapshot, serve_options);
}
