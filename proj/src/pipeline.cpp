#include "lbdx/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "lbdx/hashing.hpp"

namespace lbdx::pipeline {

using nlohmann::json;

namespace {

constexpr const char *kManifest = "manifest.json";

std::string scope_name(discovery::RedundancyScope s) {
    return s == discovery::RedundancyScope::AConcepts ? "a" : "all";
}

std::string population_name(discovery::QualityPopulation p) {
    return p == discovery::QualityPopulation::NearestC ? "nearest-c" : "nearest-any";
}

std::string forces_name(LayoutForces f) {
    return f == LayoutForces::Mst ? "mst" : "complete";
}

// Run `fn`, converting any failure into a StageError naming `stage`.
template <typename Fn>
auto stage(const char *name, Fn &&fn) {
    spdlog::debug("stage {}", name);
    try {
        return fn();
    } catch (const StageError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(name, e.what());
    }
}

std::string read_bytes(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_bytes(const std::filesystem::path &path, const std::string &bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidArgument("write failed for " + path.string());
}

}  // namespace

// --- config --------------------------------------------------------------

void PipelineConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("--alpha must lie in (0, 1]");
    if (k < 1) throw InvalidArgument("--k must be >= 1");
    if (layout_iterations < 1) throw InvalidArgument("layout iterations must be >= 1");
    discovery_config().validate();
}

discovery::DiscoveryConfig PipelineConfig::discovery_config() const {
    discovery::DiscoveryConfig dc;
    dc.knn = knn;
    dc.redundancy_eps = redundancy_eps;
    dc.quality_quantile = quality_quantile;
    dc.redundancy_scope = redundancy_scope;
    dc.quality_population = quality_population;
    return dc;
}

json PipelineConfig::to_json() const {
    return {{"s_corpus", s_corpus.filename().string()},
            {"t_corpus", t_corpus.filename().string()},
            {"alpha", alpha},
            {"k", k},
            {"knn", knn},
            {"redundancy_eps", redundancy_eps},
            {"quality_quantile", quality_quantile},
            {"idf_threshold", idf_threshold},
            {"seed", seed},
            {"symmetrize", symmetrize},
            {"sigma_exponent", sigma_exponent},
            {"redundancy_scope", scope_name(redundancy_scope)},
            {"quality_population", population_name(quality_population)},
            {"layout_iterations", layout_iterations},
            {"layout_forces", forces_name(layout_forces)}};
}

PipelineConfig PipelineConfig::from_json(const json &j) {
    PipelineConfig c;
    c.s_corpus = j.at("s_corpus").get<std::string>();
    c.t_corpus = j.at("t_corpus").get<std::string>();
    c.alpha = j.at("alpha").get<double>();
    c.k = j.at("k").get<int>();
    c.knn = j.at("knn").get<int>();
    c.redundancy_eps = j.at("redundancy_eps").get<double>();
    c.quality_quantile = j.at("quality_quantile").get<double>();
    c.idf_threshold = j.at("idf_threshold").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.symmetrize = j.at("symmetrize").get<bool>();
    c.sigma_exponent = j.at("sigma_exponent").get<double>();
    c.redundancy_scope = j.at("redundancy_scope").get<std::string>() == "all" ? discovery::RedundancyScope::All
                                                                           : discovery::RedundancyScope::AConcepts;
    c.quality_population = j.at("quality_population").get<std::string>() == "nearest-any"
                               ? discovery::QualityPopulation::NearestAny
                               : discovery::QualityPopulation::NearestC;
    c.layout_iterations = j.at("layout_iterations").get<int>();
    c.layout_forces = j.at("layout_forces").get<std::string>() == "complete" ? LayoutForces::Complete : LayoutForces::Mst;
    return c;
}

// --- summary -------------------------------------------------------------

json Summary::to_json() const {
    return {{"documents", {{"S", documents_s}, {"T", documents_t}}},
            {"vocabulary", {{"a", vocabulary_a}, {"b", vocabulary_b}, {"c", vocabulary_c}}},
            {"idf_discarded", idf_discarded},
            {"zero_vectors", zero_vectors},
            {"redundant", redundant},
            {"anchors", anchors},
            {"neighborhoods", neighborhoods},
            {"neighborhoods_with_c", neighborhoods_with_c},
            {"quality_threshold", quality_threshold ? json(*quality_threshold) : json(nullptr)},
            {"quality_neighborhoods", quality_neighborhoods},
            {"entry_points", entry_points},
            {"members", {{"a", members_a}, {"b", members_b}, {"c", members_c}}},
            {"matched_documents", {{"S", matched_s}, {"T", matched_t}}},
            {"coverage", {{"S", coverage_s()}, {"T", coverage_t()}}}};
}

Summary Summary::from_json(const json &j) {
    Summary s;
    s.documents_s = j.at("documents").at("S").get<std::size_t>();
    s.documents_t = j.at("documents").at("T").get<std::size_t>();
    s.vocabulary_a = j.at("vocabulary").at("a").get<std::size_t>();
    s.vocabulary_b = j.at("vocabulary").at("b").get<std::size_t>();
    s.vocabulary_c = j.at("vocabulary").at("c").get<std::size_t>();
    s.idf_discarded = j.at("idf_discarded").get<std::vector<std::string>>();
    s.zero_vectors = j.at("zero_vectors").get<std::size_t>();
    s.redundant = j.at("redundant").get<std::size_t>();
    s.anchors = j.at("anchors").get<std::size_t>();
    s.neighborhoods = j.at("neighborhoods").get<std::size_t>();
    s.neighborhoods_with_c = j.at("neighborhoods_with_c").get<std::size_t>();
    if (!j.at("quality_threshold").is_null()) s.quality_threshold = j.at("quality_threshold").get<double>();
    s.quality_neighborhoods = j.at("quality_neighborhoods").get<std::size_t>();
    s.entry_points = j.at("entry_points").get<std::size_t>();
    s.members_a = j.at("members").at("a").get<std::size_t>();
    s.members_b = j.at("members").at("b").get<std::size_t>();
    s.members_c = j.at("members").at("c").get<std::size_t>();
    s.matched_s = j.at("matched_documents").at("S").get<std::size_t>();
    s.matched_t = j.at("matched_documents").at("T").get<std::size_t>();
    return s;
}

// --- running -------------------------------------------------------------

Snapshot run_pipeline(const PipelineConfig &config) {
    config.validate();
    auto docs = stage("load", [&] {
        for (const auto &path : {config.s_corpus, config.t_corpus}) {
            if (!std::filesystem::exists(path)) throw InvalidArgument("input file not found: " + path.string());
        }
        auto s = corpus::load_corpus(config.s_corpus, corpus::Collection::S);
        auto t = corpus::load_corpus(config.t_corpus, corpus::Collection::T);
        spdlog::info("loaded {} S and {} T documents", s.size(), t.size());
        s.insert(s.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
        corpus::check_unique_ids(s);
        return s;
    });
    return run_pipeline(config, std::move(docs));
}

Snapshot run_pipeline(const PipelineConfig &config, std::vector<corpus::Document> docs) {
    config.validate();
    Snapshot snap;
    snap.config = config;
    snap.built_at = build_timestamp();

    snap.vocabulary = stage("vocabulary", [&] {
        const corpus::Normalizer normalizer;
        for (auto &doc : docs) corpus::preprocess(doc, normalizer);
        auto vocab = corpus::build_vocabulary(docs, config.idf_threshold);
        spdlog::info("vocabulary |Va|={} |Vb|={} |Vc|={}, {} discarded by idf", vocab.v_a.size(), vocab.v_b.size(),
                     vocab.v_c.size(), vocab.discarded.size());
        return vocab;
    });

    snap.space = stage("embedding", [&] {
        const auto counts = embedding::count_cooccurrences(docs);
        const auto matrix = embedding::sppmi_matrix(counts, config.alpha, config.symmetrize);
        spdlog::info("SPPMI matrix {}x{} with {} nonzeros", matrix.values.rows(), matrix.values.cols(),
                     matrix.values.nonZeros());
        return embedding::svd_embed(matrix, {config.k, config.sigma_exponent, config.seed});
    });

    const auto found = stage("discovery", [&] {
        auto result = discovery::discover(snap.space, snap.vocabulary, config.discovery_config());
        spdlog::info("{} anchors, {} redundant, {} quality neighborhoods, {} entry points", result.anchors.size(),
                     result.redundant.size(), result.quality.retained.size(), result.entry_points.size());
        return result;
    });
    snap.entry_points = found.entry_points;

    snap.layouts = stage("layout", [&] {
        // One task per entry point; each layout is single-threaded.
        std::vector<std::future<layout::LayoutResult>> tasks;
        for (const auto &ep : snap.entry_points) {
            tasks.push_back(std::async(std::launch::async, [&config, &snap, &ep] {
                return config.layout_forces == LayoutForces::Mst
                           ? layout::layout_entry_point(ep, config.seed, config.layout_iterations)
                           : layout::layout_entry_point_complete(ep, snap.space, config.seed, config.layout_iterations);
            }));
        }
        std::vector<layout::LayoutResult> out;
        for (auto &t : tasks) out.push_back(t.get());
        return out;
    });

    snap.documents = explore::DocumentStore(std::move(docs));

    Summary &s = snap.summary;
    s.documents_s = snap.documents.count(corpus::Collection::S);
    s.documents_t = snap.documents.count(corpus::Collection::T);
    s.vocabulary_a = snap.vocabulary.v_a.size();
    s.vocabulary_b = snap.vocabulary.v_b.size();
    s.vocabulary_c = snap.vocabulary.v_c.size();
    for (const auto &[token, idf] : snap.vocabulary.discarded) s.idf_discarded.push_back(token);
    s.zero_vectors = found.zero_vectors.size();
    s.redundant = found.redundant.size();
    s.anchors = found.anchors.size();
    s.neighborhoods = found.neighborhoods.size();
    s.neighborhoods_with_c = found.quality.with_c_concept;
    s.quality_threshold = found.quality.threshold;
    s.quality_neighborhoods = found.quality.retained.size();
    s.entry_points = snap.entry_points.size();
    std::set<const corpus::Document *> matched;
    for (const auto &ep : snap.entry_points) {
        for (const auto &[token, cls] : ep.classes) {
            ++(cls == corpus::ConceptClass::A ? s.members_a : cls == corpus::ConceptClass::B ? s.members_b : s.members_c);
        }
        for (const auto &r : explore::rank_documents(explore::Selection::from_entry_point(ep), snap.documents.documents())) {
            matched.insert(r.document);
        }
    }
    for (const auto *doc : matched) ++(doc->collection == corpus::Collection::T ? s.matched_t : s.matched_s);
    return snap;
}

// --- artifacts -----------------------------------------------------------

const std::vector<std::string> &artifact_names() {
    static const std::vector<std::string> names = {"vocabulary.json", "embeddings.bin", "entry_points.json",
                                                   "layouts.json", "documents.json"};
    return names;
}

std::map<std::string, std::string> render_artifacts(const Snapshot &snapshot) {
    const json config = snapshot.config.to_json();
    std::map<std::string, std::string> out;

    json vocab = corpus::vocabulary_to_json(snapshot.vocabulary);
    vocab["config"] = config;
    out["vocabulary.json"] = vocab.dump(2) + "\n";

    out["embeddings.bin"] = embedding::serialize_embeddings(snapshot.space);

    json eps = json::array();
    for (const auto &ep : snapshot.entry_points) eps.push_back(discovery::entry_point_to_json(ep, snapshot.vocabulary));
    out["entry_points.json"] = json{{"config", config}, {"entry_points", eps}}.dump(2) + "\n";

    json layouts = json::array();
    for (const auto &l : snapshot.layouts) layouts.push_back(layout::layout_to_json(l));
    out["layouts.json"] = json{{"config", config}, {"layouts", layouts}}.dump(2) + "\n";

    json docs = json::array();
    for (const auto &d : snapshot.documents.documents()) docs.push_back(corpus::document_to_json(d));
    out["documents.json"] = json{{"config", config}, {"documents", docs}}.dump(2) + "\n";
    return out;
}

std::string combine_hashes(const std::map<std::string, std::string> &artifact_hashes) {
    std::string joined;
    for (const auto &[name, hash] : artifact_hashes) joined += name + ":" + hash + "\n";
    return sha256_hex(joined);
}

void write_snapshot(Snapshot &snapshot, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const auto artifacts = render_artifacts(snapshot);
    std::map<std::string, std::string> hashes;
    for (const auto &[name, bytes] : artifacts) {
        write_bytes(dir / name, bytes);
        hashes[name] = sha256_hex(bytes);
    }
    snapshot.content_hash = combine_hashes(hashes);
    const json manifest = {{"config", snapshot.config.to_json()},
                           {"built_at", snapshot.built_at},
                           {"artifacts", hashes},
                           {"content_hash", snapshot.content_hash},
                           {"summary", snapshot.summary.to_json()}};
    write_bytes(dir / kManifest, manifest.dump(2) + "\n");
    spdlog::info("snapshot written to {} ({})", dir.string(), snapshot.content_hash);
}

Snapshot load_snapshot(const std::filesystem::path &dir) {
    const auto manifest_path = dir / kManifest;
    if (!std::filesystem::exists(manifest_path)) {
        throw InvalidArgument("no snapshot manifest at " + manifest_path.string());
    }
    const json manifest = json::parse(read_bytes(manifest_path));

    std::map<std::string, std::string> bytes;
    std::map<std::string, std::string> hashes;
    for (const auto &name : artifact_names()) {
        bytes[name] = read_bytes(dir / name);
        hashes[name] = sha256_hex(bytes[name]);
        const auto expected = manifest.at("artifacts").at(name).get<std::string>();
        if (hashes[name] != expected) {
            throw InvalidArgument("artifact " + name + " does not match its manifest hash");
        }
    }

    Snapshot snap;
    snap.config = PipelineConfig::from_json(manifest.at("config"));
    snap.built_at = manifest.at("built_at").get<std::string>();
    snap.summary = Summary::from_json(manifest.at("summary"));
    snap.content_hash = combine_hashes(hashes);
    snap.vocabulary = corpus::vocabulary_from_json(json::parse(bytes.at("vocabulary.json")));
    snap.space = embedding::deserialize_embeddings(bytes.at("embeddings.bin"));
    const json entry_points = json::parse(bytes.at("entry_points.json"));
    for (const auto &ep : entry_points.at("entry_points")) {
        snap.entry_points.push_back(discovery::entry_point_from_json(ep));
    }
    const json layouts = json::parse(bytes.at("layouts.json"));
    for (const auto &l : layouts.at("layouts")) {
        snap.layouts.push_back(layout::layout_from_json(l));
    }
    std::vector<corpus::Document> docs;
    const json documents = json::parse(bytes.at("documents.json"));
    for (const auto &d : documents.at("documents")) {
        docs.push_back(corpus::document_from_json(d));
    }
    snap.documents = explore::DocumentStore(std::move(docs));
    return snap;
}

std::string build_timestamp() {
    std::time_t t = 0;
    if (const char *epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace lbdx::pipeline
