#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lbdx/corpus.hpp"
#include "lbdx/discovery.hpp"
#include "lbdx/embedding.hpp"
#include "lbdx/errors.hpp"
#include "lbdx/explore.hpp"
#include "lbdx/layout.hpp"

namespace lbdx::pipeline {

/// Raised when a pipeline stage fails; `stage()` names it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string &what)
        : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
    const std::string &stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

enum class LayoutForces { Mst, Complete };

struct PipelineConfig {
    std::filesystem::path s_corpus;
    std::filesystem::path t_corpus;
    double alpha = embedding::kDefaultAlpha;
    int k = 50;
    int knn = 4;
    double redundancy_eps = 0.01;
    double quality_quantile = 0.25;
    double idf_threshold = 1.0;
    std::uint64_t seed = 0;
    std::filesystem::path output;

    bool symmetrize = false;
    double sigma_exponent = 0.0;
    discovery::RedundancyScope redundancy_scope = discovery::RedundancyScope::AConcepts;
    discovery::QualityPopulation quality_population = discovery::QualityPopulation::NearestC;
    int layout_iterations = layout::kDefaultIterations;
    LayoutForces layout_forces = LayoutForces::Mst;

    void validate() const;
    discovery::DiscoveryConfig discovery_config() const;
    /// Parameters echoed into every artifact. Corpus paths are reported by
    /// file name only so snapshots do not depend on the working directory.
    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json &j);
};

/// Counts reported in the manifest and by /api/meta.
struct Summary {
    std::size_t documents_s = 0;
    std::size_t documents_t = 0;
    std::size_t vocabulary_a = 0;
    std::size_t vocabulary_b = 0;
    std::size_t vocabulary_c = 0;
    std::vector<std::string> idf_discarded;
    std::size_t zero_vectors = 0;
    std::size_t redundant = 0;
    std::size_t anchors = 0;
    std::size_t neighborhoods = 0;
    std::size_t neighborhoods_with_c = 0;
    std::optional<double> quality_threshold;
    std::size_t quality_neighborhoods = 0;
    std::size_t entry_points = 0;
    std::size_t members_a = 0;
    std::size_t members_b = 0;
    std::size_t members_c = 0;
    std::size_t matched_t = 0;
    std::size_t matched_s = 0;

    double coverage_t() const { return documents_t ? static_cast<double>(matched_t) / static_cast<double>(documents_t) : 0.0; }
    double coverage_s() const { return documents_s ? static_cast<double>(matched_s) / static_cast<double>(documents_s) : 0.0; }

    nlohmann::json to_json() const;
    static Summary from_json(const nlohmann::json &j);
};

struct Snapshot {
    PipelineConfig config;
    corpus::Vocabulary vocabulary;
    embedding::EmbeddingSpace space;
    std::vector<discovery::EntryPoint> entry_points;
    std::vector<layout::LayoutResult> layouts;  ///< parallel to entry_points
    explore::DocumentStore documents;
    Summary summary;
    std::string built_at;
    /// SHA-256 over the artifact hashes; empty until written or loaded.
    std::string content_hash;
};

/// Run every stage in memory: load, preprocess, vocabulary, co-occurrence,
/// SPPMI, SVD, discovery, layout. Stage failures surface as StageError.
Snapshot run_pipeline(const PipelineConfig &config);

/// Same as run_pipeline, starting from documents already loaded.
Snapshot run_pipeline(const PipelineConfig &config, std::vector<corpus::Document> docs);

/// Artifact file names, in manifest order.
const std::vector<std::string> &artifact_names();

/// Serialize each artifact. Keys are artifact_names(); values are bytes.
std::map<std::string, std::string> render_artifacts(const Snapshot &snapshot);

/// Write artifacts plus manifest.json into `dir` (created if needed) and set
/// snapshot.content_hash.
void write_snapshot(Snapshot &snapshot, const std::filesystem::path &dir);

/// Load a snapshot directory written by write_snapshot, verifying hashes.
Snapshot load_snapshot(const std::filesystem::path &dir);

/// Combined hash over a set of artifact hashes.
std::string combine_hashes(const std::map<std::string, std::string> &artifact_hashes);

/// ISO-8601 UTC timestamp; honours SOURCE_DATE_EPOCH when set.
std::string build_timestamp();

}  // namespace lbdx::pipeline
