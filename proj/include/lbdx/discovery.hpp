#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lbdx/corpus.hpp"
#include "lbdx/embedding.hpp"

namespace lbdx::discovery {

using corpus::ConceptClass;
using TokenSet = std::set<std::string>;

struct Neighbor {
    std::string token;
    double distance = 0.0;
    ConceptClass concept_class = ConceptClass::B;
};

/// The knn closest tokens to an a-concept anchor, ascending by cosine distance.
struct Neighborhood {
    std::string anchor;
    std::vector<Neighbor> neighbors;
    /// Smallest distance to a c-concept neighbor, if any.
    std::optional<double> nearest_c_distance;

    TokenSet tokens() const;
};

struct MstEdge {
    std::string u;  ///< u < v lexicographically
    std::string v;
    double distance = 0.0;

    bool operator==(const MstEdge &) const = default;
};

struct EntryPoint {
    int id = 0;
    TokenSet member_tokens;
    std::map<std::string, ConceptClass> classes;
    std::vector<MstEdge> mst_edges;
    /// Anchors of the neighborhoods merged into this entry point, sorted.
    std::vector<std::string> source_neighborhoods;
};

enum class RedundancyScope {
    AConcepts,  ///< prune among a-concepts only
    All,        ///< prune across the whole vocabulary
};

/// Which values the quality threshold is computed over.
enum class QualityPopulation {
    NearestC,    ///< nearest-c distance of each neighborhood that has a c-concept
    NearestAny,  ///< nearest-neighbor distance of every neighborhood
};

struct DiscoveryConfig {
    int knn = 4;
    /// Cosine distance at or below which a token counts as a duplicate.
    double redundancy_eps = 0.01;
    double quality_quantile = 0.25;
    RedundancyScope redundancy_scope = RedundancyScope::AConcepts;
    QualityPopulation quality_population = QualityPopulation::NearestC;

    void validate() const;
};

/// Greedy lexicographic scan: a token is dropped when its cosine distance to
/// an already retained token is <= eps. Returns the retained tokens.
TokenSet prune_redundant(const embedding::EmbeddingSpace &space, const TokenSet &tokens, double eps);

/// For each anchor, the knn nearest tokens among `candidates` (anchor
/// excluded), ties broken by token. Throws InvalidArgument when there are
/// fewer than knn candidates besides the anchor.
std::vector<Neighborhood> extract_neighborhoods(const embedding::EmbeddingSpace &space,
                                                const corpus::Vocabulary &vocab, const TokenSet &anchors,
                                                const TokenSet &candidates, int knn);

/// Linear-interpolation quantile (the "type 7" estimator) of `values`.
double quantile(std::vector<double> values, double q);

struct QualityResult {
    std::vector<Neighborhood> retained;
    /// Threshold Q on nearest-c distance; absent when nothing passed criterion 1.
    std::optional<double> threshold;
    std::size_t with_c_concept = 0;
};

/// Keep neighborhoods with at least one c-concept whose nearest-c distance
/// is within the `q` quantile of those distances.
QualityResult quality_filter(std::span<const Neighborhood> neighborhoods, double q,
                             QualityPopulation population = QualityPopulation::NearestC);

/// Union-find over "shares a token". Entry points are ordered by their
/// smallest member token and numbered from 0. MST edges and classes are left
/// empty; see build_mst and classify_members.
std::vector<EntryPoint> merge_neighborhoods(std::span<const Neighborhood> neighborhoods);

/// Same grouping over arbitrary token sets; returns the merged sets in order.
std::vector<TokenSet> merge_token_sets(std::span<const TokenSet> sets);

/// Kruskal MST of the complete graph on `members` weighted by cosine
/// distance. Ties are broken by (u, v).
std::vector<MstEdge> build_mst(const embedding::EmbeddingSpace &space, const TokenSet &members);

/// Kruskal over an explicit weighted edge list on nodes 0..n-1; returns
/// indices into `edges`. Shared by build_mst and tests.
struct WeightedEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
};
std::vector<std::size_t> kruskal(std::size_t n, std::span<const WeightedEdge> edges);

std::map<std::string, ConceptClass> classify_members(const corpus::Vocabulary &vocab, const TokenSet &members);

struct DiscoveryResult {
    TokenSet anchors;        ///< a-concepts surviving redundancy pruning
    TokenSet candidates;     ///< tokens eligible as neighbors
    TokenSet redundant;      ///< tokens removed as duplicates
    TokenSet zero_vectors;   ///< tokens without a usable embedding
    std::vector<Neighborhood> neighborhoods;
    QualityResult quality;
    std::vector<EntryPoint> entry_points;
};

/// Full extraction: pruning, neighborhoods, quality filter, merge, MST, classes.
DiscoveryResult discover(const embedding::EmbeddingSpace &space, const corpus::Vocabulary &vocab,
                         const DiscoveryConfig &config);

nlohmann::json entry_point_to_json(const EntryPoint &ep, const corpus::Vocabulary &vocab);
EntryPoint entry_point_from_json(const nlohmann::json &j);

}  // namespace lbdx::discovery
