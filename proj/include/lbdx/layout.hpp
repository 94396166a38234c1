#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lbdx/discovery.hpp"
#include "lbdx/embedding.hpp"

namespace lbdx::layout {

struct Point {
    double x = 0.5;
    double y = 0.5;
};

struct GraphEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;  ///< cosine distance; longer distance, longer spring
};

constexpr int kDefaultIterations = 300;

/// Fruchterman-Reingold placement on n nodes. Ideal length is 1/sqrt(n);
/// each edge's spring is stretched in proportion to its weight relative to
/// the mean edge weight. Initial positions come from a seeded mt19937_64 and
/// the temperature cools linearly to zero. Output is scaled uniformly into
/// the unit square and centered.
std::vector<Point> force_directed(std::size_t n, std::span<const GraphEdge> edges, std::uint64_t seed, int iterations);

/// Uniformly scale and center points into [0,1]^2; a single point (or all
/// coincident points) lands on (0.5, 0.5).
void normalize_to_unit_square(std::vector<Point> &points);

struct LayoutResult {
    int entry_point = 0;
    std::map<std::string, Point> positions;
    int iterations_run = 0;
    std::uint64_t seed = 0;
};

/// Layout over the entry point's MST edges.
LayoutResult layout_entry_point(const discovery::EntryPoint &ep, std::uint64_t seed,
                                int iterations = kDefaultIterations);

/// Layout with springs on every member pair, weighted by cosine distance.
LayoutResult layout_entry_point_complete(const discovery::EntryPoint &ep, const embedding::EmbeddingSpace &space,
                                         std::uint64_t seed, int iterations = kDefaultIterations);

nlohmann::json layout_to_json(const LayoutResult &layout);
LayoutResult layout_from_json(const nlohmann::json &j);

}  // namespace lbdx::layout
