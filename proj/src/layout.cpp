#include "lbdx/layout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "lbdx/errors.hpp"

namespace lbdx::layout {

namespace {

constexpr double kInitialTemperature = 0.1;
constexpr double kMinDistance = 1e-9;
constexpr double kJitter = 1e-6;

// Uniform double in [0,1) from the top 53 bits; std::uniform_real_distribution
// is implementation-defined and would break cross-platform determinism.
double unit_double(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stable direction for a coincident pair so the layout stays deterministic.
void jitter_direction(std::size_t i, std::size_t j, double &dx, double &dy) {
    const double angle = static_cast<double>((i * 7919 + j * 104729) % 360) * (M_PI / 180.0);
    dx = kJitter * std::cos(angle);
    dy = kJitter * std::sin(angle);
}

}  // namespace

void normalize_to_unit_square(std::vector<Point> &points) {
    if (points.empty()) return;
    double min_x = points[0].x, max_x = points[0].x;
    double min_y = points[0].y, max_y = points[0].y;
    for (const auto &p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double extent = std::max(max_x - min_x, max_y - min_y);
    const double cx = 0.5 * (min_x + max_x);
    const double cy = 0.5 * (min_y + max_y);
    for (auto &p : points) {
        if (extent <= 0.0 || !std::isfinite(extent)) {
            p = {0.5, 0.5};
            continue;
        }
        p.x = std::clamp(0.5 + (p.x - cx) / extent, 0.0, 1.0);
        p.y = std::clamp(0.5 + (p.y - cy) / extent, 0.0, 1.0);
    }
}

std::vector<Point> force_directed(std::size_t n, std::span<const GraphEdge> edges, std::uint64_t seed, int iterations) {
    if (iterations < 1) throw InvalidArgument("layout needs at least one iteration");
    for (const auto &e : edges) {
        if (e.u >= n || e.v >= n) throw InvalidArgument("layout edge references a missing node");
    }
    std::vector<Point> pos(n);
    if (n <= 1) {
        normalize_to_unit_square(pos);
        return pos;
    }

    std::mt19937_64 rng(seed);
    for (auto &p : pos) {
        p.x = unit_double(rng);
        p.y = unit_double(rng);
    }

    const double ideal = 1.0 / std::sqrt(static_cast<double>(n));
    double mean_weight = 0.0;
    for (const auto &e : edges) mean_weight += e.weight;
    if (!edges.empty()) mean_weight /= static_cast<double>(edges.size());

    // Spring stretch per edge; attraction d^2 / (ideal * s^3) balances the
    // pairwise repulsion ideal^2 / d at d = ideal * s.
    std::vector<double> stiffness(edges.size(), 1.0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        double s = mean_weight > 0.0 ? edges[i].weight / mean_weight : 1.0;
        s = std::clamp(s, 0.25, 4.0);
        stiffness[i] = ideal * s * s * s;
    }

    std::vector<Point> disp(n);
    for (int iter = 0; iter < iterations; ++iter) {
        std::fill(disp.begin(), disp.end(), Point{0.0, 0.0});

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = pos[i].x - pos[j].x;
                double dy = pos[i].y - pos[j].y;
                double d = std::hypot(dx, dy);
                if (d < kMinDistance) {
                    jitter_direction(i, j, dx, dy);
                    d = std::hypot(dx, dy);
                }
                const double force = ideal * ideal / d;
                disp[i].x += dx / d * force;
                disp[i].y += dy / d * force;
                disp[j].x -= dx / d * force;
                disp[j].y -= dy / d * force;
            }
        }

        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto &e = edges[k];
            if (e.u == e.v) continue;
            double dx = pos[e.u].x - pos[e.v].x;
            double dy = pos[e.u].y - pos[e.v].y;
            double d = std::hypot(dx, dy);
            if (d < kMinDistance) continue;
            const double force = d * d / stiffness[k];
            disp[e.u].x -= dx / d * force;
            disp[e.u].y -= dy / d * force;
            disp[e.v].x += dx / d * force;
            disp[e.v].y += dy / d * force;
        }

        const double temperature =
            kInitialTemperature * (1.0 - static_cast<double>(iter) / static_cast<double>(iterations));
        for (std::size_t i = 0; i < n; ++i) {
            const double len = std::hypot(disp[i].x, disp[i].y);
            if (len < kMinDistance || !std::isfinite(len)) continue;
            const double step = std::min(len, temperature);
            pos[i].x += disp[i].x / len * step;
            pos[i].y += disp[i].y / len * step;
        }
    }

    normalize_to_unit_square(pos);
    return pos;
}

namespace {

LayoutResult run_layout(const discovery::EntryPoint &ep, std::span<const GraphEdge> edges,
                        const std::vector<std::string> &nodes, std::uint64_t seed, int iterations) {
    const auto points = force_directed(nodes.size(), edges, seed, iterations);
    LayoutResult out;
    out.entry_point = ep.id;
    out.iterations_run = iterations;
    out.seed = seed;
    for (std::size_t i = 0; i < nodes.size(); ++i) out.positions.emplace(nodes[i], points[i]);
    return out;
}

}  // namespace

LayoutResult layout_entry_point(const discovery::EntryPoint &ep, std::uint64_t seed, int iterations) {
    const std::vector<std::string> nodes(ep.member_tokens.begin(), ep.member_tokens.end());
    auto index = [&](const std::string &t) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
        if (it == nodes.end() || *it != t) throw InvalidArgument("MST edge endpoint '" + t + "' is not a member");
        return static_cast<std::size_t>(it - nodes.begin());
    };
    std::vector<GraphEdge> edges;
    for (const auto &e : ep.mst_edges) edges.push_back({index(e.u), index(e.v), e.distance});
    return run_layout(ep, edges, nodes, seed, iterations);
}

LayoutResult layout_entry_point_complete(const discovery::EntryPoint &ep, const embedding::EmbeddingSpace &space,
                                         std::uint64_t seed, int iterations) {
    const std::vector<std::string> nodes(ep.member_tokens.begin(), ep.member_tokens.end());
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            edges.push_back({i, j, space.cosine_distance(nodes[i], nodes[j])});
        }
    }
    return run_layout(ep, edges, nodes, seed, iterations);
}

nlohmann::json layout_to_json(const LayoutResult &layout) {
    nlohmann::json positions = nlohmann::json::object();
    for (const auto &[token, p] : layout.positions) positions[token] = {p.x, p.y};
    return {{"entry_point", layout.entry_point},
            {"seed", layout.seed},
            {"iterations", layout.iterations_run},
            {"positions", positions}};
}

LayoutResult layout_from_json(const nlohmann::json &j) {
    LayoutResult out;
    out.entry_point = j.at("entry_point").get<int>();
    out.seed = j.at("seed").get<std::uint64_t>();
    out.iterations_run = j.at("iterations").get<int>();
    for (const auto &[token, xy] : j.at("positions").items()) {
        out.positions[token] = {xy.at(0).get<double>(), xy.at(1).get<double>()};
    }
    return out;
}

}  // namespace lbdx::layout
