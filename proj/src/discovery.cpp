#include "lbdx/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <nlohmann/json.hpp>

#include "lbdx/errors.hpp"

namespace lbdx::discovery {

using embedding::EmbeddingSpace;
using nlohmann::json;

namespace {

constexpr double kZeroNorm = 1e-12;

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<int> rank_;
};

// Row-normalized copy of the vectors for `tokens`, in the given order.
embedding::RowMatrix unit_rows(const EmbeddingSpace &space, const std::vector<std::size_t> &rows) {
    embedding::RowMatrix out(static_cast<Eigen::Index>(rows.size()), space.k());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double n = space.norm(rows[i]);
        if (n <= kZeroNorm) {
            throw InvalidArgument("token '" + space.tokens()[rows[i]] + "' has a zero-norm embedding");
        }
        out.row(static_cast<Eigen::Index>(i)) = space.vector(rows[i]) / n;
    }
    return out;
}

std::vector<std::size_t> rows_of(const EmbeddingSpace &space, const TokenSet &tokens) {
    std::vector<std::size_t> rows;
    rows.reserve(tokens.size());
    for (const auto &t : tokens) rows.push_back(space.require_index(t));
    return rows;
}

double distance_of(double similarity) {
    return 1.0 - std::clamp(similarity, -1.0, 1.0);
}

}  // namespace

void DiscoveryConfig::validate() const {
    if (knn < 1) throw InvalidArgument("knn must be >= 1");
    if (!(redundancy_eps >= 0.0 && redundancy_eps < 2.0)) {
        throw InvalidArgument("redundancy_eps must lie in [0, 2)");
    }
    if (!(quality_quantile > 0.0 && quality_quantile < 1.0)) {
        throw InvalidArgument("quality_quantile must lie in (0, 1)");
    }
}

TokenSet Neighborhood::tokens() const {
    TokenSet out{anchor};
    for (const auto &n : neighbors) out.insert(n.token);
    return out;
}

TokenSet prune_redundant(const EmbeddingSpace &space, const TokenSet &tokens, double eps) {
    if (eps < 0.0) throw InvalidArgument("redundancy eps must be >= 0");
    const std::vector<std::string> ordered(tokens.begin(), tokens.end());
    const auto unit = unit_rows(space, rows_of(space, tokens));

    std::vector<Eigen::Index> kept;
    TokenSet retained;
    for (Eigen::Index i = 0; i < unit.rows(); ++i) {
        bool redundant = false;
        for (Eigen::Index j : kept) {
            if (distance_of(unit.row(i).dot(unit.row(j))) <= eps) {
                redundant = true;
                break;
            }
        }
        if (!redundant) {
            kept.push_back(i);
            retained.insert(ordered[static_cast<std::size_t>(i)]);
        }
    }
    return retained;
}

std::vector<Neighborhood> extract_neighborhoods(const EmbeddingSpace &space, const corpus::Vocabulary &vocab,
                                                const TokenSet &anchors, const TokenSet &candidates, int knn) {
    if (knn < 1) throw InvalidArgument("knn must be >= 1");
    const std::vector<std::string> pool(candidates.begin(), candidates.end());
    const auto pool_unit = unit_rows(space, rows_of(space, candidates));

    std::vector<Neighborhood> out;
    out.reserve(anchors.size());
    std::vector<std::pair<double, std::size_t>> scored;
    for (const auto &anchor : anchors) {
        const std::size_t row = space.require_index(anchor);
        const double n = space.norm(row);
        if (n <= kZeroNorm) throw InvalidArgument("token '" + anchor + "' has a zero-norm embedding");
        const Eigen::RowVectorXd a = space.vector(row) / n;

        scored.clear();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool[i] == anchor) continue;
            scored.emplace_back(distance_of(pool_unit.row(static_cast<Eigen::Index>(i)).dot(a)), i);
        }
        if (scored.size() < static_cast<std::size_t>(knn)) {
            throw InvalidArgument("vocabulary has " + std::to_string(scored.size()) +
                                  " candidate neighbors, fewer than knn = " + std::to_string(knn));
        }
        // Pool is sorted, so index order is token order.
        std::partial_sort(scored.begin(), scored.begin() + knn, scored.end());

        Neighborhood hood;
        hood.anchor = anchor;
        for (int r = 0; r < knn; ++r) {
            const auto &[dist, idx] = scored[static_cast<std::size_t>(r)];
            const ConceptClass cls = vocab.concept_class(pool[idx]);
            hood.neighbors.push_back({pool[idx], dist, cls});
            if (cls == ConceptClass::C && !hood.nearest_c_distance) hood.nearest_c_distance = dist;
        }
        out.push_back(std::move(hood));
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile of an empty set");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

QualityResult quality_filter(std::span<const Neighborhood> neighborhoods, double q, QualityPopulation population) {
    QualityResult result;
    std::vector<double> values;
    for (const auto &hood : neighborhoods) {
        if (hood.nearest_c_distance) {
            ++result.with_c_concept;
            if (population == QualityPopulation::NearestC) values.push_back(*hood.nearest_c_distance);
        }
        if (population == QualityPopulation::NearestAny && !hood.neighbors.empty()) {
            values.push_back(hood.neighbors.front().distance);
        }
    }
    if (result.with_c_concept == 0 || values.empty()) return result;

    const double threshold = quantile(std::move(values), q);
    result.threshold = threshold;
    for (const auto &hood : neighborhoods) {
        if (hood.nearest_c_distance && *hood.nearest_c_distance <= threshold) result.retained.push_back(hood);
    }
    return result;
}

std::vector<TokenSet> merge_token_sets(std::span<const TokenSet> sets) {
    DisjointSets groups(sets.size());
    std::map<std::string, std::size_t> first_owner;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (const auto &t : sets[i]) {
            auto [it, inserted] = first_owner.emplace(t, i);
            if (!inserted) groups.unite(it->second, i);
        }
    }
    std::map<std::size_t, TokenSet> merged;
    for (std::size_t i = 0; i < sets.size(); ++i) merged[groups.find(i)].insert(sets[i].begin(), sets[i].end());

    std::vector<TokenSet> out;
    for (auto &[root, tokens] : merged) {
        if (!tokens.empty()) out.push_back(std::move(tokens));
    }
    std::sort(out.begin(), out.end(), [](const TokenSet &a, const TokenSet &b) { return *a.begin() < *b.begin(); });
    return out;
}

std::vector<EntryPoint> merge_neighborhoods(std::span<const Neighborhood> neighborhoods) {
    std::vector<TokenSet> sets;
    sets.reserve(neighborhoods.size());
    for (const auto &hood : neighborhoods) sets.push_back(hood.tokens());
    const auto merged = merge_token_sets(sets);

    std::vector<EntryPoint> out;
    out.reserve(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        EntryPoint ep;
        ep.id = static_cast<int>(i);
        ep.member_tokens = merged[i];
        for (const auto &hood : neighborhoods) {
            if (ep.member_tokens.contains(hood.anchor)) ep.source_neighborhoods.push_back(hood.anchor);
        }
        std::sort(ep.source_neighborhoods.begin(), ep.source_neighborhoods.end());
        ep.source_neighborhoods.erase(std::unique(ep.source_neighborhoods.begin(), ep.source_neighborhoods.end()),
                                      ep.source_neighborhoods.end());
        out.push_back(std::move(ep));
    }
    return out;
}

std::vector<std::size_t> kruskal(std::size_t n, std::span<const WeightedEdge> edges) {
    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &ea = edges[a];
        const auto &eb = edges[b];
        return std::tie(ea.weight, ea.u, ea.v) < std::tie(eb.weight, eb.u, eb.v);
    });
    DisjointSets forest(n);
    std::vector<std::size_t> chosen;
    for (std::size_t idx : order) {
        if (chosen.size() + 1 >= n) break;
        if (forest.unite(edges[idx].u, edges[idx].v)) chosen.push_back(idx);
    }
    return chosen;
}

std::vector<MstEdge> build_mst(const EmbeddingSpace &space, const TokenSet &members) {
    if (members.empty()) throw InvalidArgument("MST over an empty member set");
    const std::vector<std::string> nodes(members.begin(), members.end());
    const auto unit = unit_rows(space, rows_of(space, members));

    std::vector<WeightedEdge> edges;
    edges.reserve(nodes.size() * (nodes.size() - 1) / 2);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const double sim = unit.row(static_cast<Eigen::Index>(i)).dot(unit.row(static_cast<Eigen::Index>(j)));
            edges.push_back({i, j, distance_of(sim)});
        }
    }
    std::vector<MstEdge> out;
    for (std::size_t idx : kruskal(nodes.size(), edges)) {
        out.push_back({nodes[edges[idx].u], nodes[edges[idx].v], edges[idx].weight});
    }
    return out;
}

std::map<std::string, ConceptClass> classify_members(const corpus::Vocabulary &vocab, const TokenSet &members) {
    std::map<std::string, ConceptClass> out;
    for (const auto &t : members) out.emplace(t, vocab.concept_class(t));
    return out;
}

DiscoveryResult discover(const EmbeddingSpace &space, const corpus::Vocabulary &vocab, const DiscoveryConfig &config) {
    config.validate();
    DiscoveryResult result;

    TokenSet usable;
    for (const auto &[token, stats] : vocab.entries) {
        auto row = space.index_of(token);
        if (!row || space.norm(*row) <= kZeroNorm) {
            result.zero_vectors.insert(token);
        } else {
            usable.insert(token);
        }
    }
    TokenSet usable_a;
    std::set_intersection(usable.begin(), usable.end(), vocab.v_a.begin(), vocab.v_a.end(),
                          std::inserter(usable_a, usable_a.end()));

    if (config.redundancy_scope == RedundancyScope::AConcepts) {
        result.anchors = prune_redundant(space, usable_a, config.redundancy_eps);
        std::set_difference(usable_a.begin(), usable_a.end(), result.anchors.begin(), result.anchors.end(),
                            std::inserter(result.redundant, result.redundant.end()));
        std::set_difference(usable.begin(), usable.end(), result.redundant.begin(), result.redundant.end(),
                            std::inserter(result.candidates, result.candidates.end()));
    } else {
        result.candidates = prune_redundant(space, usable, config.redundancy_eps);
        std::set_difference(usable.begin(), usable.end(), result.candidates.begin(), result.candidates.end(),
                            std::inserter(result.redundant, result.redundant.end()));
        std::set_intersection(result.candidates.begin(), result.candidates.end(), vocab.v_a.begin(), vocab.v_a.end(),
                              std::inserter(result.anchors, result.anchors.end()));
    }

    if (result.anchors.empty()) return result;
    result.neighborhoods = extract_neighborhoods(space, vocab, result.anchors, result.candidates, config.knn);
    result.quality = quality_filter(result.neighborhoods, config.quality_quantile, config.quality_population);
    result.entry_points = merge_neighborhoods(result.quality.retained);
    for (auto &ep : result.entry_points) {
        ep.mst_edges = build_mst(space, ep.member_tokens);
        ep.classes = classify_members(vocab, ep.member_tokens);
    }
    return result;
}

json entry_point_to_json(const EntryPoint &ep, const corpus::Vocabulary &vocab) {
    json members = json::array();
    for (const auto &t : ep.member_tokens) {
        const auto &stats = vocab.stats(t);
        members.push_back({{"token", t},
                           {"surface", stats.most_common_form()},
                           {"class", corpus::to_string(vocab.concept_class(t))},
                           {"frequency", stats.total_count}});
    }
    json mst = json::array();
    for (const auto &e : ep.mst_edges) mst.push_back({{"u", e.u}, {"v", e.v}, {"distance", e.distance}});
    return {{"id", ep.id}, {"members", members}, {"mst", mst}, {"anchors", ep.source_neighborhoods}};
}

EntryPoint entry_point_from_json(const json &j) {
    EntryPoint ep;
    ep.id = j.at("id").get<int>();
    for (const auto &m : j.at("members")) {
        const auto token = m.at("token").get<std::string>();
        const auto cls = m.at("class").get<std::string>();
        ep.member_tokens.insert(token);
        ep.classes[token] = cls == "a" ? ConceptClass::A : cls == "b" ? ConceptClass::B : ConceptClass::C;
    }
    for (const auto &e : j.at("mst")) {
        ep.mst_edges.push_back({e.at("u").get<std::string>(), e.at("v").get<std::string>(), e.at("distance").get<double>()});
    }
    ep.source_neighborhoods = j.at("anchors").get<std::vector<std::string>>();
    return ep;
}

}  // namespace lbdx::discovery
