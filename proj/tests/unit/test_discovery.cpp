#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "lbdx/discovery.hpp"
#include "lbdx/errors.hpp"
#include "lbdx/pipeline.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lbdx;
using namespace lbdx::discovery;
using corpus::ConceptClass;
using embedding::EmbeddingSpace;
using embedding::RowMatrix;

namespace {

corpus::Vocabulary make_vocab(const std::map<std::string, ConceptClass> &classes) {
    corpus::Vocabulary v;
    v.doc_count = 10;
    for (const auto &[t, c] : classes) {
        corpus::TokenStats s;
        s.stem = t;
        s.surface_forms[t] = 1;
        s.total_count = 1;
        v.entries.emplace(t, s);
        (c == ConceptClass::A ? v.v_a : c == ConceptClass::B ? v.v_b : v.v_c).insert(t);
    }
    return v;
}

EmbeddingSpace make_space(const std::vector<std::string> &tokens, const RowMatrix &vectors) {
    return EmbeddingSpace(tokens, vectors, Eigen::VectorXd::Ones(vectors.cols()), 0.95, 0.0, 0);
}

// Unit vectors whose pairwise cosine similarities are the given Gram matrix.
RowMatrix vectors_from_gram(const Eigen::MatrixXd &gram) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    return llt.matrixL();
}

EmbeddingSpace random_space(std::mt19937_64 &rng, int n, int k, std::vector<std::string> &tokens) {
    std::normal_distribution<double> g;
    RowMatrix v(n, k);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
    tokens.clear();
    for (int i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(i));
    std::sort(tokens.begin(), tokens.end());
    return make_space(tokens, v);
}

Neighborhood hood(std::string anchor, std::vector<std::pair<std::string, ConceptClass>> neighbors,
                  std::optional<double> nearest_c) {
    Neighborhood h;
    h.anchor = std::move(anchor);
    double d = 0.05;
    for (auto &[t, c] : neighbors) {
        h.neighbors.push_back({t, d, c});
        d += 0.05;
    }
    h.nearest_c_distance = nearest_c;
    return h;
}

std::vector<std::pair<std::string, std::string>> edge_pairs(const std::vector<MstEdge> &edges) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &e : edges) out.emplace_back(e.u, e.v);
    return out;
}

}  // namespace

TEST(DiscoveryConfig, Validate) {
    DiscoveryConfig c;
    EXPECT_EQ(c.knn, 4);
    EXPECT_DOUBLE_EQ(c.redundancy_eps, 0.01);
    EXPECT_DOUBLE_EQ(c.quality_quantile, 0.25);
    EXPECT_NO_THROW(c.validate());
    c.knn = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.redundancy_eps = 2.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.quality_quantile = 1.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.quality_quantile = 0.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(PruneRedundant, IdenticalVectorsKeepFirst) {
    RowMatrix v(3, 2);
    v << 1, 0, 2, 0, 0, 1;  // "b" is a positive multiple of "a"
    auto space = make_space({"a", "b", "c"}, v);
    EXPECT_EQ(prune_redundant(space, {"a", "b", "c"}, 0.01), (TokenSet{"a", "c"}));
    EXPECT_EQ(prune_redundant(space, {"b", "c"}, 0.01), (TokenSet{"b", "c"}));
}

TEST(PruneRedundant, ZeroEpsKeepsDistinct) {
    std::mt19937_64 rng(1);
    std::vector<std::string> tokens;
    auto space = random_space(rng, 15, 4, tokens);
    const TokenSet all(tokens.begin(), tokens.end());
    EXPECT_EQ(prune_redundant(space, all, 0.0), all);
    EXPECT_THROW(prune_redundant(space, all, -0.1), InvalidArgument);
}

TEST(PruneRedundant, RetainedSetIsSpreadOut) {
    std::mt19937_64 rng(2);
    std::vector<std::string> tokens;
    auto space = random_space(rng, 40, 3, tokens);
    const TokenSet all(tokens.begin(), tokens.end());
    const double eps = 0.3;
    const auto kept = prune_redundant(space, all, eps);
    for (const auto &a : kept)
        for (const auto &b : kept) {
            if (a < b) {
                EXPECT_GT(space.cosine_distance(a, b), eps);
            }
        }
    // Every dropped token is within eps of a retained one that sorts earlier.
    for (const auto &t : all) {
        if (kept.contains(t)) continue;
        bool covered = false;
        for (const auto &k : kept) covered |= (k < t && space.cosine_distance(k, t) <= eps);
        EXPECT_TRUE(covered) << t;
    }
}

TEST(Neighborhoods, MatchesBruteForce) {
    RowMatrix v(3, 2);
    v << 1, 0, 0.8, 0.6, 0, 1;
    auto space = make_space({"a", "b", "c"}, v);
    auto vocab = make_vocab({{"a", ConceptClass::A}, {"b", ConceptClass::B}, {"c", ConceptClass::C}});
    auto hoods = extract_neighborhoods(space, vocab, {"a"}, {"a", "b", "c"}, 2);
    ASSERT_EQ(hoods.size(), 1u);
    const auto &h = hoods[0];
    EXPECT_EQ(h.anchor, "a");
    ASSERT_EQ(h.neighbors.size(), 2u);
    EXPECT_EQ(h.neighbors[0].token, "b");
    EXPECT_NEAR(h.neighbors[0].distance, 1.0 - 0.8, 1e-15);
    EXPECT_EQ(h.neighbors[1].token, "c");
    EXPECT_NEAR(h.neighbors[1].distance, 1.0, 1e-15);
    ASSERT_TRUE(h.nearest_c_distance);
    EXPECT_NEAR(*h.nearest_c_distance, 1.0, 1e-15);
    EXPECT_EQ(h.tokens(), (TokenSet{"a", "b", "c"}));
}

TEST(Neighborhoods, TiesBrokenByToken) {
    RowMatrix v(4, 2);
    v << 1, 0, 0, 1, 0, 1, 0, 1;
    auto space = make_space({"a", "x", "m", "c"}, v);
    auto vocab = make_vocab({{"a", ConceptClass::A}, {"x", ConceptClass::B}, {"m", ConceptClass::B},
                             {"c", ConceptClass::C}});
    auto hoods = extract_neighborhoods(space, vocab, {"a"}, {"a", "c", "m", "x"}, 3);
    std::vector<std::string> order;
    for (const auto &n : hoods[0].neighbors) order.push_back(n.token);
    EXPECT_EQ(order, (std::vector<std::string>{"c", "m", "x"}));
}

TEST(Neighborhoods, PropertiesOnRandomSpaces) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::string> tokens;
        auto space = random_space(rng, 25, 5, tokens);
        std::map<std::string, ConceptClass> classes;
        for (std::size_t i = 0; i < tokens.size(); ++i) classes[tokens[i]] = static_cast<ConceptClass>(i % 3);
        auto vocab = make_vocab(classes);
        const TokenSet all(tokens.begin(), tokens.end());
        auto hoods = extract_neighborhoods(space, vocab, vocab.v_a, all, 4);
        ASSERT_EQ(hoods.size(), vocab.v_a.size());
        for (const auto &h : hoods) {
            ASSERT_EQ(h.neighbors.size(), 4u);
            std::vector<double> brute;
            for (const auto &t : tokens)
                if (t != h.anchor) brute.push_back(space.cosine_distance(h.anchor, t));
            std::sort(brute.begin(), brute.end());
            std::optional<double> nearest_c;
            for (std::size_t r = 0; r < 4; ++r) {
                const auto &n = h.neighbors[r];
                EXPECT_NE(n.token, h.anchor);
                EXPECT_NEAR(n.distance, brute[r], 1e-12);
                if (r > 0) {
                    EXPECT_LE(h.neighbors[r - 1].distance, n.distance);
                }
                EXPECT_EQ(n.concept_class, vocab.concept_class(n.token));
                if (n.concept_class == ConceptClass::C && !nearest_c) nearest_c = n.distance;
            }
            EXPECT_EQ(h.nearest_c_distance.has_value(), nearest_c.has_value());
            if (nearest_c) {
                EXPECT_EQ(*h.nearest_c_distance, *nearest_c);
            }
        }
    }
}

TEST(Neighborhoods, TooFewCandidates) {
    RowMatrix v(3, 2);
    v << 1, 0, 0.8, 0.6, 0, 1;
    auto space = make_space({"a", "b", "c"}, v);
    auto vocab = make_vocab({{"a", ConceptClass::A}, {"b", ConceptClass::B}, {"c", ConceptClass::C}});
    EXPECT_THROW(extract_neighborhoods(space, vocab, {"a"}, {"a", "b", "c"}, 3), InvalidArgument);
}

TEST(Quantile, LinearInterpolation) {
    EXPECT_NEAR(quantile({0.1, 0.2, 0.3, 0.4}, 0.25), 0.175, 1e-15);
    EXPECT_NEAR(quantile({0.4, 0.1, 0.3, 0.2}, 0.25), 0.175, 1e-15);
    EXPECT_DOUBLE_EQ(quantile({5.0}, 0.25), 5.0);
    EXPECT_DOUBLE_EQ(quantile({1.0, 3.0}, 0.5), 2.0);
    EXPECT_THROW(quantile({}, 0.5), InvalidArgument);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xs(static_cast<std::size_t>(1 + trial % 17));
        for (auto &x : xs) x = u(rng);
        const double q = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        EXPECT_NEAR(quantile(xs, q), oracle::quantile_linear(xs, q), 1e-15);
    }
}

TEST(QualityFilter, FourDistanceExample) {
    std::vector<Neighborhood> hoods;
    for (double d : {0.1, 0.2, 0.3, 0.4}) {
        hoods.push_back(hood("a" + std::to_string(static_cast<int>(d * 10)), {{"c", ConceptClass::C}}, d));
    }
    auto r = quality_filter(hoods, 0.25);
    ASSERT_TRUE(r.threshold);
    EXPECT_NEAR(*r.threshold, 0.175, 1e-15);
    ASSERT_EQ(r.retained.size(), 1u);
    EXPECT_EQ(r.retained[0].nearest_c_distance, 0.1);
    EXPECT_EQ(r.with_c_concept, 4u);
}

TEST(QualityFilter, NoCConceptAlwaysDropped) {
    std::vector<Neighborhood> hoods = {hood("a1", {{"b", ConceptClass::B}}, std::nullopt),
                                       hood("a2", {{"c", ConceptClass::C}}, 0.9)};
    auto r = quality_filter(hoods, 0.99);
    ASSERT_EQ(r.retained.size(), 1u);
    EXPECT_EQ(r.retained[0].anchor, "a2");
    EXPECT_TRUE(quality_filter({}, 0.25).retained.empty());
    EXPECT_FALSE(quality_filter({}, 0.25).threshold);
    auto none = quality_filter(std::vector<Neighborhood>{hoods[0]}, 0.25);
    EXPECT_TRUE(none.retained.empty());
    EXPECT_FALSE(none.threshold);
}

TEST(QualityFilter, NearestAnyPopulation) {
    std::vector<Neighborhood> hoods = {hood("a1", {{"b", ConceptClass::B}}, std::nullopt),
                                       hood("a2", {{"b", ConceptClass::B}, {"c", ConceptClass::C}}, 0.1)};
    // Population is {0.05, 0.05}; the c-neighbor at 0.1 is above it.
    EXPECT_TRUE(quality_filter(hoods, 0.5, QualityPopulation::NearestAny).retained.empty());
    EXPECT_EQ(quality_filter(hoods, 0.5, QualityPopulation::NearestC).retained.size(), 1u);
}

TEST(QualityFilterProperty, CriteriaAndMonotonicity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Neighborhood> hoods;
        const int n = 1 + trial % 20;
        for (int i = 0; i < n; ++i) {
            std::optional<double> c;
            if (u(rng) < 0.6) c = u(rng);
            hoods.push_back(hood("a" + std::to_string(i), {{c ? "c" : "b", c ? ConceptClass::C : ConceptClass::B}}, c));
        }
        TokenSet previous;
        for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            auto r = quality_filter(hoods, q);
            TokenSet kept;
            for (const auto &h : r.retained) {
                EXPECT_TRUE(h.nearest_c_distance.has_value());
                EXPECT_LE(*h.nearest_c_distance, *r.threshold);
                kept.insert(h.anchor);
            }
            for (const auto &a : previous) EXPECT_TRUE(kept.contains(a)) << "q=" << q;
            previous = kept;
        }
    }
}

TEST(Merge, SharedTokenMerges) {
    std::vector<Neighborhood> hoods = {hood("a", {{"b", ConceptClass::B}, {"x", ConceptClass::C}}, 0.1),
                                       hood("c", {{"b", ConceptClass::B}, {"y", ConceptClass::C}}, 0.1)};
    auto eps = merge_neighborhoods(hoods);
    ASSERT_EQ(eps.size(), 1u);
    EXPECT_EQ(eps[0].member_tokens, (TokenSet{"a", "b", "c", "x", "y"}));
    EXPECT_EQ(eps[0].source_neighborhoods, (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(eps[0].id, 0);
}

TEST(Merge, DisjointStaySeparateAndOrdered) {
    std::vector<Neighborhood> hoods = {hood("q", {{"r", ConceptClass::C}}, 0.1),
                                       hood("b", {{"z", ConceptClass::C}}, 0.1),
                                       hood("m", {{"n", ConceptClass::C}}, 0.1)};
    auto eps = merge_neighborhoods(hoods);
    ASSERT_EQ(eps.size(), 3u);
    EXPECT_EQ(*eps[0].member_tokens.begin(), "b");
    EXPECT_EQ(*eps[1].member_tokens.begin(), "m");
    EXPECT_EQ(*eps[2].member_tokens.begin(), "q");
    for (int i = 0; i < 3; ++i) EXPECT_EQ(eps[static_cast<std::size_t>(i)].id, i);
}

TEST(Merge, TransitiveChain) {
    std::vector<TokenSet> sets = {{"a", "b"}, {"c", "d"}, {"b", "c"}, {"x"}};
    EXPECT_EQ(merge_token_sets(sets), (std::vector<TokenSet>{{"a", "b", "c", "d"}, {"x"}}));
}

TEST(MergeProperty, PartitionAndIdempotence) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> tok(0, 30);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<TokenSet> sets(static_cast<std::size_t>(1 + trial % 12));
        for (auto &s : sets) {
            const int size = 1 + tok(rng) % 5;
            for (int i = 0; i < size; ++i) s.insert("t" + std::to_string(tok(rng)));
        }
        const auto merged = merge_token_sets(sets);
        EXPECT_EQ(merge_token_sets(merged), merged);
        TokenSet all_in;
        TokenSet all_out;
        for (const auto &s : sets) all_in.insert(s.begin(), s.end());
        for (std::size_t i = 0; i < merged.size(); ++i) {
            for (std::size_t j = i + 1; j < merged.size(); ++j) {
                for (const auto &t : merged[i]) EXPECT_FALSE(merged[j].contains(t));
            }
            if (i > 0) {
                EXPECT_LT(*merged[i - 1].begin(), *merged[i].begin());
            }
            all_out.insert(merged[i].begin(), merged[i].end());
        }
        EXPECT_EQ(all_in, all_out);
        for (const auto &s : sets) {
            int owners = 0;
            for (const auto &m : merged) owners += std::includes(m.begin(), m.end(), s.begin(), s.end()) ? 1 : 0;
            EXPECT_EQ(owners, 1);
        }
    }
}

TEST(Mst, HandExamples) {
    Eigen::MatrixXd gram(3, 3);
    gram << 1, 0.9, 0.7, 0.9, 1, 0.8, 0.7, 0.8, 1;  // d(ab)=0.1, d(bc)=0.2, d(ac)=0.3
    auto space = make_space({"a", "b", "c"}, vectors_from_gram(gram));
    auto edges = build_mst(space, {"a", "b", "c"});
    EXPECT_EQ(edge_pairs(edges), (std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "c"}}));
    double total = 0;
    for (const auto &e : edges) total += e.distance;
    EXPECT_NEAR(total, 0.3, 1e-12);

    auto two = build_mst(space, {"a", "c"});
    ASSERT_EQ(two.size(), 1u);
    EXPECT_EQ(two[0].u, "a");
    EXPECT_EQ(two[0].v, "c");
    EXPECT_NEAR(two[0].distance, 0.3, 1e-12);

    EXPECT_TRUE(build_mst(space, {"b"}).empty());
    EXPECT_THROW(build_mst(space, {}), InvalidArgument);
    EXPECT_THROW(build_mst(space, {"a", "zzz"}), NotFound);
}

TEST(Mst, KruskalTieBreakIsDeterministic) {
    // All weights equal: edges are taken in (u, v) order.
    std::vector<WeightedEdge> edges = {{2, 3, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {1, 3, 1.0}};
    auto chosen = kruskal(4, edges);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (auto i : chosen) got.emplace_back(edges[i].u, edges[i].v);
    EXPECT_EQ(got, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {0, 3}}));
}

TEST(MstProperty, ExhaustiveOracle) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + trial % 7;
        std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                w[i][j] = w[j][i] = (trial % 5 == 0) ? std::round(u(rng) * 2) / 2 : u(rng);  // some ties
                edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w[i][j]});
            }
        const auto chosen = kruskal(static_cast<std::size_t>(n), edges);
        double total = 0;
        std::vector<std::pair<int, int>> tree;
        for (auto i : chosen) {
            total += edges[i].weight;
            tree.emplace_back(static_cast<int>(edges[i].u), static_cast<int>(edges[i].v));
        }
        std::set<int> nodes;
        for (int i = 0; i < n; ++i) nodes.insert(i);
        EXPECT_TRUE(oracle::is_spanning_tree(nodes, tree));
        EXPECT_NEAR(total, oracle::exhaustive_mst_weight(n, w), 1e-12);
    }
}

TEST(MstProperty, EqualsPathfinderWithUniqueWeights) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 8;
        std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                w[i][j] = w[j][i] = u(rng);
                edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w[i][j]});
            }
        std::set<std::pair<int, int>> mst;
        for (auto i : kruskal(static_cast<std::size_t>(n), edges)) {
            mst.emplace(static_cast<int>(edges[i].u), static_cast<int>(edges[i].v));
        }
        EXPECT_EQ(mst, oracle::pfnet_inf(n, w));
    }
}

TEST(MstProperty, BuildMstOnEmbeddings) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> tokens;
        const int n = 1 + trial % 7;
        auto space = random_space(rng, n, 3, tokens);
        const TokenSet members(tokens.begin(), tokens.end());
        auto edges = build_mst(space, members);
        std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) w[i][j] = space.cosine_distance(tokens[i], tokens[j]);
        double total = 0;
        for (const auto &e : edges) {
            EXPECT_LT(e.u, e.v);
            EXPECT_NEAR(e.distance, space.cosine_distance(e.u, e.v), 1e-12);
            total += e.distance;
        }
        EXPECT_TRUE(oracle::is_spanning_tree(members, edge_pairs(edges)));
        EXPECT_NEAR(total, oracle::exhaustive_mst_weight(n, w), 1e-9);
        EXPECT_EQ(build_mst(space, members), edges);
    }
}

TEST(Classify, LooksUpPartition) {
    auto vocab = make_vocab({{"t", ConceptClass::A}, {"both", ConceptClass::B}, {"s", ConceptClass::C}});
    auto classes = classify_members(vocab, {"t", "both", "s"});
    EXPECT_EQ(classes.at("t"), ConceptClass::A);
    EXPECT_EQ(classes.at("both"), ConceptClass::B);
    EXPECT_EQ(classes.at("s"), ConceptClass::C);
    EXPECT_THROW(classify_members(vocab, {"nope"}), NotFound);
}

TEST(Discover, ZeroVectorsExcluded) {
    RowMatrix v(5, 2);
    v << 1, 0, 0, 0, 0.9, 0.1, 0.5, 0.5, 0, 1;
    auto space = make_space({"a1", "a2", "b1", "c1", "c2"}, v);
    auto vocab = make_vocab({{"a1", ConceptClass::A}, {"a2", ConceptClass::A}, {"b1", ConceptClass::B},
                             {"c1", ConceptClass::C}, {"c2", ConceptClass::C}});
    DiscoveryConfig cfg;
    cfg.knn = 2;
    cfg.quality_quantile = 0.5;
    auto r = discover(space, vocab, cfg);
    EXPECT_EQ(r.zero_vectors, (TokenSet{"a2"}));
    EXPECT_EQ(r.anchors, (TokenSet{"a1"}));
    EXPECT_FALSE(r.candidates.contains("a2"));
    ASSERT_EQ(r.neighborhoods.size(), 1u);
    EXPECT_EQ(r.neighborhoods[0].neighbors[0].token, "b1");
    EXPECT_EQ(r.neighborhoods[0].neighbors[1].token, "c1");
    ASSERT_EQ(r.entry_points.size(), 1u);
    EXPECT_EQ(r.entry_points[0].member_tokens, (TokenSet{"a1", "b1", "c1"}));
    EXPECT_EQ(r.entry_points[0].mst_edges.size(), 2u);
}

TEST(Discover, RedundancyScopes) {
    RowMatrix v(5, 2);
    v << 1, 0, 1, 0, 1, 0.02, 0.6, 0.8, 0, 1;
    auto space = make_space({"a1", "a2", "b1", "c1", "c2"}, v);
    auto vocab = make_vocab({{"a1", ConceptClass::A}, {"a2", ConceptClass::A}, {"b1", ConceptClass::B},
                             {"c1", ConceptClass::C}, {"c2", ConceptClass::C}});
    DiscoveryConfig cfg;
    cfg.knn = 2;
    auto a_only = discover(space, vocab, cfg);
    EXPECT_EQ(a_only.redundant, (TokenSet{"a2"}));
    EXPECT_TRUE(a_only.candidates.contains("b1"));
    cfg.redundancy_scope = RedundancyScope::All;
    auto all = discover(space, vocab, cfg);
    EXPECT_EQ(all.redundant, (TokenSet{"a2", "b1"}));
    EXPECT_FALSE(all.candidates.contains("b1"));
}

TEST(Discover, InvariantsOnSampleCorpora) {
    pipeline::PipelineConfig cfg;
    cfg.s_corpus = testing_support::samples_dir() / "vis_s.jsonl";
    cfg.t_corpus = testing_support::samples_dir() / "dh_t.jsonl";
    for (double q : {0.25, 0.5, 0.9}) {
        cfg.quality_quantile = q;
        auto snap = pipeline::run_pipeline(cfg);
        auto r = discover(snap.space, snap.vocabulary, cfg.discovery_config());
        ASSERT_FALSE(r.entry_points.empty());
        for (const auto &a : r.anchors) EXPECT_EQ(snap.vocabulary.concept_class(a), ConceptClass::A);
        for (const auto &h : r.quality.retained) EXPECT_TRUE(h.nearest_c_distance.has_value());
        TokenSet seen;
        for (const auto &ep : r.entry_points) {
            EXPECT_TRUE(oracle::is_spanning_tree(ep.member_tokens, edge_pairs(ep.mst_edges)));
            EXPECT_EQ(ep.classes.size(), ep.member_tokens.size());
            for (const auto &[t, c] : ep.classes) EXPECT_EQ(c, snap.vocabulary.concept_class(t));
            for (const auto &t : ep.member_tokens) EXPECT_TRUE(seen.insert(t).second) << "token in two entry points";
        }
    }
}

TEST(EntryPointJson, RoundTrip) {
    auto vocab = make_vocab({{"a", ConceptClass::A}, {"b", ConceptClass::B}, {"c", ConceptClass::C}});
    EntryPoint ep;
    ep.id = 3;
    ep.member_tokens = {"a", "b", "c"};
    ep.classes = classify_members(vocab, ep.member_tokens);
    ep.mst_edges = {{"a", "b", 0.125}, {"b", "c", 0.3}};
    ep.source_neighborhoods = {"a"};
    const auto j = entry_point_to_json(ep, vocab);
    EXPECT_EQ(j.at("members").size(), 3u);
    EXPECT_EQ(j.at("members")[0].at("class"), "a");
    EXPECT_EQ(j.at("members")[0].at("surface"), "a");
    EXPECT_EQ(j.at("members")[0].at("frequency"), 1);
    EXPECT_EQ(j.at("anchors"), nlohmann::json::array({"a"}));
    auto back = entry_point_from_json(j);
    EXPECT_EQ(back.id, 3);
    EXPECT_EQ(back.member_tokens, ep.member_tokens);
    EXPECT_EQ(back.classes, ep.classes);
    EXPECT_EQ(back.mst_edges, ep.mst_edges);
    EXPECT_EQ(back.source_neighborhoods, ep.source_neighborhoods);
}
