#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lbdx/errors.hpp"
#include "lbdx/explore.hpp"
#include "support.hpp"

using namespace lbdx;
using namespace lbdx::explore;
using corpus::Collection;
using testing_support::make_doc;

namespace {

std::vector<std::string> ids(const std::vector<RankedDocument> &ranked) {
    std::vector<std::string> out;
    for (const auto &r : ranked) out.push_back(r.document->id);
    return out;
}

corpus::Vocabulary vocab_for(const std::vector<Document> &docs) {
    auto copy = docs;
    for (auto &d : copy) {
        d.surface_forms.clear();
        for (const auto &t : d.tokens) d.surface_forms[t].insert(t + "s");
    }
    return corpus::build_vocabulary(copy, 0.0);
}

}  // namespace

TEST(RankDocuments, OrdersByMatchesThenYearThenId) {
    std::vector<Document> docs = {
        make_doc("b", Collection::S, {"x"}, 2019),          make_doc("a", Collection::T, {"x", "y"}, 2010),
        make_doc("c", Collection::S, {"z"}, 2020),          make_doc("d", Collection::T, {"x"}, 2019),
        make_doc("e", Collection::S, {"y", "w"}, 2012),
    };
    Selection sel{{"x", "y"}, std::nullopt};
    auto ranked = rank_documents(sel, docs);
    EXPECT_EQ(ids(ranked), (std::vector<std::string>{"a", "b", "d", "e"}));
    EXPECT_EQ(ranked[0].match_count, 2);
    EXPECT_EQ(ranked[0].matched_tokens, (TokenSet{"x", "y"}));
    for (const auto &r : ranked) EXPECT_EQ(r.match_count, static_cast<int>(r.matched_tokens.size()));

    EXPECT_EQ(ids(rank_documents(sel, docs, Collection::T)), (std::vector<std::string>{"a", "d"}));
    EXPECT_EQ(ids(rank_documents(sel, docs, Collection::S)), (std::vector<std::string>{"b", "e"}));
    EXPECT_TRUE(rank_documents(Selection{{"nothing"}, std::nullopt}, docs).empty());
}

TEST(RankDocuments, PermutationInvariant) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        auto bags = oracle::random_bag_corpus(rng, 30, 8);
        std::vector<Document> docs;
        for (std::size_t i = 0; i < bags.size(); ++i) {
            docs.push_back(make_doc("d" + std::to_string(i), i % 3 ? Collection::S : Collection::T,
                                    {bags[i].begin(), bags[i].end()}, 2010 + static_cast<int>(i % 4)));
        }
        Selection sel{{"t0", "t2", "t5"}, std::nullopt};
        const auto expected = ids(rank_documents(sel, docs));
        for (int p = 0; p < 5; ++p) {
            std::shuffle(docs.begin(), docs.end(), rng);
            EXPECT_EQ(ids(rank_documents(sel, docs)), expected);
        }
    }
}

TEST(TokenFrequencies, HandCount) {
    std::vector<Document> docs = {make_doc("1", Collection::S, {"x", "y"}), make_doc("2", Collection::T, {"x"}),
                                  make_doc("3", Collection::T, {"q"})};
    auto f = token_frequencies(Selection{{"x"}, std::nullopt}, docs);
    EXPECT_EQ(f, (std::vector<std::pair<std::string, int>>{{"x", 2}, {"y", 1}}));
    auto sel_only = token_frequencies(Selection{{"x"}, std::nullopt}, docs, FrequencyScope::SelectionOnly);
    EXPECT_EQ(sel_only, (std::vector<std::pair<std::string, int>>{{"x", 2}}));
    EXPECT_TRUE(token_frequencies(Selection{{"zz"}, std::nullopt}, docs).empty());
}

TEST(TokenFrequencies, TiesByToken) {
    std::vector<Document> docs = {make_doc("1", Collection::S, {"m", "b", "z"})};
    auto f = token_frequencies(Selection{{"m"}, std::nullopt}, docs);
    EXPECT_EQ(f, (std::vector<std::pair<std::string, int>>{{"b", 1}, {"m", 1}, {"z", 1}}));
}

TEST(TokenFrequencies, ConservationProperty) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        auto docs = testing_support::to_documents(oracle::random_bag_corpus(rng, 20, 10));
        Selection sel{{"t1", "t3"}, std::nullopt};
        const auto matched = rank_documents(sel, docs).size();
        for (auto scope : {FrequencyScope::AllTokens, FrequencyScope::SelectionOnly}) {
            const auto f = token_frequencies(sel, docs, scope);
            int selection_total = 0;
            for (const auto &[t, c] : f) {
                if (sel.tokens.contains(t)) selection_total += c;
                EXPECT_LE(static_cast<std::size_t>(c), matched);
            }
            EXPECT_GE(static_cast<std::size_t>(selection_total), matched);
            for (std::size_t i = 1; i < f.size(); ++i) {
                EXPECT_TRUE(f[i - 1].second > f[i].second ||
                            (f[i - 1].second == f[i].second && f[i - 1].first < f[i].first));
            }
        }
    }
}

TEST(DocumentStore, FindAndCount) {
    DocumentStore store({make_doc("s1", Collection::S, {"x"}), make_doc("t1", Collection::T, {"y"}),
                         make_doc("t2", Collection::T, {"y"})});
    ASSERT_NE(store.find("t1"), nullptr);
    EXPECT_EQ(store.find("t1")->id, "t1");
    EXPECT_EQ(store.find("missing"), nullptr);
    EXPECT_EQ(store.count(Collection::S), 1u);
    EXPECT_EQ(store.count(Collection::T), 2u);
    EXPECT_EQ(store.documents().size(), 3u);
    EXPECT_THROW(DocumentStore({make_doc("x", Collection::S, {"a"}), make_doc("x", Collection::T, {"b"})}),
                 InvalidArgument);
}

TEST(DocumentDetail, FullRecordAndMatches) {
    std::vector<Document> docs = {make_doc("s1", Collection::S, {"graph", "network"}, 2014),
                                  make_doc("t1", Collection::T, {"poetri"}, 2018)};
    const auto vocab = vocab_for(docs);
    DocumentStore store(docs);

    auto plain = document_detail(store, vocab, "s1");
    EXPECT_EQ(plain.document->title, "Title of s1");
    EXPECT_EQ(plain.document->year, 2014);
    EXPECT_FALSE(plain.match_count);
    ASSERT_EQ(plain.token_labels.size(), 2u);
    EXPECT_EQ(plain.token_labels[0], (std::pair<std::string, std::string>{"graph", "graphs"}));

    Selection sel{{"network", "poetri"}, 0};
    auto with = document_detail(store, vocab, "s1", &sel);
    ASSERT_TRUE(with.match_count);
    EXPECT_EQ(*with.match_count, 1);
    EXPECT_EQ(with.matched_tokens, (TokenSet{"network"}));

    EXPECT_THROW(document_detail(store, vocab, "nope"), NotFound);
}

TEST(Selection, FromEntryPoint) {
    discovery::EntryPoint ep;
    ep.id = 4;
    ep.member_tokens = {"a", "b"};
    auto sel = Selection::from_entry_point(ep);
    EXPECT_EQ(sel.tokens, ep.member_tokens);
    EXPECT_EQ(sel.origin, 4);
}
