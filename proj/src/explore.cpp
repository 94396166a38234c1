#include "lbdx/explore.hpp"

#include <algorithm>
#include <map>

#include "lbdx/errors.hpp"

namespace lbdx::explore {

namespace {

TokenSet matches(const Selection &selection, const Document &doc) {
    TokenSet out;
    std::set_intersection(selection.tokens.begin(), selection.tokens.end(), doc.tokens.begin(), doc.tokens.end(),
                          std::inserter(out, out.end()));
    return out;
}

}  // namespace

std::vector<RankedDocument> rank_documents(const Selection &selection, std::span<const Document> docs,
                                           std::optional<Collection> collection) {
    std::vector<RankedDocument> out;
    for (const auto &doc : docs) {
        if (collection && doc.collection != *collection) continue;
        TokenSet matched = matches(selection, doc);
        if (matched.empty()) continue;
        const int count = static_cast<int>(matched.size());
        out.push_back({&doc, count, std::move(matched)});
    }
    std::sort(out.begin(), out.end(), [](const RankedDocument &a, const RankedDocument &b) {
        if (a.match_count != b.match_count) return a.match_count > b.match_count;
        if (a.document->year != b.document->year) return a.document->year > b.document->year;
        return a.document->id < b.document->id;
    });
    return out;
}

std::vector<std::pair<std::string, int>> token_frequencies(const Selection &selection, std::span<const Document> docs,
                                                           FrequencyScope scope) {
    std::map<std::string, int> counts;
    for (const auto &ranked : rank_documents(selection, docs)) {
        const auto &tokens = scope == FrequencyScope::AllTokens ? TokenSet(ranked.document->tokens.begin(),
                                                                           ranked.document->tokens.end())
                                                                : ranked.matched_tokens;
        for (const auto &t : tokens) ++counts[t];
    }
    std::vector<std::pair<std::string, int>> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.second > b.second; });
    return out;
}

DocumentStore::DocumentStore(std::vector<Document> docs) : docs_(std::move(docs)) {
    corpus::check_unique_ids(docs_);
    index_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) index_.emplace(docs_[i].id, i);
}

const Document *DocumentStore::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &docs_[it->second];
}

std::size_t DocumentStore::count(Collection c) const {
    return static_cast<std::size_t>(
        std::count_if(docs_.begin(), docs_.end(), [c](const Document &d) { return d.collection == c; }));
}

DocumentDetail document_detail(const DocumentStore &store, const corpus::Vocabulary &vocab, std::string_view id,
                               const Selection *selection) {
    const Document *doc = store.find(id);
    if (doc == nullptr) throw NotFound("document '" + std::string(id) + "' not found");

    DocumentDetail detail;
    detail.document = doc;
    for (const auto &t : doc->tokens) detail.token_labels.emplace_back(t, vocab.surface(t));
    if (selection != nullptr) {
        detail.matched_tokens = matches(*selection, *doc);
        detail.match_count = static_cast<int>(detail.matched_tokens.size());
    }
    return detail;
}

}  // namespace lbdx::explore
