#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lbdx/corpus.hpp"
#include "lbdx/discovery.hpp"

namespace lbdx::explore {

using corpus::Collection;
using corpus::Document;
using discovery::TokenSet;

struct Selection {
    TokenSet tokens;
    std::optional<int> origin;  ///< entry point the selection came from

    static Selection from_entry_point(const discovery::EntryPoint &ep) { return {ep.member_tokens, ep.id}; }
};

struct RankedDocument {
    const Document *document = nullptr;
    int match_count = 0;
    TokenSet matched_tokens;
};

/// Documents sharing at least one token with the selection, ordered by match
/// count (desc), year (desc), then id (asc). An optional collection filter
/// restricts the candidates.
std::vector<RankedDocument> rank_documents(const Selection &selection, std::span<const Document> docs,
                                           std::optional<Collection> collection = std::nullopt);

enum class FrequencyScope {
    AllTokens,       ///< every token of the matched documents
    SelectionOnly,   ///< only tokens in the selection
};

/// Document frequency of tokens across the documents matched by the
/// selection, ordered by count (desc) then token (asc).
std::vector<std::pair<std::string, int>> token_frequencies(const Selection &selection, std::span<const Document> docs,
                                                           FrequencyScope scope = FrequencyScope::AllTokens);

/// Immutable id-indexed view over a document collection.
class DocumentStore {
public:
    DocumentStore() = default;
    explicit DocumentStore(std::vector<Document> docs);

    std::span<const Document> documents() const noexcept { return docs_; }
    const Document *find(std::string_view id) const;
    std::size_t count(Collection c) const;

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct DocumentDetail {
    const Document *document = nullptr;
    /// (stem, most common surface form) for each token of the document.
    std::vector<std::pair<std::string, std::string>> token_labels;
    std::optional<int> match_count;
    TokenSet matched_tokens;
};

/// Full metadata for `id`; when a selection is supplied the match count
/// against it is included. Throws NotFound for an unknown id.
DocumentDetail document_detail(const DocumentStore &store, const corpus::Vocabulary &vocab, std::string_view id,
                               const Selection *selection = nullptr);

}  // namespace lbdx::explore
