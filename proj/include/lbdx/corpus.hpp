#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lbdx::corpus {

/// Which literature a document belongs to: S is the source collection the
/// user wants to explore, T the target collection the user already knows.
enum class Collection { S, T };

std::string_view to_string(Collection c);
std::optional<Collection> parse_collection(std::string_view text);

/// Swanson class of a token: a = T only, b = both, c = S only.
enum class ConceptClass { A, B, C };

std::string_view to_string(ConceptClass c);

struct Document {
    std::string id;
    std::string title;
    std::vector<std::string> authors;
    int year = 0;
    std::string venue;
    Collection collection = Collection::S;
    std::vector<std::string> raw_keywords;

    /// Sorted, unique stemmed tokens. Filled by `preprocess`.
    std::vector<std::string> tokens;
    /// stem -> normalized (unstemmed) spellings seen in this document.
    std::map<std::string, std::set<std::string>> surface_forms;

    /// "path:line" of the record this document was read from.
    std::string origin;

    bool has_token(std::string_view token) const;
};

/// Parse a JSONL file into documents tagged with `collection`. Blank lines
/// are skipped. Throws SchemaError on a malformed record and InvalidArgument
/// on a duplicate id inside the file.
std::vector<Document> load_corpus(const std::filesystem::path &path, Collection collection);

/// Same as load_corpus but reads from an in-memory stream; `source` names
/// the stream in error messages.
std::vector<Document> parse_corpus(std::istream &in, Collection collection, const std::string &source);

/// Throws InvalidArgument naming both records if any id repeats.
void check_unique_ids(std::span<const Document> docs);

/// Keyword normalization tables. The defaults are compiled into the binary
/// from data/stopwords_en.txt and data/british_american.tsv.
class Normalizer {
public:
    Normalizer();
    Normalizer(std::unordered_set<std::string> stop_words,
               std::unordered_map<std::string, std::string> british_to_american);

    static Normalizer from_files(const std::filesystem::path &stop_words,
                                 const std::filesystem::path &spelling_map);

    /// Lowercase, split on whitespace and punctuation, Americanize, drop stop
    /// words. Order is preserved and repeated tokens are kept.
    std::vector<std::string> normalize_keywords(std::span<const std::string> raw_keywords) const;

    bool is_stop_word(std::string_view token) const;
    std::string americanize(const std::string &token) const;

    std::size_t stop_word_count() const noexcept { return stop_words_.size(); }
    std::size_t spelling_entry_count() const noexcept { return spelling_.size(); }

private:
    std::unordered_set<std::string> stop_words_;
    std::unordered_map<std::string, std::string> spelling_;
};

/// Split a phrase into lowercase tokens. ASCII letters and digits form
/// tokens; bytes >= 0x80 are treated as letters so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view phrase);

/// Porter stem of a lowercase, non-empty token.
std::string stem(std::string_view token);

/// Fill `doc.tokens` and `doc.surface_forms` from `doc.raw_keywords`.
void preprocess(Document &doc, const Normalizer &normalizer);

struct TokenStats {
    std::string stem;
    /// Unstemmed spelling -> number of documents using that spelling.
    std::map<std::string, int> surface_forms;
    /// Number of documents containing the token.
    int total_count = 0;
    int t_count = 0;
    int s_count = 0;
    double idf = 0.0;

    /// argmax over surface_forms; ties go to the lexicographically smallest.
    const std::string &most_common_form() const;
};

struct Vocabulary {
    std::map<std::string, TokenStats> entries;
    std::set<std::string> v_a;
    std::set<std::string> v_b;
    std::set<std::string> v_c;
    int doc_count = 0;
    /// Tokens removed by the IDF filter, with their idf.
    std::map<std::string, double> discarded;

    bool contains(std::string_view token) const;
    ConceptClass concept_class(std::string_view token) const;
    const TokenStats &stats(std::string_view token) const;
    /// Most common surface form, or the token itself if unknown.
    std::string surface(std::string_view token) const;
};

/// idf(t) = ln(|D| / df(t)). Tokens with idf < idf_threshold are removed from
/// `docs` and excluded from the vocabulary; the rest are partitioned into
/// a/b/c by collection occurrence.
Vocabulary build_vocabulary(std::span<Document> docs, double idf_threshold);

nlohmann::json vocabulary_to_json(const Vocabulary &vocab);
Vocabulary vocabulary_from_json(const nlohmann::json &j);

nlohmann::json document_to_json(const Document &doc);
Document document_from_json(const nlohmann::json &j);

}  // namespace lbdx::corpus
