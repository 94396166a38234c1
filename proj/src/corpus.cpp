#include "lbdx/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bundled_data.hpp"
#include "lbdx/errors.hpp"
#include "lbdx/porter_stemmer.hpp"

namespace lbdx::corpus {

using nlohmann::json;

std::string_view to_string(Collection c) {
    return c == Collection::S ? "S" : "T";
}

std::optional<Collection> parse_collection(std::string_view text) {
    if (text == "S" || text == "s") return Collection::S;
    if (text == "T" || text == "t") return Collection::T;
    return std::nullopt;
}

std::string_view to_string(ConceptClass c) {
    switch (c) {
    case ConceptClass::A:
        return "a";
    case ConceptClass::B:
        return "b";
    case ConceptClass::C:
        return "c";
    }
    return "?";
}

bool Document::has_token(std::string_view token) const {
    return std::binary_search(tokens.begin(), tokens.end(), token);
}

// --- loading -------------------------------------------------------------

namespace {

const json &require(const json &record, const char *field, const std::string &source, std::size_t line) {
    auto it = record.find(field);
    if (it == record.end()) {
        throw SchemaError(source, line, field, "missing");
    }
    return *it;
}

std::string require_string(const json &record, const char *field, const std::string &source, std::size_t line) {
    const json &v = require(record, field, source, line);
    if (!v.is_string()) {
        throw SchemaError(source, line, field, "expected string");
    }
    return v.get<std::string>();
}

std::vector<std::string> require_string_list(const json &record, const char *field, const std::string &source,
                                             std::size_t line) {
    const json &v = require(record, field, source, line);
    if (!v.is_array()) {
        throw SchemaError(source, line, field, "expected array of strings");
    }
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto &item : v) {
        if (!item.is_string()) {
            throw SchemaError(source, line, field, "expected array of strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

Document parse_record(const std::string &text, Collection collection, const std::string &source, std::size_t line) {
    json record;
    try {
        record = json::parse(text);
    } catch (const json::parse_error &e) {
        throw SchemaError(source, line, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) {
        throw SchemaError(source, line, "<record>", "expected a JSON object");
    }

    Document doc;
    doc.id = require_string(record, "id", source, line);
    if (doc.id.empty()) {
        throw SchemaError(source, line, "id", "must not be empty");
    }
    doc.title = require_string(record, "title", source, line);
    doc.authors = require_string_list(record, "authors", source, line);
    const json &year = require(record, "year", source, line);
    if (!year.is_number_integer()) {
        throw SchemaError(source, line, "year", "expected integer");
    }
    doc.year = year.get<int>();
    doc.venue = require_string(record, "venue", source, line);
    doc.raw_keywords = require_string_list(record, "keywords", source, line);
    doc.collection = collection;
    doc.origin = source + ":" + std::to_string(line);
    return doc;
}

bool is_blank(const std::string &s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::vector<Document> parse_corpus(std::istream &in, Collection collection, const std::string &source) {
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        docs.push_back(parse_record(line, collection, source, line_no));
    }
    check_unique_ids(docs);
    return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path &path, Collection collection) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open corpus file " + path.string());
    }
    return parse_corpus(in, collection, path.string());
}

void check_unique_ids(std::span<const Document> docs) {
    std::unordered_map<std::string_view, const Document *> seen;
    seen.reserve(docs.size());
    for (const auto &doc : docs) {
        auto [it, inserted] = seen.emplace(doc.id, &doc);
        if (!inserted) {
            throw InvalidArgument("duplicate document id '" + doc.id + "' in records " + it->second->origin + " and " +
                                  doc.origin);
        }
    }
}

// --- normalization -------------------------------------------------------

namespace {

std::unordered_set<std::string> parse_word_list(std::string_view text) {
    std::unordered_set<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

std::unordered_map<std::string, std::string> parse_spelling_map(std::string_view text) {
    std::unordered_map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string british;
        std::string american;
        if (fields >> british >> american) out[british] = american;
    }
    return out;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

Normalizer::Normalizer()
    : Normalizer(parse_word_list(bundled::kStopWords), parse_spelling_map(bundled::kBritishAmerican)) {}

Normalizer::Normalizer(std::unordered_set<std::string> stop_words,
                       std::unordered_map<std::string, std::string> british_to_american)
    : stop_words_(std::move(stop_words)), spelling_(std::move(british_to_american)) {}

Normalizer Normalizer::from_files(const std::filesystem::path &stop_words, const std::filesystem::path &spelling_map) {
    return Normalizer(parse_word_list(read_file(stop_words)), parse_spelling_map(read_file(spelling_map)));
}

std::vector<std::string> tokenize(std::string_view phrase) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : phrase) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

bool Normalizer::is_stop_word(std::string_view token) const {
    return stop_words_.contains(std::string(token));
}

std::string Normalizer::americanize(const std::string &token) const {
    auto it = spelling_.find(token);
    return it == spelling_.end() ? token : it->second;
}

std::vector<std::string> Normalizer::normalize_keywords(std::span<const std::string> raw_keywords) const {
    std::vector<std::string> out;
    for (const auto &phrase : raw_keywords) {
        for (auto &token : tokenize(phrase)) {
            std::string american = americanize(token);
            if (!is_stop_word(american)) out.push_back(std::move(american));
        }
    }
    return out;
}

std::string stem(std::string_view token) {
    return porter_stem(token);
}

void preprocess(Document &doc, const Normalizer &normalizer) {
    doc.tokens.clear();
    doc.surface_forms.clear();
    for (const auto &surface : normalizer.normalize_keywords(doc.raw_keywords)) {
        doc.surface_forms[stem(surface)].insert(surface);
    }
    doc.tokens.reserve(doc.surface_forms.size());
    for (const auto &[token, forms] : doc.surface_forms) doc.tokens.push_back(token);
}

// --- vocabulary ----------------------------------------------------------

const std::string &TokenStats::most_common_form() const {
    if (surface_forms.empty()) return stem;
    auto best = surface_forms.begin();
    for (auto it = surface_forms.begin(); it != surface_forms.end(); ++it) {
        if (it->second > best->second) best = it;  // strict: earlier (smaller) key wins ties
    }
    return best->first;
}

bool Vocabulary::contains(std::string_view token) const {
    return entries.find(std::string(token)) != entries.end();
}

ConceptClass Vocabulary::concept_class(std::string_view token) const {
    const std::string key(token);
    if (v_a.contains(key)) return ConceptClass::A;
    if (v_b.contains(key)) return ConceptClass::B;
    if (v_c.contains(key)) return ConceptClass::C;
    throw NotFound("token '" + key + "' is not in the vocabulary");
}

const TokenStats &Vocabulary::stats(std::string_view token) const {
    auto it = entries.find(std::string(token));
    if (it == entries.end()) throw NotFound("token '" + std::string(token) + "' is not in the vocabulary");
    return it->second;
}

std::string Vocabulary::surface(std::string_view token) const {
    auto it = entries.find(std::string(token));
    return it == entries.end() ? std::string(token) : it->second.most_common_form();
}

Vocabulary build_vocabulary(std::span<Document> docs, double idf_threshold) {
    if (docs.empty()) {
        throw InvalidArgument("cannot build a vocabulary from an empty corpus");
    }

    std::map<std::string, TokenStats> stats;
    for (const auto &doc : docs) {
        for (const auto &[token, forms] : doc.surface_forms) {
            TokenStats &s = stats[token];
            s.stem = token;
            ++s.total_count;
            ++(doc.collection == Collection::T ? s.t_count : s.s_count);
            for (const auto &form : forms) ++s.surface_forms[form];
        }
    }

    Vocabulary vocab;
    vocab.doc_count = static_cast<int>(docs.size());
    const double n_docs = static_cast<double>(docs.size());
    for (auto &[token, s] : stats) {
        s.idf = std::log(n_docs / static_cast<double>(s.total_count));
        if (s.idf < idf_threshold) {
            vocab.discarded.emplace(token, s.idf);
            continue;
        }
        if (s.s_count == 0) {
            vocab.v_a.insert(token);
        } else if (s.t_count == 0) {
            vocab.v_c.insert(token);
        } else {
            vocab.v_b.insert(token);
        }
        vocab.entries.emplace(token, std::move(s));
    }

    if (!vocab.discarded.empty()) {
        for (auto &doc : docs) {
            std::erase_if(doc.tokens, [&](const std::string &t) { return vocab.discarded.contains(t); });
            std::erase_if(doc.surface_forms, [&](const auto &kv) { return vocab.discarded.contains(kv.first); });
        }
    }
    return vocab;
}

// --- serialization -------------------------------------------------------

json vocabulary_to_json(const Vocabulary &vocab) {
    json tokens = json::array();
    for (const auto &[token, s] : vocab.entries) {
        tokens.push_back({{"token", token},
                          {"class", to_string(vocab.concept_class(token))},
                          {"df", s.total_count},
                          {"df_s", s.s_count},
                          {"df_t", s.t_count},
                          {"idf", s.idf},
                          {"surface", s.most_common_form()},
                          {"surface_forms", s.surface_forms}});
    }
    json discarded = json::array();
    for (const auto &[token, idf] : vocab.discarded) discarded.push_back({{"token", token}, {"idf", idf}});
    return {{"doc_count", vocab.doc_count},
            {"sizes", {{"a", vocab.v_a.size()}, {"b", vocab.v_b.size()}, {"c", vocab.v_c.size()}}},
            {"discarded", discarded},
            {"tokens", tokens}};
}

Vocabulary vocabulary_from_json(const json &j) {
    Vocabulary vocab;
    vocab.doc_count = j.at("doc_count").get<int>();
    for (const auto &d : j.at("discarded")) {
        vocab.discarded.emplace(d.at("token").get<std::string>(), d.at("idf").get<double>());
    }
    for (const auto &e : j.at("tokens")) {
        TokenStats s;
        s.stem = e.at("token").get<std::string>();
        s.total_count = e.at("df").get<int>();
        s.s_count = e.at("df_s").get<int>();
        s.t_count = e.at("df_t").get<int>();
        s.idf = e.at("idf").get<double>();
        s.surface_forms = e.at("surface_forms").get<std::map<std::string, int>>();
        const std::string cls = e.at("class").get<std::string>();
        if (cls == "a") {
            vocab.v_a.insert(s.stem);
        } else if (cls == "b") {
            vocab.v_b.insert(s.stem);
        } else if (cls == "c") {
            vocab.v_c.insert(s.stem);
        } else {
            throw InvalidArgument("vocabulary entry '" + s.stem + "' has unknown class '" + cls + "'");
        }
        std::string key = s.stem;
        vocab.entries.emplace(std::move(key), std::move(s));
    }
    return vocab;
}

json document_to_json(const Document &doc) {
    json surfaces = json::object();
    for (const auto &[token, forms] : doc.surface_forms) surfaces[token] = forms;
    return {{"id", doc.id},
            {"title", doc.title},
            {"authors", doc.authors},
            {"year", doc.year},
            {"venue", doc.venue},
            {"collection", to_string(doc.collection)},
            {"keywords", doc.raw_keywords},
            {"tokens", doc.tokens},
            {"surface_forms", surfaces}};
}

Document document_from_json(const json &j) {
    Document doc;
    doc.id = j.at("id").get<std::string>();
    doc.title = j.at("title").get<std::string>();
    doc.authors = j.at("authors").get<std::vector<std::string>>();
    doc.year = j.at("year").get<int>();
    doc.venue = j.at("venue").get<std::string>();
    auto collection = parse_collection(j.at("collection").get<std::string>());
    if (!collection) throw InvalidArgument("document '" + doc.id + "' has an unknown collection tag");
    doc.collection = *collection;
    doc.raw_keywords = j.at("keywords").get<std::vector<std::string>>();
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto &[token, forms] : j.at("surface_forms").items()) {
        doc.surface_forms[token] = forms.get<std::set<std::string>>();
    }
    doc.origin = "snapshot";
    return doc;
}

}  // namespace lbdx::corpus
