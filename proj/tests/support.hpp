#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lbdx/corpus.hpp"
#include "oracles.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path source_dir() { return LBDX_SOURCE_DIR; }
inline fs::path samples_dir() { return source_dir() / "samples"; }
inline fs::path schemas_dir() { return source_dir() / "schemas"; }
inline fs::path cli_path() { return LBDX_CLI_PATH; }

/// Document with tokens already set; surface forms equal the tokens.
inline lbdx::corpus::Document make_doc(std::string id, lbdx::corpus::Collection c, std::vector<std::string> tokens,
                                       int year = 2015) {
    lbdx::corpus::Document d;
    d.id = std::move(id);
    d.title = "Title of " + d.id;
    d.authors = {"A. Author"};
    d.year = year;
    d.venue = "Venue";
    d.collection = c;
    d.raw_keywords = tokens;
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const auto &t : tokens) d.surface_forms[t].insert(t);
    d.tokens = std::move(tokens);
    return d;
}

inline std::vector<lbdx::corpus::Document> to_documents(const oracle::BagCorpus &bags) {
    std::vector<lbdx::corpus::Document> docs;
    for (std::size_t i = 0; i < bags.size(); ++i) {
        docs.push_back(make_doc("d" + std::to_string(i), i % 2 ? lbdx::corpus::Collection::T : lbdx::corpus::Collection::S,
                                {bags[i].begin(), bags[i].end()}));
    }
    return docs;
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("lbdx-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const fs::path &path() const { return path_; }
    fs::path operator/(const std::string &name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace testing_support
