#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lbdx/corpus.hpp"

namespace lbdx::embedding {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Document-level co-occurrence statistics. A document contributes at most
/// once to a token count and once to each unordered pair count.
class CooccurrenceCounts {
public:
    CooccurrenceCounts() = default;
    CooccurrenceCounts(std::vector<std::string> tokens, std::vector<int> token_counts,
                       std::map<std::pair<std::size_t, std::size_t>, int> pair_counts, int doc_count);

    /// Lexicographically sorted token inventory; positions are matrix indices.
    const std::vector<std::string> &tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    int doc_count() const noexcept { return doc_count_; }

    std::optional<std::size_t> index_of(std::string_view token) const;
    /// Throws NotFound for an unknown token.
    std::size_t require_index(std::string_view token) const;

    int token_count(std::size_t i) const { return token_counts_[i]; }
    int token_count(std::string_view token) const { return token_counts_[require_index(token)]; }

    /// #(w,c). Symmetric; 0 for i == j.
    int pair_count(std::size_t i, std::size_t j) const;
    int pair_count(std::string_view w, std::string_view c) const;

    /// Stored pairs keyed by (i, j) with i < j.
    const std::map<std::pair<std::size_t, std::size_t>, int> &pairs() const noexcept { return pair_counts_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<int> token_counts_;
    std::map<std::pair<std::size_t, std::size_t>, int> pair_counts_;
    int doc_count_ = 0;
};

CooccurrenceCounts count_cooccurrences(std::span<const corpus::Document> docs);

/// ln(#(w,c)·|D| / (#(w)·#(c))). Returns -infinity when the pair never
/// co-occurs, which includes w == c since self-pairs are not counted.
double pmi(const CooccurrenceCounts &counts, std::size_t w, std::size_t c);
double pmi(const CooccurrenceCounts &counts, std::string_view w, std::string_view c);

constexpr double kDefaultAlpha = 0.95;

/// Smoothed positive PMI matrix. Rows are words, columns contexts; both use
/// the token order of the counts it was built from.
struct SppmiMatrix {
    std::vector<std::string> tokens;
    double alpha = kDefaultAlpha;
    bool symmetrized = false;
    SparseRowMatrix values;

    double value(std::size_t w, std::size_t c) const { return values.coeff(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(c)); }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(values); }
};

/// Cell (w,c) = max(0, ln(P(w,c) / (P(w)·Pα(c)))) with P(w,c) = #(w,c)/|D|,
/// P(w) = #(w)/|D| and Pα(c) ∝ #(c)^α. Pα is scaled to carry the same total
/// mass as the unsmoothed marginal Σ#(c)/|D|, so alpha = 1 yields plain PPMI
/// bit for bit. With `symmetrize` the result is averaged with its transpose.
SppmiMatrix sppmi_matrix(const CooccurrenceCounts &counts, double alpha, bool symmetrize = false);

/// Plain positive PMI, max(pmi, 0), with zero on the diagonal.
SppmiMatrix ppmi_matrix(const CooccurrenceCounts &counts);

struct TruncatedSvd {
    Eigen::MatrixXd u;                ///< rows x k, orthonormal columns
    Eigen::VectorXd singular_values;  ///< k values, descending
    Eigen::MatrixXd v;                ///< cols x k, orthonormal columns
};

/// Top-k singular triplets of a dense matrix. Each singular vector pair is
/// flipped so that the largest-magnitude entry of the left vector is positive
/// (first index wins ties). Throws InvalidArgument unless 1 <= k <= min(rows, cols).
TruncatedSvd truncated_svd(const Eigen::MatrixXd &m, int k);

struct SvdOptions {
    int k = 50;
    /// Embeddings are U_k · Σ_k^sigma_exponent; 0 keeps the rows of U_k.
    double sigma_exponent = 0.0;
    /// Recorded for provenance; the dense solver is deterministic.
    std::uint64_t seed = 0;
};

class EmbeddingSpace {
public:
    EmbeddingSpace() = default;
    EmbeddingSpace(std::vector<std::string> tokens, RowMatrix vectors, Eigen::VectorXd singular_values, double alpha,
                   double sigma_exponent, std::uint64_t seed);

    const std::vector<std::string> &tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    int k() const noexcept { return static_cast<int>(vectors_.cols()); }
    const RowMatrix &vectors() const noexcept { return vectors_; }
    const Eigen::VectorXd &singular_values() const noexcept { return singular_values_; }
    double alpha() const noexcept { return alpha_; }
    double sigma_exponent() const noexcept { return sigma_exponent_; }
    std::uint64_t seed() const noexcept { return seed_; }

    bool contains(std::string_view token) const { return index_.contains(std::string(token)); }
    std::optional<std::size_t> index_of(std::string_view token) const;
    std::size_t require_index(std::string_view token) const;

    auto vector(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)); }
    double norm(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)).norm(); }

    /// dot(u,v) / (|u|·|v|). Throws InvalidArgument naming the token when a
    /// vector has zero norm.
    double cosine_similarity(std::size_t w, std::size_t c) const;
    double cosine_similarity(std::string_view w, std::string_view c) const;
    double cosine_distance(std::size_t w, std::size_t c) const { return 1.0 - cosine_similarity(w, c); }
    double cosine_distance(std::string_view w, std::string_view c) const { return 1.0 - cosine_similarity(w, c); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
    RowMatrix vectors_;
    Eigen::VectorXd singular_values_;
    double alpha_ = kDefaultAlpha;
    double sigma_exponent_ = 0.0;
    std::uint64_t seed_ = 0;
};

EmbeddingSpace svd_embed(const SppmiMatrix &m, const SvdOptions &options);

inline double cosine_similarity(const EmbeddingSpace &space, std::string_view w, std::string_view c) {
    return space.cosine_similarity(w, c);
}

/// Binary layout: "LBDXEMB1", u32 header length, JSON header
/// {tokens, k, alpha, seed, sigma_exponent}, then k singular values and
/// tokens*k vector entries, all little-endian IEEE-754 doubles.
void write_embeddings(const EmbeddingSpace &space, const std::filesystem::path &path);
EmbeddingSpace read_embeddings(const std::filesystem::path &path);
std::string serialize_embeddings(const EmbeddingSpace &space);
EmbeddingSpace deserialize_embeddings(std::string_view bytes);

}  // namespace lbdx::embedding
