#include "lbdx/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "lbdx/errors.hpp"

namespace lbdx::embedding {

// --- counts --------------------------------------------------------------

CooccurrenceCounts::CooccurrenceCounts(std::vector<std::string> tokens, std::vector<int> token_counts,
                                       std::map<std::pair<std::size_t, std::size_t>, int> pair_counts, int doc_count)
    : tokens_(std::move(tokens)),
      token_counts_(std::move(token_counts)),
      pair_counts_(std::move(pair_counts)),
      doc_count_(doc_count) {
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

std::optional<std::size_t> CooccurrenceCounts::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t CooccurrenceCounts::require_index(std::string_view token) const {
    auto idx = index_of(token);
    if (!idx) throw NotFound("token '" + std::string(token) + "' has no co-occurrence statistics");
    return *idx;
}

int CooccurrenceCounts::pair_count(std::size_t i, std::size_t j) const {
    if (i == j) return 0;
    auto it = pair_counts_.find(i < j ? std::pair{i, j} : std::pair{j, i});
    return it == pair_counts_.end() ? 0 : it->second;
}

int CooccurrenceCounts::pair_count(std::string_view w, std::string_view c) const {
    return pair_count(require_index(w), require_index(c));
}

CooccurrenceCounts count_cooccurrences(std::span<const corpus::Document> docs) {
    if (docs.empty()) {
        throw InvalidArgument("cannot count co-occurrences over an empty corpus");
    }

    std::vector<std::string> tokens;
    for (const auto &doc : docs) tokens.insert(tokens.end(), doc.tokens.begin(), doc.tokens.end());
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) index.emplace(tokens[i], i);

    std::vector<int> token_counts(tokens.size(), 0);
    std::map<std::pair<std::size_t, std::size_t>, int> pairs;
    std::vector<std::size_t> ids;
    for (const auto &doc : docs) {
        ids.clear();
        for (const auto &t : doc.tokens) ids.push_back(index.at(t));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (std::size_t a = 0; a < ids.size(); ++a) {
            ++token_counts[ids[a]];
            for (std::size_t b = a + 1; b < ids.size(); ++b) ++pairs[{ids[a], ids[b]}];
        }
    }
    return CooccurrenceCounts(std::move(tokens), std::move(token_counts), std::move(pairs),
                              static_cast<int>(docs.size()));
}

// --- PMI family ----------------------------------------------------------

double pmi(const CooccurrenceCounts &counts, std::size_t w, std::size_t c) {
    const int joint = counts.pair_count(w, c);
    if (joint == 0) return -std::numeric_limits<double>::infinity();
    const double numerator = static_cast<double>(joint) * static_cast<double>(counts.doc_count());
    const double denominator = static_cast<double>(counts.token_count(w)) * static_cast<double>(counts.token_count(c));
    return std::log(numerator / denominator);
}

double pmi(const CooccurrenceCounts &counts, std::string_view w, std::string_view c) {
    return pmi(counts, counts.require_index(w), counts.require_index(c));
}

namespace {

SparseRowMatrix assemble(std::size_t n, const std::vector<Eigen::Triplet<double>> &cells) {
    SparseRowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(cells.begin(), cells.end());
    m.makeCompressed();
    return m;
}

}  // namespace

SppmiMatrix sppmi_matrix(const CooccurrenceCounts &counts, double alpha, bool symmetrize) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
    const std::size_t n = counts.size();

    std::vector<double> smoothed(n);
    double total = 0.0;
    double total_smoothed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double count = static_cast<double>(counts.token_count(i));
        smoothed[i] = std::pow(count, alpha);
        total += count;
        total_smoothed += smoothed[i];
    }
    // ln of the ratio between the smoothed and raw context normalizers; exactly 0 at alpha = 1.
    const double log_mass = std::log(total_smoothed) - std::log(total);
    const double docs = static_cast<double>(counts.doc_count());

    std::vector<Eigen::Triplet<double>> cells;
    cells.reserve(counts.pairs().size() * 2);
    auto emit = [&](std::size_t w, std::size_t c, int joint) {
        const double numerator = static_cast<double>(joint) * docs;
        const double denominator = static_cast<double>(counts.token_count(w)) * smoothed[c];
        const double value = std::log(numerator / denominator) + log_mass;
        if (value > 0.0) {
            cells.emplace_back(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(c), value);
        }
    };
    for (const auto &[key, joint] : counts.pairs()) {
        emit(key.first, key.second, joint);
        emit(key.second, key.first, joint);
    }

    SppmiMatrix out;
    out.tokens = counts.tokens();
    out.alpha = alpha;
    out.symmetrized = symmetrize;
    out.values = assemble(n, cells);
    if (symmetrize) {
        SparseRowMatrix transposed = out.values.transpose();
        out.values = (out.values + transposed) * 0.5;
        out.values.prune(0.0);
        out.values.makeCompressed();
    }
    return out;
}

SppmiMatrix ppmi_matrix(const CooccurrenceCounts &counts) {
    std::vector<Eigen::Triplet<double>> cells;
    for (const auto &[key, joint] : counts.pairs()) {
        for (auto [w, c] : {key, std::pair{key.second, key.first}}) {
            const double value = pmi(counts, w, c);
            if (value > 0.0) cells.emplace_back(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(c), value);
        }
    }
    SppmiMatrix out;
    out.tokens = counts.tokens();
    out.alpha = 1.0;
    out.values = assemble(counts.size(), cells);
    return out;
}

// --- SVD -----------------------------------------------------------------

TruncatedSvd truncated_svd(const Eigen::MatrixXd &m, int k) {
    const Eigen::Index limit = std::min(m.rows(), m.cols());
    if (k < 1 || k > limit) {
        throw InvalidArgument("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(limit) +
                              "] for a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

    TruncatedSvd out;
    out.u = svd.matrixU().leftCols(k);
    out.v = svd.matrixV().leftCols(k);
    out.singular_values = svd.singularValues().head(k);

    for (Eigen::Index col = 0; col < k; ++col) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index row = 0; row < out.u.rows(); ++row) {
            const double mag = std::abs(out.u(row, col));
            if (mag > best) {
                best = mag;
                pivot = row;
            }
        }
        if (out.u(pivot, col) < 0.0) {
            out.u.col(col) *= -1.0;
            out.v.col(col) *= -1.0;
        }
    }
    return out;
}

// --- embedding space -----------------------------------------------------

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> tokens, RowMatrix vectors, Eigen::VectorXd singular_values,
                               double alpha, double sigma_exponent, std::uint64_t seed)
    : tokens_(std::move(tokens)),
      vectors_(std::move(vectors)),
      singular_values_(std::move(singular_values)),
      alpha_(alpha),
      sigma_exponent_(sigma_exponent),
      seed_(seed) {
    if (static_cast<Eigen::Index>(tokens_.size()) != vectors_.rows()) {
        throw InvalidArgument("embedding has " + std::to_string(vectors_.rows()) + " rows for " +
                              std::to_string(tokens_.size()) + " tokens");
    }
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

std::optional<std::size_t> EmbeddingSpace::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t EmbeddingSpace::require_index(std::string_view token) const {
    auto idx = index_of(token);
    if (!idx) throw NotFound("token '" + std::string(token) + "' is not in the embedding space");
    return *idx;
}

double EmbeddingSpace::cosine_similarity(std::size_t w, std::size_t c) const {
    const double nw = norm(w);
    const double nc = norm(c);
    if (nw == 0.0) throw InvalidArgument("token '" + tokens_[w] + "' has a zero-norm embedding");
    if (nc == 0.0) throw InvalidArgument("token '" + tokens_[c] + "' has a zero-norm embedding");
    const double sim = vector(w).dot(vector(c)) / (nw * nc);
    return std::clamp(sim, -1.0, 1.0);
}

double EmbeddingSpace::cosine_similarity(std::string_view w, std::string_view c) const {
    return cosine_similarity(require_index(w), require_index(c));
}

EmbeddingSpace svd_embed(const SppmiMatrix &m, const SvdOptions &options) {
    TruncatedSvd svd = truncated_svd(m.dense(), options.k);
    RowMatrix vectors = svd.u;
    if (options.sigma_exponent != 0.0) {
        for (Eigen::Index col = 0; col < vectors.cols(); ++col) {
            vectors.col(col) *= std::pow(svd.singular_values(col), options.sigma_exponent);
        }
    }
    return EmbeddingSpace(m.tokens, std::move(vectors), std::move(svd.singular_values), m.alpha,
                          options.sigma_exponent, options.seed);
}

// --- serialization -------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "LBDXEMB1";

void put_u32(std::string &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string &out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::string_view take(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw InvalidArgument("embedding file is truncated");
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint64_t take_le(int width) {
        auto raw = take(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
        return v;
    }
    double take_f64() { return std::bit_cast<double>(take_le(8)); }
    bool done() const { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_embeddings(const EmbeddingSpace &space) {
    const nlohmann::json header = {{"tokens", space.tokens()},
                                   {"k", space.k()},
                                   {"alpha", space.alpha()},
                                   {"seed", space.seed()},
                                   {"sigma_exponent", space.sigma_exponent()}};
    const std::string header_text = header.dump();

    std::string out(kMagic);
    put_u32(out, static_cast<std::uint32_t>(header_text.size()));
    out += header_text;
    for (Eigen::Index i = 0; i < space.singular_values().size(); ++i) put_f64(out, space.singular_values()(i));
    const auto &v = space.vectors();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) put_f64(out, v(r, c));
    }
    return out;
}

EmbeddingSpace deserialize_embeddings(std::string_view bytes) {
    Reader in(bytes);
    if (in.take(kMagic.size()) != kMagic) throw InvalidArgument("not an embedding file (bad magic)");
    const auto header_len = static_cast<std::size_t>(in.take_le(4));
    const auto header = nlohmann::json::parse(in.take(header_len));

    auto tokens = header.at("tokens").get<std::vector<std::string>>();
    const int k = header.at("k").get<int>();
    Eigen::VectorXd singular(k);
    for (int i = 0; i < k; ++i) singular(i) = in.take_f64();
    RowMatrix vectors(static_cast<Eigen::Index>(tokens.size()), k);
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
        for (Eigen::Index c = 0; c < k; ++c) vectors(r, c) = in.take_f64();
    }
    if (!in.done()) throw InvalidArgument("embedding file has trailing bytes");
    return EmbeddingSpace(std::move(tokens), std::move(vectors), std::move(singular), header.at("alpha").get<double>(),
                          header.at("sigma_exponent").get<double>(), header.at("seed").get<std::uint64_t>());
}

void write_embeddings(const EmbeddingSpace &space, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    const std::string bytes = serialize_embeddings(space);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

EmbeddingSpace read_embeddings(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_embeddings(ss.str());
}

}  // namespace lbdx::embedding
