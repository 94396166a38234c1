#include "lbdx/service.hpp"

#include <chrono>
#include <charconv>
#include <thread>
#include <optional>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "lbdx/hashing.hpp"

namespace lbdx::service {

using nlohmann::json;

namespace {

class HttpError : public std::runtime_error {
public:
    HttpError(int status, const std::string &message) : std::runtime_error(message), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

Response json_response(int status, const json &body) {
    Response r;
    r.status = status;
    r.body = body.dump();
    r.headers["Content-Type"] = "application/json; charset=utf-8";
    return r;
}

Response error_response(int status, const std::string &message) {
    return json_response(status, {{"error", {{"status", status}, {"message", message}}}});
}

std::string etag_of(const Snapshot &snap) {
    if (!snap.content_hash.empty()) return "\"" + snap.content_hash + "\"";
    std::map<std::string, std::string> hashes;
    for (const auto &[name, bytes] : pipeline::render_artifacts(snap)) hashes[name] = sha256_hex(bytes);
    return "\"" + pipeline::combine_hashes(hashes) + "\"";
}

std::optional<std::string> single(const Query &query, const std::string &key) {
    auto it = query.find(key);
    if (it == query.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> split_tokens(const Query &query) {
    std::vector<std::string> out;
    auto [begin, end] = query.equal_range("tokens");
    for (auto it = begin; it != end; ++it) {
        std::string_view rest = it->second;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string_view piece = rest.substr(0, comma);
            while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
            while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
            if (!piece.empty()) out.emplace_back(piece);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    return out;
}

std::optional<std::size_t> parse_limit(const Query &query) {
    auto raw = single(query, "limit");
    if (!raw) return std::nullopt;
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
    if (ec != std::errc{} || ptr != raw->data() + raw->size()) {
        throw HttpError(400, "limit must be a non-negative integer");
    }
    return value;
}

struct ResolvedSelection {
    explore::Selection selection;
    std::vector<std::string> unknown;
    json warnings = json::array();
};

ResolvedSelection resolve_selection(const Snapshot &snap, const Query &query, bool required) {
    const auto requested = split_tokens(query);
    if (requested.empty() && required) throw HttpError(400, "selection is empty: pass tokens=t1,t2,...");
    ResolvedSelection out;
    for (const auto &t : requested) {
        if (snap.vocabulary.contains(t)) {
            out.selection.tokens.insert(t);
        } else if (std::find(out.unknown.begin(), out.unknown.end(), t) == out.unknown.end()) {
            out.unknown.push_back(t);
        }
    }
    if (!out.unknown.empty()) {
        std::string list;
        for (const auto &u : out.unknown) list += (list.empty() ? "" : ", ") + u;
        out.warnings.push_back("ignored tokens not in the vocabulary: " + list);
    }
    return out;
}

json token_labels(const Snapshot &snap, const corpus::Document &doc) {
    json out = json::array();
    for (const auto &t : doc.tokens) out.push_back({{"token", t}, {"surface", snap.vocabulary.surface(t)}});
    return out;
}

json document_summary(const Snapshot &snap, const corpus::Document &doc) {
    return {{"id", doc.id},
            {"title", doc.title},
            {"authors", doc.authors},
            {"year", doc.year},
            {"venue", doc.venue},
            {"collection", corpus::to_string(doc.collection)},
            {"tokens", token_labels(snap, doc)}};
}

json entry_point_summary(const Snapshot &snap, const discovery::EntryPoint &ep) {
    const layout::LayoutResult *placed = nullptr;
    for (const auto &l : snap.layouts) {
        if (l.entry_point == ep.id) placed = &l;
    }
    json members = json::array();
    for (const auto &t : ep.member_tokens) {
        const auto &stats = snap.vocabulary.stats(t);
        json m = {{"token", t},
                  {"surface", stats.most_common_form()},
                  {"class", corpus::to_string(ep.classes.at(t))},
                  {"frequency", stats.total_count}};
        layout::Point p;
        if (placed != nullptr) {
            if (auto it = placed->positions.find(t); it != placed->positions.end()) p = it->second;
        }
        m["x"] = p.x;
        m["y"] = p.y;
        members.push_back(std::move(m));
    }
    json mst = json::array();
    for (const auto &e : ep.mst_edges) mst.push_back({{"u", e.u}, {"v", e.v}, {"distance", e.distance}});
    return {{"id", ep.id}, {"members", members}, {"mst", mst}, {"anchors", ep.source_neighborhoods}};
}

}  // namespace

Api::Api(std::shared_ptr<const Snapshot> snapshot) : snapshot_(std::move(snapshot)) {}

void Api::replace_snapshot(std::shared_ptr<const Snapshot> snapshot) {
    std::lock_guard lock(mutex_);
    snapshot_ = std::move(snapshot);
}

std::shared_ptr<const Snapshot> Api::snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_;
}

Response Api::handle(std::string_view path, const Query &query) const {
    constexpr std::string_view kEntryPoints = "/api/entry-points";
    constexpr std::string_view kDocuments = "/api/documents";
    if (path == kEntryPoints || path == "/api/entry-points/") return entry_points();
    if (path.starts_with("/api/entry-points/")) return entry_point(path.substr(kEntryPoints.size() + 1));
    if (path == kDocuments || path == "/api/documents/") return documents(query);
    if (path.starts_with("/api/documents/")) return document(path.substr(kDocuments.size() + 1), query);
    if (path == "/api/token-frequencies") return token_frequencies(query);
    if (path == "/api/meta") return meta();
    return error_response(404, "no such endpoint: " + std::string(path));
}

namespace {

// Shared wrapper: snapshot presence check, error mapping, ETag.
template <typename Fn>
Response guarded(const std::shared_ptr<const Snapshot> &snap, Fn &&fn) {
    if (!snap) return error_response(503, "no snapshot loaded");
    try {
        Response r = fn(*snap);
        r.headers["ETag"] = etag_of(*snap);
        return r;
    } catch (const HttpError &e) {
        return error_response(e.status(), e.what());
    } catch (const NotFound &e) {
        return error_response(404, e.what());
    } catch (const std::exception &e) {
        spdlog::error("request failed: {}", e.what());
        return error_response(500, e.what());
    }
}

}  // namespace

Response Api::entry_points() const {
    return guarded(snapshot(), [](const Snapshot &snap) {
        json list = json::array();
        for (const auto &ep : snap.entry_points) list.push_back(entry_point_summary(snap, ep));
        return json_response(200, {{"entry_points", list}});
    });
}

Response Api::entry_point(std::string_view id) const {
    return guarded(snapshot(), [id](const Snapshot &snap) {
        int value = 0;
        const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), value);
        if (ec != std::errc{} || ptr != id.data() + id.size()) {
            throw HttpError(400, "entry point id must be an integer");
        }
        for (const auto &ep : snap.entry_points) {
            if (ep.id == value) return json_response(200, entry_point_summary(snap, ep));
        }
        throw NotFound("entry point " + std::string(id) + " not found");
    });
}

Response Api::documents(const Query &query) const {
    return guarded(snapshot(), [&query](const Snapshot &snap) {
        auto resolved = resolve_selection(snap, query, true);
        std::optional<corpus::Collection> collection;
        if (auto raw = single(query, "collection")) {
            collection = corpus::parse_collection(*raw);
            if (!collection) throw HttpError(400, "collection must be S or T");
        }
        const auto limit = parse_limit(query);

        const auto ranked = resolved.selection.tokens.empty()
                                ? std::vector<explore::RankedDocument>{}
                                : explore::rank_documents(resolved.selection, snap.documents.documents(), collection);
        json docs = json::array();
        for (const auto &r : ranked) {
            if (limit && docs.size() >= *limit) break;
            json d = document_summary(snap, *r.document);
            d["match_count"] = r.match_count;
            d["matched_tokens"] = r.matched_tokens;
            docs.push_back(std::move(d));
        }
        return json_response(200, {{"selection", resolved.selection.tokens},
                                   {"unknown_tokens", resolved.unknown},
                                   {"warnings", resolved.warnings},
                                   {"collection", collection ? json(corpus::to_string(*collection)) : json(nullptr)},
                                   {"total", ranked.size()},
                                   {"documents", docs}});
    });
}

Response Api::token_frequencies(const Query &query) const {
    return guarded(snapshot(), [&query](const Snapshot &snap) {
        auto resolved = resolve_selection(snap, query, true);
        auto scope = explore::FrequencyScope::AllTokens;
        if (auto raw = single(query, "scope")) {
            if (*raw == "selection") {
                scope = explore::FrequencyScope::SelectionOnly;
            } else if (*raw != "all") {
                throw HttpError(400, "scope must be 'all' or 'selection'");
            }
        }
        const auto limit = parse_limit(query);
        const auto freqs = resolved.selection.tokens.empty()
                               ? std::vector<std::pair<std::string, int>>{}
                               : explore::token_frequencies(resolved.selection, snap.documents.documents(), scope);
        json list = json::array();
        for (const auto &[token, count] : freqs) {
            if (limit && list.size() >= *limit) break;
            list.push_back({{"token", token}, {"surface", snap.vocabulary.surface(token)}, {"count", count}});
        }
        return json_response(200, {{"selection", resolved.selection.tokens},
                                   {"unknown_tokens", resolved.unknown},
                                   {"warnings", resolved.warnings},
                                   {"scope", scope == explore::FrequencyScope::AllTokens ? "all" : "selection"},
                                   {"total", freqs.size()},
                                   {"frequencies", list}});
    });
}

Response Api::document(std::string_view id, const Query &query) const {
    return guarded(snapshot(), [id, &query](const Snapshot &snap) {
        auto resolved = resolve_selection(snap, query, false);
        const bool with_selection = !split_tokens(query).empty();
        const auto detail = explore::document_detail(snap.documents, snap.vocabulary, id,
                                                     with_selection ? &resolved.selection : nullptr);
        json body = document_summary(snap, *detail.document);
        body["keywords"] = detail.document->raw_keywords;
        body["match_count"] = detail.match_count ? json(*detail.match_count) : json(nullptr);
        body["matched_tokens"] = detail.match_count ? json(detail.matched_tokens) : json(nullptr);
        body["warnings"] = resolved.warnings;
        return json_response(200, body);
    });
}

Response Api::meta() const {
    return guarded(snapshot(), [](const Snapshot &snap) {
        return json_response(200, {{"config", snap.config.to_json()},
                                   {"built_at", snap.built_at},
                                   {"snapshot_hash", snap.content_hash},
                                   {"summary", snap.summary.to_json()}});
    });
}

// --- HTTP ----------------------------------------------------------------

Server::Server(std::shared_ptr<Api> api, ServerOptions options)
    : api_(std::move(api)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
    // SO_REUSEADDR only; a busy port must fail to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char *>(&yes), sizeof(yes));
    });
    const std::string origin = options_.cors_origin;
    auto dispatch = [this, origin](const httplib::Request &req, httplib::Response &res) {
        Query query(req.params.begin(), req.params.end());
        const Response r = api_->handle(req.path, query);
        const auto inm = req.get_header_value("If-None-Match");
        auto etag = r.headers.find("ETag");
        if (r.status == 200 && etag != r.headers.end() && !inm.empty() && inm == etag->second) {
            res.status = 304;
        } else {
            res.status = r.status;
            auto ct = r.headers.find("Content-Type");
            res.set_content(r.body, ct != r.headers.end() ? ct->second.c_str() : "application/json");
        }
        for (const auto &[k, v] : r.headers) {
            if (k != "Content-Type") res.set_header(k, v);
        }
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Expose-Headers", "ETag");
        spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    };
    server_->Get(R"(/api/.*)", dispatch);
    server_->Options(R"(/api/.*)", [origin](const httplib::Request &, httplib::Response &res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match");
    });
    if (!options_.static_dir.empty() && !server_->set_mount_point("/", options_.static_dir)) {
        spdlog::warn("static directory {} not found; UI bundle will not be served", options_.static_dir);
    }
}

Server::~Server() {
    stop();
}

bool Server::bind() {
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.host);
        return port_ > 0;
    }
    if (!server_->bind_to_port(options_.host, options_.port)) return false;
    port_ = options_.port;
    return true;
}

bool Server::listen() {
    spdlog::info("serving on http://{}:{}", options_.host, port_);
    listening_ = true;
    bool ok = true;
    if (!stop_requested_) ok = server_->listen_after_bind();
    finished_ = true;
    return ok;
}

void Server::stop() {
    stop_requested_ = true;
    if (!server_ || !listening_) return;
    while (!server_->is_running() && !finished_) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    server_->stop();
}

void Server::wait_until_ready() const {
    server_->wait_until_ready();
}

}  // namespace lbdx::service
