#include "feedql/service.hpp"

#include "feedql/error.hpp"
#include "feedql/http_fetcher.hpp"

#include <httplib.h>

#include <cctype>
#include <charconv>
#include <cstdio>

namespace feedql {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h)
{
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Compares every candidate in full so timing does not reveal prefixes.
bool key_accepted(const std::vector<std::string>& keys, const std::optional<std::string>& presented)
{
    if (!presented)
        return false;
    bool accepted = false;
    for (const auto& k : keys) {
        if (k.empty())
            continue;
        unsigned char diff = k.size() == presented->size() ? 0 : 1;
        for (std::size_t i = 0; i < presented->size(); ++i)
            diff |= static_cast<unsigned char>(presented->at(i) ^ k[i % k.size()]);
        accepted |= diff == 0;
    }
    return accepted;
}

bool etag_matches(const std::optional<std::string>& if_none_match, const std::string& etag)
{
    if (!if_none_match)
        return false;
    std::string_view list = *if_none_match;
    while (!list.empty()) {
        auto comma = list.find(',');
        auto item = list.substr(0, comma);
        list = comma == std::string_view::npos ? std::string_view() : list.substr(comma + 1);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        if (item == "*")
            return true;
        if (item.starts_with("W/"))
            item.remove_prefix(2);
        if (item == etag)
            return true;
    }
    return false;
}

Response text_response(int status, std::string body)
{
    Response r;
    r.status = status;
    r.body = std::move(body);
    if (!r.body.empty() && r.body.back() != '\n')
        r.body += '\n';
    return r;
}

Response cacheable_feed(const Feed& feed, const std::optional<std::string>& if_none_match, std::string cache_control)
{
    Response r;
    r.body = serialize_feed(feed);
    auto etag = content_etag(r.body);
    r.headers.emplace_back("ETag", etag);
    r.headers.emplace_back("Cache-Control", std::move(cache_control));
    if (etag_matches(if_none_match, etag)) {
        r.status = 304;
        r.body.clear();
        r.content_type.clear();
        return r;
    }
    r.content_type = kAtomMediaType;
    return r;
}

Response private_feed(const Feed& feed)
{
    Response r;
    r.content_type = kAtomMediaType;
    r.body = serialize_feed(feed);
    r.headers.emplace_back("Cache-Control", "private, max-age=0");
    r.headers.emplace_back("Vary", std::string(kKeyHeader));
    return r;
}

Response unauthorized()
{
    Response r = text_response(401, "missing or invalid " + std::string(kKeyHeader) + " header");
    r.headers.emplace_back("WWW-Authenticate", std::string(kKeyHeader));
    return r;
}

Response rejected(const std::vector<Unsupported>& unsupported)
{
    std::string body;
    for (const auto& u : unsupported)
        body += u.to_string() + "\n";
    return text_response(400, body);
}

std::optional<long long> integer(std::string_view text)
{
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        return std::nullopt;
    return v;
}

} // namespace

std::string Response::header(std::string_view name) const
{
    for (const auto& [k, v] : headers)
        if (lower(k) == lower(name))
            return v;
    return {};
}

std::string content_etag(std::string_view body)
{
    // Two independent 64-bit FNV-1a lanes.
    auto a = fnv1a(body, 0xcbf29ce484222325ULL);
    auto b = fnv1a(body, 0x84222325cbf29ce4ULL ^ body.size());
    char buf[40];
    std::snprintf(buf, sizeof buf, "\"%016llx%016llx\"", static_cast<unsigned long long>(a),
        static_cast<unsigned long long>(b));
    return buf;
}

FeedService::FeedService() : client_(std::make_shared<HttpFetcher>()) {}

FeedService::~FeedService() = default;

std::unique_ptr<FeedService> FeedService::from_config(const ServiceConfig& config)
{
    auto service = std::make_unique<FeedService>();
    for (const auto& c : config.collections) {
        for (const auto* path : {&c.atom, &c.hidden}) {
            if (!path->empty() && !std::filesystem::exists(*path))
                throw Error(ErrorCode::BadConfig, "collection '" + c.name + "': file not found: " + path->string());
        }
        try {
            service->add_collection(load_collection(c.name, c.atom, c.hidden, c.page_size, c.archive_size), c.tier, c.keys);
        } catch (const Error& e) {
            throw Error(ErrorCode::BadConfig, "collection '" + c.name + "' (" + c.atom.string() + "): " + e.what());
        }
    }
    for (const auto& f : config.feedsets)
        service->add_feedset(f.name, f.sources, f.tier, f.keys);
    return service;
}

void FeedService::add_collection(Collection collection, Tier tier, std::vector<std::string> keys)
{
    std::string name = collection.name();
    if (collections_.count(name))
        throw Error(ErrorCode::BadConfig, "duplicate collection '" + name + "'");
    collections_.emplace(name, CollectionSlot{std::make_unique<CollectionStore>(std::move(collection)), tier, std::move(keys)});
}

void FeedService::add_feedset(std::string name, std::vector<std::string> sources, Tier tier, std::vector<std::string> keys)
{
    if (feedsets_.count(name))
        throw Error(ErrorCode::BadConfig, "duplicate feedset '" + name + "'");
    feedsets_.emplace(std::move(name), FeedsetSlot{std::move(sources), tier, std::move(keys)});
}

void FeedService::set_source_client(std::shared_ptr<SourceClient> client) { client_ = std::move(client); }

CollectionStore* FeedService::store(const std::string& name)
{
    auto it = collections_.find(name);
    return it == collections_.end() ? nullptr : it->second.store.get();
}

Response FeedService::handle_feed_get(const std::string& name, const std::optional<std::string>& page,
    const std::optional<std::string>& if_none_match) const
{
    auto it = collections_.find(name);
    if (it == collections_.end())
        return text_response(404, "unknown collection '" + name + "'");
    auto snap = it->second.store->snapshot();
    Feed feed;
    if (page) {
        auto n = integer(*page);
        if (!n)
            return text_response(400, "page must be an integer");
        try {
            feed = paged_feed(*snap, *n);
        } catch (const Error& e) {
            return text_response(404, e.what());
        }
    } else {
        feed = current_feed(*snap);
    }
    feed = embed_capability_link(std::move(feed), snap->base_href() + "/capabilities");
    return cacheable_feed(feed, if_none_match, "public, max-age=60");
}

Response FeedService::handle_archive_get(const std::string& name, const std::string& index,
    const std::optional<std::string>& if_none_match) const
{
    auto it = collections_.find(name);
    if (it == collections_.end())
        return text_response(404, "unknown collection '" + name + "'");
    auto snap = it->second.store->snapshot();
    auto n = integer(index);
    if (!n)
        return text_response(404, "no archive '" + index + "'");
    Feed feed;
    try {
        feed = archived_feed(*snap, *n);
    } catch (const Error& e) {
        return text_response(404, e.what());
    }
    feed = embed_capability_link(std::move(feed), snap->base_href() + "/capabilities");
    return cacheable_feed(feed, if_none_match,
        archive_is_full(*snap, *n) ? "public, max-age=31536000, immutable" : "public, max-age=60");
}

Response FeedService::handle_query_get(const std::string& name, const Params& params,
    const std::optional<std::string>& key) const
{
    auto it = collections_.find(name);
    if (it == collections_.end())
        return text_response(404, "unknown collection '" + name + "'");
    const auto& slot = it->second;
    if (slot.tier == Tier::keyed && !key_accepted(slot.keys, key))
        return unauthorized();

    auto snap = slot.store->snapshot();
    try {
        Query q = parse_uri_params(params);
        auto caps = collection_capabilities(*snap, slot.tier);
        auto unsupported = validate_against_capabilities(q, caps);
        if (!unsupported.empty())
            return rejected(unsupported);
        Feed result = collection_query(*snap, q, {}, &caps);
        return private_feed(embed_capability_link(std::move(result), snap->base_href() + "/capabilities"));
    } catch (const Error& e) {
        return text_response(400, e.what());
    }
}

Response FeedService::handle_capabilities_get(const std::string& name) const
{
    auto it = collections_.find(name);
    if (it == collections_.end())
        return text_response(404, "unknown collection '" + name + "'");
    auto snap = it->second.store->snapshot();
    Response r;
    r.content_type = kCapabilitiesMediaType;
    r.body = serialize_capabilities(collection_capabilities(*snap, it->second.tier));
    r.headers.emplace_back("Cache-Control", "public, max-age=60");
    return r;
}

Response FeedService::handle_feedset_capabilities(const std::string& name) const
{
    auto it = feedsets_.find(name);
    if (it == feedsets_.end())
        return text_response(404, "unknown feedset '" + name + "'");
    auto caps = full_capabilities({}, true);
    caps.tier = it->second.tier;
    Response r;
    r.content_type = kCapabilitiesMediaType;
    r.body = serialize_capabilities(caps);
    r.headers.emplace_back("Cache-Control", "public, max-age=60");
    return r;
}

Response FeedService::handle_feedset_query(const std::string& name, const Params& params,
    const std::optional<std::string>& key) const
{
    auto it = feedsets_.find(name);
    if (it == feedsets_.end())
        return text_response(404, "unknown feedset '" + name + "'");
    const auto& slot = it->second;
    if (slot.tier == Tier::keyed && !key_accepted(slot.keys, key))
        return unauthorized();

    Query q;
    try {
        q = parse_uri_params(params);
    } catch (const Error& e) {
        return text_response(400, e.what());
    }
    // An intermediary sees only feed-level data: no collection-scope selectors.
    auto intermediary = full_capabilities({}, true);
    if (auto unsupported = validate_against_capabilities(q, intermediary); !unsupported.empty())
        return rejected(unsupported);

    std::vector<FeedsetSource> sources;
    for (const auto& origin : slot.sources) {
        FeedsetSource s{origin, std::nullopt};
        try {
            s.capabilities = client_->discover(origin);
        } catch (const std::exception& e) {
            return text_response(502, "SourceUnavailable: " + origin + " (" + e.what() + ")");
        }
        // Keyed upstream query endpoints are out of reach without a key.
        if (s.capabilities && s.capabilities->tier == Tier::keyed)
            s.capabilities.reset();
        sources.push_back(std::move(s));
    }

    try {
        auto plan = plan_query(q, sources);
        auto execution = execute_plan(plan, *client_);
        return private_feed(embed_capability_link(std::move(execution.feed), "/feedsets/" + name + "/capabilities"));
    } catch (const SourceUnavailable& e) {
        return text_response(502, e.what());
    } catch (const Error& e) {
        return text_response(400, e.what());
    }
}

namespace {

void apply(const Response& r, httplib::Response& out)
{
    out.status = r.status;
    for (const auto& [k, v] : r.headers)
        out.set_header(k, v);
    if (r.status != 304)
        out.set_content(r.body, r.content_type.empty() ? "text/plain" : r.content_type);
}

Params to_params(const httplib::Request& req)
{
    Params out;
    for (const auto& [k, v] : req.params)
        out.emplace_back(k, v);
    return out;
}

std::optional<std::string> header_value(const httplib::Request& req, const char* name)
{
    if (!req.has_header(name))
        return std::nullopt;
    return req.get_header_value(name);
}

} // namespace

HttpServer::HttpServer(FeedService& service) : service_(service), server_(std::make_unique<httplib::Server>())
{
    auto& s = *server_;
    const std::string key_header(kKeyHeader);

    s.Get(R"(/feeds/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> page;
        if (req.has_param("page"))
            page = req.get_param_value("page");
        apply(service_.handle_feed_get(req.matches[1], page, header_value(req, "If-None-Match")), res);
    });
    s.Get(R"(/feeds/([^/]+)/archive/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        apply(service_.handle_archive_get(req.matches[1], req.matches[2], header_value(req, "If-None-Match")), res);
    });
    s.Get(R"(/feeds/([^/]+)/query)", [this, key_header](const httplib::Request& req, httplib::Response& res) {
        apply(service_.handle_query_get(req.matches[1], to_params(req), header_value(req, key_header.c_str())), res);
    });
    s.Get(R"(/feeds/([^/]+)/capabilities)", [this](const httplib::Request& req, httplib::Response& res) {
        apply(service_.handle_capabilities_get(req.matches[1]), res);
    });
    s.Get(R"(/feedsets/([^/]+)/query)", [this, key_header](const httplib::Request& req, httplib::Response& res) {
        apply(service_.handle_feedset_query(req.matches[1], to_params(req), header_value(req, key_header.c_str())), res);
    });
    s.Get(R"(/feedsets/([^/]+)/capabilities)", [this](const httplib::Request& req, httplib::Response& res) {
        apply(service_.handle_feedset_capabilities(req.matches[1]), res);
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0)
        return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop()
{
    if (server_)
        server_->stop();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

} // namespace feedql
