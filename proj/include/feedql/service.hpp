#pragma once

#include "feedql/aggregator.hpp"
#include "feedql/collection.hpp"
#include "feedql/config.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

namespace feedql {

inline constexpr std::string_view kAtomMediaType = "application/atom+xml";
inline constexpr std::string_view kCapabilitiesMediaType = "application/xml";

struct Response {
    int status = 200;
    std::string content_type = "text/plain";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;

    /// Empty when absent.
    std::string header(std::string_view name) const;
};

/// Strong validator derived from the body bytes.
std::string content_etag(std::string_view body);

/// Route handlers for the feed service, independent of the socket layer.
///
///   /feeds/{name}                 plain feed, ?page=N, public and cacheable
///   /feeds/{name}/archive/{i}     archived feed
///   /feeds/{name}/query           keyed query endpoint, private
///   /feeds/{name}/capabilities    capability document
///   /feedsets/{name}/query        aggregating query over configured sources
///   /feedsets/{name}/capabilities
class FeedService {
public:
    FeedService();
    ~FeedService();

    FeedService(const FeedService&) = delete;
    FeedService& operator=(const FeedService&) = delete;

    /// Loads every collection file named by the config. Throws
    /// Error(BadConfig) naming the collection and path on failure.
    static std::unique_ptr<FeedService> from_config(const ServiceConfig& config);

    void add_collection(Collection collection, Tier tier = Tier::open, std::vector<std::string> keys = {});
    void add_feedset(std::string name, std::vector<std::string> sources, Tier tier = Tier::open,
        std::vector<std::string> keys = {});

    /// Replaces the HTTP client used for feedset sources.
    void set_source_client(std::shared_ptr<SourceClient> client);

    /// nullptr for unknown names.
    CollectionStore* store(const std::string& name);

    Response handle_feed_get(const std::string& name, const std::optional<std::string>& page,
        const std::optional<std::string>& if_none_match = std::nullopt) const;
    Response handle_query_get(const std::string& name, const Params& params,
        const std::optional<std::string>& key) const;
    Response handle_archive_get(const std::string& name, const std::string& index,
        const std::optional<std::string>& if_none_match = std::nullopt) const;
    Response handle_capabilities_get(const std::string& name) const;
    Response handle_feedset_query(const std::string& name, const Params& params,
        const std::optional<std::string>& key) const;
    Response handle_feedset_capabilities(const std::string& name) const;

private:
    struct CollectionSlot {
        std::unique_ptr<CollectionStore> store;
        Tier tier = Tier::open;
        std::vector<std::string> keys;
    };

    struct FeedsetSlot {
        std::vector<std::string> sources;
        Tier tier = Tier::open;
        std::vector<std::string> keys;
    };

    std::map<std::string, CollectionSlot> collections_;
    std::map<std::string, FeedsetSlot> feedsets_;
    std::shared_ptr<SourceClient> client_;
};

/// Binds FeedService routes onto a cpp-httplib server.
class HttpServer {
public:
    explicit HttpServer(FeedService& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds without serving yet; port 0 picks a free port. Returns the bound
    /// port or -1.
    int bind(const std::string& host, int port);

    /// Serves until stop(); call after bind().
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    FeedService& service_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace feedql
