#pragma once

#include "feedql/aggregator.hpp"

#include <map>
#include <optional>
#include <string>

namespace feedql {

inline constexpr std::string_view kKeyHeader = "X-FeedQL-Key";

struct HttpResponse {
    int status = 0;
    std::string body;
    std::multimap<std::string, std::string> headers;

    std::string header(const std::string& name) const;
};

/// Blocking GET. Throws Error(Transport) when no response arrives.
HttpResponse http_get(const std::string& url, const Params& params = {},
    const std::multimap<std::string, std::string>& headers = {});

/// Fetcher that talks to feed services: plain fetches GET the origin, pushed
/// queries GET `<origin>/query`.
class HttpFetcher : public SourceClient {
public:
    explicit HttpFetcher(std::optional<std::string> key = std::nullopt) : key_(std::move(key)) {}

    Feed fetch(const std::string& origin, const Params& params) override;

    /// Fetches the feed, follows its capability link and parses the document.
    /// nullopt when the feed advertises nothing or the document is unusable.
    /// Throws when the feed itself cannot be fetched.
    std::optional<Capabilities> discover(const std::string& origin) override;

private:
    std::optional<std::string> key_;
};

} // namespace feedql
