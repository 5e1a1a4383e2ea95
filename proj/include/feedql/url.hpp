#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace feedql {

/// http(s) URL split the way the HTTP client needs it.
struct Url {
    std::string scheme;
    std::string host;
    int port = 80;
    std::string target = "/"; // path plus optional query

    /// scheme://host:port
    std::string origin() const;
    std::string to_string() const;
};

std::optional<Url> parse_url(std::string_view text);

/// Resolves an href found in a document fetched from `base`. Handles
/// absolute URLs, absolute paths, query-only and relative references.
std::string resolve_href(const std::string& base, const std::string& href);

} // namespace feedql
