#include "feedql/http_fetcher.hpp"

#include "feedql/error.hpp"
#include "feedql/url.hpp"

#include <httplib.h>

#include <cctype>

namespace feedql {

std::string HttpResponse::header(const std::string& name) const
{
    auto lower = [](std::string s) {
        for (auto& c : s)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    for (const auto& [k, v] : headers)
        if (lower(k) == lower(name))
            return v;
    return {};
}

HttpResponse http_get(const std::string& url, const Params& params, const std::multimap<std::string, std::string>& headers)
{
    auto parsed = parse_url(url);
    if (!parsed)
        throw Error(ErrorCode::Transport, "not an http URL: " + url);
    if (parsed->scheme != "http")
        throw Error(ErrorCode::Transport, "only plain http is supported: " + url);

    httplib::Client client(parsed->host, parsed->port);
    client.set_connection_timeout(3, 0);
    client.set_read_timeout(15, 0);

    std::string target = parsed->target;
    if (!params.empty()) {
        httplib::Params p;
        for (const auto& [k, v] : params)
            p.emplace(k, v);
        target += (target.find('?') == std::string::npos ? "?" : "&") + httplib::detail::params_to_query_str(p);
    }
    httplib::Headers h(headers.begin(), headers.end());
    auto res = client.Get(target, h);
    if (!res)
        throw Error(ErrorCode::Transport, url + ": " + httplib::to_string(res.error()));

    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    out.headers.insert(res->headers.begin(), res->headers.end());
    return out;
}

Feed HttpFetcher::fetch(const std::string& origin, const Params& params)
{
    std::multimap<std::string, std::string> headers;
    std::string url = origin;
    if (!params.empty()) {
        url += "/query";
        if (key_)
            headers.emplace(std::string(kKeyHeader), *key_);
    }
    auto res = http_get(url, params, headers);
    if (res.status < 200 || res.status >= 300)
        throw Error(ErrorCode::HttpStatus, url + " answered " + std::to_string(res.status));
    return parse_feed(res.body);
}

std::optional<Capabilities> HttpFetcher::discover(const std::string& origin)
{
    Feed feed = fetch(origin, {});
    auto href = discover_from_feed(feed);
    if (!href)
        return std::nullopt;
    try {
        auto res = http_get(resolve_href(origin, *href));
        if (res.status != 200)
            return std::nullopt;
        return parse_capabilities(res.body);
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace feedql
