#include "feedql/url.hpp"

#include <charconv>

namespace feedql {

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

std::string Url::to_string() const { return origin() + target; }

std::optional<Url> parse_url(std::string_view text)
{
    Url u;
    auto sep = text.find("://");
    if (sep == std::string_view::npos)
        return std::nullopt;
    u.scheme = std::string(text.substr(0, sep));
    if (u.scheme != "http" && u.scheme != "https")
        return std::nullopt;
    u.port = u.scheme == "https" ? 443 : 80;
    auto rest = text.substr(sep + 3);
    auto slash = rest.find_first_of("/?");
    auto authority = rest.substr(0, slash);
    u.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    if (u.target.front() == '?')
        u.target.insert(0, "/");
    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        auto port_text = authority.substr(colon + 1);
        int port = 0;
        auto res = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (res.ec != std::errc{} || res.ptr != port_text.data() + port_text.size() || port <= 0 || port > 65535)
            return std::nullopt;
        u.port = port;
        authority = authority.substr(0, colon);
    }
    if (authority.empty())
        return std::nullopt;
    u.host = std::string(authority);
    return u;
}

std::string resolve_href(const std::string& base, const std::string& href)
{
    if (href.find("://") != std::string::npos)
        return href;
    auto b = parse_url(base);
    if (!b)
        return href;
    if (href.starts_with("//"))
        return b->scheme + ":" + href;
    if (href.starts_with("/"))
        return b->origin() + href;
    std::string path = b->target.substr(0, b->target.find('?'));
    if (href.starts_with("?"))
        return b->origin() + path + href;
    auto dir = path.substr(0, path.rfind('/') + 1);
    return b->origin() + dir + href;
}

} // namespace feedql
