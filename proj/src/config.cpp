#include "feedql/config.hpp"

#include "feedql/error.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace feedql {

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::string current;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!current.empty())
                out.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty())
        out.push_back(std::move(current));
    return out;
}

[[noreturn]] void fail(std::size_t line, std::string_view key, const std::string& what)
{
    throw Error(ErrorCode::BadConfig, "line " + std::to_string(line) + ": key '" + std::string(key) + "': " + what);
}

std::size_t positive(std::size_t line, std::string_view key, const std::string& value)
{
    std::size_t v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || v < 1)
        fail(line, key, "expected an integer >= 1, got '" + value + "'");
    return v;
}

Tier tier_value(std::size_t line, std::string_view key, const std::string& value)
{
    if (value == "open")
        return Tier::open;
    if (value == "keyed")
        return Tier::keyed;
    fail(line, key, "expected open or keyed, got '" + value + "'");
}

} // namespace

ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    ServiceConfig cfg;
    enum class Section { global, collection, feedset } section = Section::global;
    std::set<std::string> names;
    std::vector<std::size_t> collection_lines, feedset_lines;

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(line_no, line, "unterminated section header");
            auto header = trim(std::string_view(line).substr(1, line.size() - 2));
            auto space = header.find(' ');
            auto kind = header.substr(0, space);
            auto name = space == std::string::npos ? std::string() : trim(std::string_view(header).substr(space + 1));
            if (name.empty() || name.find('/') != std::string::npos)
                fail(line_no, kind, "section needs a name without '/'");
            if (kind == "collection") {
                section = Section::collection;
                cfg.collections.push_back({});
                cfg.collections.back().name = name;
                collection_lines.push_back(line_no);
            } else if (kind == "feedset") {
                section = Section::feedset;
                cfg.feedsets.push_back({});
                cfg.feedsets.back().name = name;
                feedset_lines.push_back(line_no);
            } else {
                fail(line_no, kind, "unknown section kind");
            }
            if (!names.insert(kind + " " + name).second)
                fail(line_no, kind, "duplicate " + kind + " name '" + name + "'");
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, line, "expected key = value");
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));

        switch (section) {
        case Section::global:
            if (key == "bind") {
                auto colon = value.rfind(':');
                if (colon == std::string::npos)
                    fail(line_no, key, "expected host:port");
                cfg.host = value.substr(0, colon);
                auto port_text = value.substr(colon + 1);
                int port = -1;
                auto res = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
                if (res.ec != std::errc{} || res.ptr != port_text.data() + port_text.size() || port < 0 || port > 65535)
                    fail(line_no, key, "bad port '" + port_text + "'");
                cfg.port = port;
            } else {
                fail(line_no, key, "unknown key outside a section");
            }
            break;
        case Section::collection: {
            auto& c = cfg.collections.back();
            if (key == "atom")
                c.atom = resolve(value);
            else if (key == "hidden")
                c.hidden = resolve(value);
            else if (key == "page_size")
                c.page_size = positive(line_no, key, value);
            else if (key == "archive_size")
                c.archive_size = positive(line_no, key, value);
            else if (key == "tier")
                c.tier = tier_value(line_no, key, value);
            else if (key == "keys")
                c.keys = split_list(value);
            else
                fail(line_no, key, "unknown key in [collection " + c.name + "]");
            break;
        }
        case Section::feedset: {
            auto& f = cfg.feedsets.back();
            if (key == "sources")
                f.sources = split_list(value);
            else if (key == "tier")
                f.tier = tier_value(line_no, key, value);
            else if (key == "keys")
                f.keys = split_list(value);
            else
                fail(line_no, key, "unknown key in [feedset " + f.name + "]");
            break;
        }
        }
    }

    for (std::size_t i = 0; i < cfg.collections.size(); ++i) {
        const auto& c = cfg.collections[i];
        auto line = collection_lines[i];
        if (c.atom.empty())
            fail(line, "atom", "collection '" + c.name + "' needs an atom file");
        if (c.tier == Tier::keyed && c.keys.empty())
            fail(line, "keys", "keyed collection '" + c.name + "' needs at least one key");
    }
    for (std::size_t i = 0; i < cfg.feedsets.size(); ++i) {
        const auto& f = cfg.feedsets[i];
        auto line = feedset_lines[i];
        if (f.sources.empty())
            fail(line, "sources", "feedset '" + f.name + "' needs sources");
        if (f.tier == Tier::keyed && f.keys.empty())
            fail(line, "keys", "keyed feedset '" + f.name + "' needs at least one key");
    }
    return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::BadConfig, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

} // namespace feedql
