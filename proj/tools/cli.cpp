#include "cli.hpp"

#include "feedql/aggregator.hpp"
#include "feedql/config.hpp"
#include "feedql/error.hpp"
#include "feedql/http_fetcher.hpp"
#include "feedql/service.hpp"
#include "feedql/url.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

namespace feedql::cli {

namespace {

struct Failure {
    int code;
    std::string message;
};

struct QueryFlags {
    std::string q, xq, sort_by, order, group_by, max_results, start_index;

    void attach(CLI::App& app)
    {
        app.add_option("--q", q, "filter expression");
        app.add_option("--xq", xq, "cross-entry functions");
        app.add_option("--sort-by", sort_by, "sort key");
        app.add_option("--order", order, "asc or desc");
        app.add_option("--group-by", group_by, "grouping selector");
        app.add_option("--max-results", max_results, "page length");
        app.add_option("--start-index", start_index, "1-based offset");
    }

    Params params() const
    {
        Params p;
        auto put = [&](const char* name, const std::string& v) {
            if (!v.empty())
                p.emplace_back(name, v);
        };
        put("q", q);
        put("xq", xq);
        put("sort-by", sort_by);
        put("order", order);
        put("group-by", group_by);
        put("max-results", max_results);
        put("start-index", start_index);
        return p;
    }
};

HttpResponse get_ok(const std::string& url, const Params& params = {},
    const std::multimap<std::string, std::string>& headers = {})
{
    HttpResponse r;
    try {
        r = http_get(url, params, headers);
    } catch (const Error& e) {
        throw Failure{transport, e.what()};
    }
    if (r.status < 200 || r.status >= 300) {
        std::string body = r.body;
        while (!body.empty() && body.back() == '\n')
            body.pop_back();
        throw Failure{rejected, "HTTP " + std::to_string(r.status) + " from " + url + (body.empty() ? "" : ": " + body)};
    }
    return r;
}

Feed feed_from(const std::string& body, const std::string& url)
{
    try {
        return parse_feed(body);
    } catch (const Error& e) {
        throw Failure{rejected, url + ": " + e.what()};
    }
}

/// nullopt when the feed advertises no capabilities.
std::optional<Capabilities> discover_caps(const std::string& url)
{
    Feed feed = feed_from(get_ok(url).body, url);
    auto href = discover_from_feed(feed);
    if (!href)
        return std::nullopt;
    auto caps_url = resolve_href(url, *href);
    auto doc = get_ok(caps_url);
    try {
        return parse_capabilities(doc.body);
    } catch (const Error& e) {
        throw Failure{rejected, caps_url + ": " + e.what()};
    }
}

Query parse_local(const Params& params)
{
    try {
        return parse_uri_params(params);
    } catch (const Error& e) {
        throw Failure{rejected, e.what()};
    }
}

void reject_unsupported(const std::vector<Unsupported>& unsupported)
{
    if (unsupported.empty())
        return;
    std::string msg;
    for (const auto& u : unsupported)
        msg += (msg.empty() ? "" : "\n") + u.to_string();
    throw Failure{rejected, msg};
}

const Link* find_link(const Feed& feed, std::string_view rel)
{
    for (const auto& l : feed.links)
        if (l.rel == rel)
            return &l;
    return nullptr;
}

void cmd_fetch(const std::string& url, bool follow, std::ostream& out)
{
    auto body = get_ok(url).body;
    Feed head = feed_from(body, url);
    if (!follow) {
        out << body;
        if (!body.empty() && body.back() != '\n')
            out << '\n';
        return;
    }
    std::map<std::string, Entry> latest;
    std::vector<std::string> order;
    std::set<std::string> visited{url};
    auto absorb = [&](const Feed& f) {
        for (const auto& e : f.entries) {
            auto [it, fresh] = latest.try_emplace(e.id, e);
            if (fresh)
                order.push_back(e.id);
            else if (e.updated > it->second.updated)
                it->second = e;
        }
    };
    absorb(head);
    std::string at = url;
    const Feed* current = &head;
    Feed archive;
    while (const Link* prev = find_link(*current, "prev-archive")) {
        auto next_url = resolve_href(at, prev->href);
        if (!visited.insert(next_url).second)
            break;
        archive = feed_from(get_ok(next_url).body, next_url);
        absorb(archive);
        at = next_url;
        current = &archive;
    }
    Feed merged = head;
    merged.entries.clear();
    std::erase_if(merged.links, [](const Link& l) { return l.rel == "prev-archive" || l.rel == "next-archive"; });
    for (const auto& id : order) {
        merged.entries.push_back(latest.at(id));
        merged.updated = std::max(merged.updated, merged.entries.back().updated);
    }
    out << serialize_feed(merged);
}

void cmd_discover(const std::string& url, std::ostream& out)
{
    auto caps = discover_caps(url);
    if (!caps) {
        out << "no query capabilities\n";
        return;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& s : caps->selectors)
        rows.emplace_back("selector", s.selector.to_string() + "  " + std::string(to_string(s.scope)));
    for (const auto& o : caps->operators)
        rows.emplace_back("operator", o);
    for (const auto& f : caps->functions)
        rows.emplace_back("function", f.name + "/" + std::to_string(f.arity));
    for (const auto& s : caps->shaping)
        rows.emplace_back("shaping", s);
    rows.emplace_back("tier", std::string(to_string(caps->tier)));
    for (const auto& [kind, what] : rows)
        out << kind << std::string(10 - kind.size(), ' ') << what << '\n';
}

void cmd_query(const std::string& url, const QueryFlags& flags, const std::string& key, std::ostream& out)
{
    auto params = flags.params();
    Query q = parse_local(params);
    auto caps = discover_caps(url);
    if (!caps)
        throw Failure{rejected, url + ": no query capabilities"};
    reject_unsupported(validate_against_capabilities(q, *caps));

    std::multimap<std::string, std::string> headers;
    if (!key.empty())
        headers.emplace(std::string(kKeyHeader), key);
    auto target = url;
    while (!target.empty() && target.back() == '/')
        target.pop_back();
    out << get_ok(target + "/query", params, headers).body;
}

void cmd_aggregate(const std::vector<std::string>& origins, const QueryFlags& flags, bool partial,
    std::ostream& out, std::ostream& err)
{
    Query q = parse_local(flags.params());
    reject_unsupported(validate_against_capabilities(q, full_capabilities({}, true)));

    HttpFetcher client;
    std::vector<FeedsetSource> sources;
    for (const auto& origin : origins) {
        FeedsetSource s{origin, std::nullopt};
        try {
            s.capabilities = client.discover(origin);
        } catch (const std::exception& e) {
            // A partial run lets execution skip and report it.
            if (!partial)
                throw Failure{transport, "SourceUnavailable: " + origin + " (" + e.what() + ")"};
        }
        if (s.capabilities && s.capabilities->tier == Tier::keyed)
            s.capabilities.reset();
        sources.push_back(std::move(s));
    }

    ExecuteOptions options;
    options.partial = partial;
    options.on_skipped = [&err](const std::string& origin, const std::string& reason) {
        err << "warning: skipped " << origin << " (" << reason << "); result is partial\n";
    };
    try {
        auto plan = plan_query(q, sources);
        out << serialize_feed(execute_plan(plan, client, {}, options).feed);
    } catch (const SourceUnavailable& e) {
        throw Failure{transport, e.what()};
    } catch (const Error& e) {
        throw Failure{rejected, e.what()};
    }
}

void cmd_serve(const std::string& config_path, std::ostream& out, const ServeHook& on_bound)
{
    std::unique_ptr<FeedService> service;
    ServiceConfig config;
    try {
        config = load_config(config_path);
        service = FeedService::from_config(config);
    } catch (const Error& e) {
        throw Failure{usage, e.what()};
    }
    HttpServer server(*service);
    int port = server.bind(config.host, config.port);
    if (port < 0)
        throw Failure{transport, "cannot bind " + config.host + ":" + std::to_string(config.port)};
    out << "listening on http://" << config.host << ":" << port << std::endl;
    if (on_bound)
        on_bound(server);
    server.listen();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const ServeHook& on_bound)
{
    CLI::App app{"Query-enabled Atom feed client and server", "feedql"};
    app.require_subcommand(1);

    std::string url, config_path, key;
    bool follow = false, partial = false;
    std::vector<std::string> origins;
    QueryFlags flags;

    auto* fetch = app.add_subcommand("fetch", "print a feed");
    fetch->add_option("url", url, "feed URL")->required();
    fetch->add_flag("--follow-archives", follow, "merge the complete archive history");

    auto* discover = app.add_subcommand("discover", "show a feed's query capabilities");
    discover->add_option("url", url, "feed URL")->required();

    auto* query = app.add_subcommand("query", "query a feed");
    query->add_option("url", url, "feed URL")->required();
    flags.attach(*query);
    query->add_option("--key", key, "API key for keyed endpoints");

    auto* aggregate = app.add_subcommand("aggregate", "query several feeds as one feedset");
    aggregate->add_option("--source", origins, "source feed URL")->required();
    flags.attach(*aggregate);
    aggregate->add_flag("--partial", partial, "skip unreachable sources (lossy)");

    auto* serve = app.add_subcommand("serve", "run the feed service");
    serve->add_option("--config", config_path, "service configuration file")->required();

    std::vector<std::string> argv_storage{"feedql"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? ok : usage;
    }

    try {
        if (*fetch)
            cmd_fetch(url, follow, out);
        else if (*discover)
            cmd_discover(url, out);
        else if (*query)
            cmd_query(url, flags, key, out);
        else if (*aggregate)
            cmd_aggregate(origins, flags, partial, out, err);
        else if (*serve)
            cmd_serve(config_path, out, on_bound);
    } catch (const Failure& f) {
        err << "feedql: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        err << "feedql: " << e.what() << '\n';
        return transport;
    }
    return ok;
}

} // namespace feedql::cli
