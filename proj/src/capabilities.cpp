#include "feedql/capabilities.hpp"

#include "feedql/error.hpp"

#include <algorithm>
#include <charconv>

namespace feedql {

std::string_view to_string(Scope scope) { return scope == Scope::feed ? "feed" : "collection"; }

std::string_view to_string(Tier tier) { return tier == Tier::open ? "open" : "keyed"; }

bool Capabilities::supports_selector(const Selector& selector) const
{
    for (const auto& s : selectors) {
        if (selector.is_collection_scoped()) {
            if (s.scope == Scope::collection && s.selector == selector)
                return true;
            continue;
        }
        if (s.selector == selector)
            return true;
        if (selector.ns == Selector::Namespace::link && s.selector.ns == Selector::Namespace::link
            && s.selector.path == "*")
            return true;
    }
    return false;
}

bool Capabilities::supports_operator(Op op) const
{
    return std::find(operators.begin(), operators.end(), op_name(op)) != operators.end();
}

bool Capabilities::supports_function(std::string_view name, int arity) const
{
    return std::any_of(functions.begin(), functions.end(),
        [&](const FunctionCapability& f) { return f.name == name && f.arity == arity; });
}

bool Capabilities::supports_shaping(std::string_view name) const
{
    return std::find(shaping.begin(), shaping.end(), name) != shaping.end();
}

Capabilities full_capabilities(const std::vector<std::string>& hidden_fields, bool cross_feed)
{
    Capabilities caps;
    for (const char* path : {"id", "title", "summary", "content", "category", "author.name", "author.email",
             "author.uri", "updated", "published"})
        caps.selectors.push_back({Selector::atom(path), Scope::feed});
    caps.selectors.push_back({Selector::position(), Scope::feed});
    caps.selectors.push_back({Selector::link("*"), Scope::feed});
    for (const auto& field : hidden_fields)
        caps.selectors.push_back({Selector::hidden(field), Scope::collection});
    for (Op op : kAllOps)
        caps.operators.emplace_back(op_name(op));
    caps.functions = {{"window", 2}, {"cluster", 2}};
    if (cross_feed) {
        caps.functions.push_back({"cooccur", 3});
        caps.functions.push_back({"cooccur", 4});
    }
    caps.shaping = {"sort-by", "order", "group-by", "max-results", "start-index"};
    return caps;
}

std::string serialize_capabilities(const Capabilities& caps)
{
    xml::Writer w;
    w.raw("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    w.start("capabilities").attribute("xmlns", kCapabilitiesNs);
    for (const auto& s : caps.selectors)
        w.start("selector").attribute("name", s.selector.to_string()).attribute("scope", to_string(s.scope)).end();
    for (const auto& op : caps.operators)
        w.start("operator").attribute("name", op).end();
    for (const auto& f : caps.functions)
        w.start("function").attribute("name", f.name).attribute("arity", std::to_string(f.arity)).end();
    for (const auto& s : caps.shaping)
        w.start("shaping").attribute("name", s).end();
    w.element("tier", to_string(caps.tier));
    return w.finish();
}

namespace {

const std::string& required_attribute(const xml::Node& n, std::string_view name)
{
    const auto* v = n.attribute(name);
    if (!v)
        throw Error(ErrorCode::MalformedXml, "<" + n.name + "> lacks attribute '" + std::string(name) + "'");
    return *v;
}

Selector capability_selector(const std::string& name)
{
    if (name == "link(*).href")
        return Selector::link("*");
    try {
        return parse_selector(name);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedXml, "selector '" + name + "': " + e.detail());
    }
}

} // namespace

Capabilities parse_capabilities(std::string_view document)
{
    xml::Node root = xml::parse(document);
    if (!root.is_element(kCapabilitiesNs, "capabilities"))
        throw Error(ErrorCode::MalformedXml, "root element is not a capabilities document");
    Capabilities caps;
    for (const auto& c : root.children) {
        if (c.kind != xml::Node::Kind::element || c.ns != kCapabilitiesNs)
            continue;
        if (c.name == "selector") {
            SelectorCapability s;
            s.selector = capability_selector(required_attribute(c, "name"));
            const auto& scope = required_attribute(c, "scope");
            if (scope == "feed")
                s.scope = Scope::feed;
            else if (scope == "collection")
                s.scope = Scope::collection;
            else
                throw Error(ErrorCode::UnknownScope, "'" + scope + "' for selector " + s.selector.to_string());
            if (s.scope == Scope::collection && !s.selector.is_collection_scoped())
                throw Error(ErrorCode::UnknownScope, "collection scope on non-collection selector " + s.selector.to_string());
            caps.selectors.push_back(std::move(s));
        } else if (c.name == "operator") {
            caps.operators.push_back(required_attribute(c, "name"));
        } else if (c.name == "function") {
            FunctionCapability f;
            f.name = required_attribute(c, "name");
            const auto& arity = required_attribute(c, "arity");
            auto res = std::from_chars(arity.data(), arity.data() + arity.size(), f.arity);
            if (res.ec != std::errc{} || res.ptr != arity.data() + arity.size() || f.arity < 0)
                throw Error(ErrorCode::MalformedXml, "function arity '" + arity + "' is not an integer");
            caps.functions.push_back(std::move(f));
        } else if (c.name == "shaping") {
            caps.shaping.push_back(required_attribute(c, "name"));
        } else if (c.name == "tier") {
            auto tier = c.text_content();
            if (tier == "open")
                caps.tier = Tier::open;
            else if (tier == "keyed")
                caps.tier = Tier::keyed;
            else
                throw Error(ErrorCode::MalformedXml, "unknown tier '" + tier + "'");
        }
    }
    return caps;
}

Feed embed_capability_link(Feed feed, const std::string& caps_uri)
{
    std::erase_if(feed.links, [](const Link& l) { return l.rel == kCapabilitiesRel; });
    feed.links.push_back(Link{caps_uri, std::string(kCapabilitiesRel), std::string("application/xml")});
    return feed;
}

std::optional<std::string> discover_from_feed(const Feed& feed)
{
    for (const auto& l : feed.links)
        if (l.rel == kCapabilitiesRel)
            return l.href;
    return std::nullopt;
}

} // namespace feedql
