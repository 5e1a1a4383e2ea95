#include "feedql/atom.hpp"
#include "feedql/error.hpp"

#include <charconv>
#include <map>

namespace feedql {

namespace {

constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

const std::string* attr(const xml::Node& n, std::string_view name) { return n.attribute(name); }

std::optional<std::string> opt_attr(const xml::Node& n, std::string_view name)
{
    if (const auto* v = attr(n, name))
        return *v;
    return std::nullopt;
}

Timestamp required_time(const xml::Node& n, std::string_view where)
{
    auto text = n.text_content();
    auto trimmed_begin = text.find_first_not_of(" \t\r\n");
    auto trimmed_end = text.find_last_not_of(" \t\r\n");
    std::string_view v;
    if (trimmed_begin != std::string::npos)
        v = std::string_view(text).substr(trimmed_begin, trimmed_end - trimmed_begin + 1);
    auto ts = Timestamp::parse(v);
    if (!ts)
        throw Error(ErrorCode::MissingRequired, std::string(where) + " is not an RFC 3339 timestamp: '" + text + "'");
    return *ts;
}

std::string trimmed(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Person parse_person(const xml::Node& n)
{
    Person p;
    for (const auto& c : n.children) {
        if (c.kind != xml::Node::Kind::element || c.ns != kAtomNs)
            continue;
        if (c.name == "name")
            p.name = c.text_content();
        else if (c.name == "email")
            p.email = c.text_content();
        else if (c.name == "uri")
            p.uri = c.text_content();
    }
    return p;
}

Category parse_category(const xml::Node& n)
{
    Category c;
    if (const auto* t = attr(n, "term"))
        c.term = *t;
    c.scheme = opt_attr(n, "scheme");
    c.label = opt_attr(n, "label");
    return c;
}

Link parse_link(const xml::Node& n)
{
    Link l;
    if (const auto* h = attr(n, "href"))
        l.href = *h;
    if (const auto* r = attr(n, "rel"))
        l.rel = *r;
    l.type = opt_attr(n, "type");
    return l;
}

std::optional<GeoShape::Kind> geo_kind(std::string_view name)
{
    if (name == "point")
        return GeoShape::Kind::point;
    if (name == "line")
        return GeoShape::Kind::line;
    if (name == "polygon")
        return GeoShape::Kind::polygon;
    if (name == "box")
        return GeoShape::Kind::box;
    return std::nullopt;
}

GeoShape parse_geo(GeoShape::Kind kind, const std::string& text)
{
    std::vector<double> numbers;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::string_view(" \t\r\n,").find(text[pos]) != std::string_view::npos)
            ++pos;
        if (pos >= text.size())
            break;
        auto end = text.find_first_of(" \t\r\n,", pos);
        if (end == std::string::npos)
            end = text.size();
        double value = 0;
        const char* first = text.data() + pos;
        const char* last = text.data() + end;
        if (*first == '+')
            ++first;
        auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc{} || res.ptr != last)
            throw Error(ErrorCode::BadGeo, "not a number: '" + text.substr(pos, end - pos) + "'");
        numbers.push_back(value);
        pos = end;
    }
    if (numbers.size() % 2 != 0)
        throw Error(ErrorCode::BadGeo, "odd number of coordinates in georss:" + std::string(to_string(kind)));
    GeoShape shape{kind, {}};
    for (std::size_t i = 0; i < numbers.size(); i += 2)
        shape.coords.push_back({numbers[i], numbers[i + 1]});
    if (kind == GeoShape::Kind::polygon && shape.coords.size() > 1 && shape.coords.front() == shape.coords.back())
        shape.coords.pop_back();
    if (auto problem = shape_problem(shape))
        throw Error(ErrorCode::BadGeo, *problem + " in georss:" + std::string(to_string(kind)) + " '" + text + "'");
    return shape;
}

Extension to_extension(const xml::Node& n)
{
    return Extension{n.ns, n.name, n.text_content(), n.attributes};
}

Content parse_content(const xml::Node& n)
{
    Content c;
    if (const auto* t = attr(n, "type"))
        c.type = *t;
    c.src = opt_attr(n, "src");
    if (c.is_markup()) {
        for (const auto& child : n.children)
            if (child.kind == xml::Node::Kind::element)
                c.value += xml::to_markup(child);
    } else {
        c.value = n.text_content();
    }
    return c;
}

Entry parse_entry(const xml::Node& n)
{
    Entry e;
    bool have_id = false, have_title = false, have_updated = false;
    for (const auto& c : n.children) {
        if (c.kind != xml::Node::Kind::element)
            continue;
        if (c.ns == kAtomNs) {
            if (c.name == "id" && !have_id) {
                e.id = trimmed(c.text_content());
                have_id = true;
            } else if (c.name == "title" && !have_title) {
                e.title = c.text_content();
                have_title = true;
            } else if (c.name == "updated" && !have_updated) {
                e.updated = required_time(c, "entry updated");
                have_updated = true;
            } else if (c.name == "published" && !e.published) {
                e.published = required_time(c, "entry published");
            } else if (c.name == "author") {
                e.authors.push_back(parse_person(c));
            } else if (c.name == "category") {
                e.categories.push_back(parse_category(c));
            } else if (c.name == "link") {
                e.links.push_back(parse_link(c));
            } else if (c.name == "summary" && !e.summary) {
                e.summary = c.text_content();
            } else if (c.name == "content" && !e.content) {
                e.content = parse_content(c);
            } else {
                e.extensions.push_back(to_extension(c));
            }
        } else if (c.ns == kGeoRssNs && geo_kind(c.name) && !e.geo) {
            e.geo = parse_geo(*geo_kind(c.name), c.text_content());
        } else if (c.ns == kFeedsetNs && c.name == "origin" && !e.origin) {
            const auto* href = attr(c, "href");
            e.origin = href ? *href : trimmed(c.text_content());
        } else if (c.ns == kFeedsetNs && c.name == "group" && !e.group) {
            e.group = c.text_content();
        } else {
            e.extensions.push_back(to_extension(c));
        }
    }
    std::string which = have_id ? "entry '" + e.id + "'" : "entry";
    if (!have_id)
        throw Error(ErrorCode::MissingRequired, which + " lacks atom:id");
    if (!have_title)
        throw Error(ErrorCode::MissingRequired, which + " lacks atom:title");
    if (!have_updated)
        throw Error(ErrorCode::MissingRequired, which + " lacks atom:updated");
    return e;
}

} // namespace

Feed parse_feed(std::string_view document, ParseMode mode)
{
    xml::Node root = xml::parse(document);
    if (!root.is_element(kAtomNs, "feed"))
        throw Error(ErrorCode::MalformedXml, "root element is not atom:feed");

    Feed f;
    bool have_id = false, have_title = false, have_updated = false;
    for (const auto& c : root.children) {
        if (c.kind != xml::Node::Kind::element)
            continue;
        if (c.ns == kAtomNs) {
            if (c.name == "id" && !have_id) {
                f.id = trimmed(c.text_content());
                have_id = true;
            } else if (c.name == "title" && !have_title) {
                f.title = c.text_content();
                have_title = true;
            } else if (c.name == "updated" && !have_updated) {
                f.updated = required_time(c, "feed updated");
                have_updated = true;
            } else if (c.name == "link") {
                f.links.push_back(parse_link(c));
            } else if (c.name == "author") {
                f.authors.push_back(parse_person(c));
            } else if (c.name == "entry") {
                f.entries.push_back(parse_entry(c));
            } else {
                f.extensions.push_back(to_extension(c));
            }
        } else {
            f.extensions.push_back(to_extension(c));
        }
    }
    if (!have_id)
        throw Error(ErrorCode::MissingRequired, "feed lacks atom:id");
    if (!have_title)
        throw Error(ErrorCode::MissingRequired, "feed lacks atom:title");
    if (!have_updated)
        throw Error(ErrorCode::MissingRequired, "feed lacks atom:updated");

    if (mode == ParseMode::strict) {
        auto violations = validate_feed(f);
        if (!violations.empty())
            throw Error(ErrorCode::InvariantViolation, violations.front().subject + ": " + violations.front().rule);
    }
    return f;
}

namespace {

class Prefixes {
public:
    Prefixes()
    {
        map_.emplace(std::string(kAtomNs), "");
        map_.emplace(std::string(kGeoRssNs), "georss");
        map_.emplace(std::string(kFeedsetNs), "fs");
        map_.emplace(std::string(kXmlNs), "xml");
    }

    void note(const std::string& ns)
    {
        if (ns.empty() || map_.count(ns))
            return;
        std::string prefix = "x" + std::to_string(extra_.size() + 1);
        map_.emplace(ns, prefix);
        extra_.emplace_back(ns, prefix);
    }

    void note_all(const std::vector<Extension>& exts)
    {
        for (const auto& x : exts) {
            note(x.ns);
            for (const auto& a : x.attributes)
                note(a.ns);
        }
    }

    std::string qualify(const std::string& ns, const std::string& local) const
    {
        if (ns.empty())
            return local;
        const auto& prefix = map_.at(ns);
        return prefix.empty() ? local : prefix + ":" + local;
    }

    const std::vector<std::pair<std::string, std::string>>& extra() const { return extra_; }

private:
    std::map<std::string, std::string> map_;
    std::vector<std::pair<std::string, std::string>> extra_;
};

void write_person(xml::Writer& w, const Person& p)
{
    w.start("author");
    w.element("name", p.name);
    if (p.email)
        w.element("email", *p.email);
    if (p.uri)
        w.element("uri", *p.uri);
    w.end();
}

void write_link(xml::Writer& w, const Link& l)
{
    w.start("link").attribute("rel", l.rel).attribute("href", l.href);
    if (l.type)
        w.attribute("type", *l.type);
    w.end();
}

void write_extension(xml::Writer& w, const Prefixes& prefixes, const Extension& x)
{
    w.start(prefixes.qualify(x.ns, x.name));
    if (x.ns.empty())
        w.attribute("xmlns", "");
    for (const auto& a : x.attributes)
        w.attribute(prefixes.qualify(a.ns, a.name), a.value);
    if (!x.value.empty())
        w.text(x.value);
    w.end();
}

void write_entry(xml::Writer& w, const Prefixes& prefixes, const Entry& e)
{
    w.start("entry");
    w.element("id", e.id);
    w.element("title", e.title);
    w.element("updated", e.updated.to_string());
    if (e.published)
        w.element("published", e.published->to_string());
    for (const auto& a : e.authors)
        write_person(w, a);
    for (const auto& c : e.categories) {
        w.start("category").attribute("term", c.term);
        if (c.scheme)
            w.attribute("scheme", *c.scheme);
        if (c.label)
            w.attribute("label", *c.label);
        w.end();
    }
    for (const auto& l : e.links)
        write_link(w, l);
    if (e.summary)
        w.element("summary", *e.summary);
    if (e.content) {
        const auto& c = *e.content;
        w.start("content").attribute("type", c.type);
        if (c.src)
            w.attribute("src", *c.src);
        if (c.is_markup())
            w.raw(c.value);
        else if (!c.value.empty())
            w.text(c.value);
        w.end();
    }
    if (e.geo) {
        auto coords = e.geo->coords;
        if (e.geo->kind == GeoShape::Kind::polygon && !coords.empty())
            coords.push_back(coords.front());
        w.element("georss:" + std::string(to_string(e.geo->kind)), format_coords(coords));
    }
    if (e.origin)
        w.start("fs:origin").attribute("href", *e.origin).end();
    if (e.group)
        w.element("fs:group", *e.group);
    for (const auto& x : e.extensions)
        write_extension(w, prefixes, x);
    w.end();
}

} // namespace

std::string serialize_feed(const Feed& feed)
{
    auto violations = validate_feed(feed);
    if (!violations.empty())
        throw Error(ErrorCode::InvariantViolation, violations.front().subject + ": " + violations.front().rule);

    Prefixes prefixes;
    prefixes.note_all(feed.extensions);
    for (const auto& e : feed.entries)
        prefixes.note_all(e.extensions);

    xml::Writer w;
    w.raw("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    w.start("feed")
        .attribute("xmlns", kAtomNs)
        .attribute("xmlns:georss", kGeoRssNs)
        .attribute("xmlns:fs", kFeedsetNs);
    for (const auto& [ns, prefix] : prefixes.extra())
        w.attribute("xmlns:" + prefix, ns);
    w.element("id", feed.id);
    w.element("title", feed.title);
    w.element("updated", feed.updated.to_string());
    for (const auto& l : feed.links)
        write_link(w, l);
    for (const auto& a : feed.authors)
        write_person(w, a);
    for (const auto& x : feed.extensions)
        write_extension(w, prefixes, x);
    for (const auto& e : feed.entries)
        write_entry(w, prefixes, e);
    return w.finish();
}

} // namespace feedql
