#include "feedql/atom.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace feedql {

std::string_view to_string(GeoShape::Kind kind)
{
    switch (kind) {
    case GeoShape::Kind::point: return "point";
    case GeoShape::Kind::line: return "line";
    case GeoShape::Kind::polygon: return "polygon";
    case GeoShape::Kind::box: return "box";
    }
    return "point";
}

std::optional<std::string> shape_problem(const GeoShape& shape)
{
    for (const auto& c : shape.coords) {
        if (!std::isfinite(c.lat) || c.lat < -90.0 || c.lat > 90.0)
            return "geo.lat range";
        if (!std::isfinite(c.lon) || c.lon < -180.0 || c.lon > 180.0)
            return "geo.lon range";
    }
    switch (shape.kind) {
    case GeoShape::Kind::point:
        if (shape.coords.size() != 1)
            return "geo.point arity";
        break;
    case GeoShape::Kind::box:
        if (shape.coords.size() != 2)
            return "geo.box arity";
        if (shape.coords[0].lat > shape.coords[1].lat)
            return "geo.box order";
        break;
    case GeoShape::Kind::line:
        if (shape.coords.size() < 2)
            return "geo.line arity";
        break;
    case GeoShape::Kind::polygon: {
        std::set<std::pair<double, double>> distinct;
        for (const auto& c : shape.coords)
            distinct.emplace(c.lat, c.lon);
        if (distinct.size() < 3)
            return "geo.polygon arity";
        break;
    }
    }
    return std::nullopt;
}

LatLon representative_point(const GeoShape& shape)
{
    if (shape.coords.empty())
        return {};
    switch (shape.kind) {
    case GeoShape::Kind::point:
        return shape.coords.front();
    case GeoShape::Kind::box:
        return {(shape.coords[0].lat + shape.coords[1].lat) / 2.0, (shape.coords[0].lon + shape.coords[1].lon) / 2.0};
    case GeoShape::Kind::line:
    case GeoShape::Kind::polygon:
        break;
    }
    double lat = 0, lon = 0;
    for (const auto& c : shape.coords) {
        lat += c.lat;
        lon += c.lon;
    }
    auto n = static_cast<double>(shape.coords.size());
    return {lat / n, lon / n};
}

bool Content::is_markup() const
{
    if (src)
        return false;
    if (type == "xhtml")
        return true;
    return type.size() > 3 && (type.ends_with("/xml") || type.ends_with("+xml"));
}

bool operator==(const Extension& a, const Extension& b)
{
    if (a.ns != b.ns || a.name != b.name || a.value != b.value || a.attributes.size() != b.attributes.size())
        return false;
    for (std::size_t i = 0; i < a.attributes.size(); ++i) {
        const auto& x = a.attributes[i];
        const auto& y = b.attributes[i];
        if (x.ns != y.ns || x.name != y.name || x.value != y.value)
            return false;
    }
    return true;
}

std::string format_number(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_coords(const std::vector<LatLon>& coords)
{
    std::string out;
    for (const auto& c : coords) {
        if (!out.empty())
            out += ' ';
        out += format_number(c.lat);
        out += ' ';
        out += format_number(c.lon);
    }
    return out;
}

namespace {

void check_people(const std::vector<Person>& people, const std::string& subject, std::vector<Violation>& out)
{
    for (const auto& p : people)
        if (p.name.empty())
            out.push_back({subject, "person.name nonempty"});
}

void check_links(const std::vector<Link>& links, const std::string& subject, std::vector<Violation>& out)
{
    for (const auto& l : links)
        if (l.href.empty())
            out.push_back({subject, "link.href nonempty"});
}

void check_extensions(const std::vector<Extension>& exts, const std::string& subject, std::vector<Violation>& out)
{
    for (const auto& x : exts)
        if (x.name.empty())
            out.push_back({subject, "extension.name nonempty"});
}

} // namespace

std::vector<Violation> validate_feed(const Feed& feed)
{
    std::vector<Violation> out;
    if (feed.id.empty())
        out.push_back({"feed", "feed.id nonempty"});
    if (feed.title.empty())
        out.push_back({"feed", "feed.title nonempty"});
    check_people(feed.authors, "feed", out);
    check_links(feed.links, "feed", out);
    check_extensions(feed.extensions, "feed", out);

    std::map<std::pair<std::string, std::string>, int> seen;
    for (const auto& e : feed.entries) {
        const std::string& subject = e.id;
        if (e.id.empty())
            out.push_back({subject, "entry.id nonempty"});
        if (e.title.empty())
            out.push_back({subject, "entry.title nonempty"});
        check_people(e.authors, subject, out);
        for (const auto& c : e.categories)
            if (c.term.empty())
                out.push_back({subject, "category.term nonempty"});
        check_links(e.links, subject, out);
        if (e.content && e.content->src && e.content->src->empty())
            out.push_back({subject, "content.src nonempty"});
        if (e.geo)
            if (auto problem = shape_problem(*e.geo))
                out.push_back({subject, *problem});
        if (e.origin && e.origin->empty())
            out.push_back({subject, "origin nonempty"});
        check_extensions(e.extensions, subject, out);
        if (!e.id.empty() && ++seen[{e.origin.value_or(""), e.id}] == 2)
            out.push_back({subject, "duplicate entry id"});
    }
    return out;
}

} // namespace feedql
