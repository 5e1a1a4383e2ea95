#pragma once

#include "feedql/timestamp.hpp"
#include "feedql/xml.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace feedql {

inline constexpr std::string_view kAtomNs = "http://www.w3.org/2005/Atom";
inline constexpr std::string_view kGeoRssNs = "http://www.georss.org/georss";
inline constexpr std::string_view kFeedsetNs = "http://ns.feedql.dev/feedset";

struct Person {
    std::string name;
    std::optional<std::string> email;
    std::optional<std::string> uri;

    friend bool operator==(const Person&, const Person&) = default;
};

struct Category {
    std::string term;
    std::optional<std::string> scheme;
    std::optional<std::string> label;

    friend bool operator==(const Category&, const Category&) = default;
};

struct Link {
    std::string href;
    std::string rel = "alternate";
    std::optional<std::string> type;

    friend bool operator==(const Link&, const Link&) = default;
};

struct LatLon {
    double lat = 0;
    double lon = 0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// GeoRSS Simple shape. Boxes hold southwest then northeast; polygons are
/// stored as an open ring (the closing vertex is implicit).
struct GeoShape {
    enum class Kind { point, line, polygon, box };

    Kind kind = Kind::point;
    std::vector<LatLon> coords;

    static GeoShape point(double lat, double lon) { return {Kind::point, {{lat, lon}}}; }
    static GeoShape box(LatLon southwest, LatLon northeast) { return {Kind::box, {southwest, northeast}}; }

    friend bool operator==(const GeoShape&, const GeoShape&) = default;
};

std::string_view to_string(GeoShape::Kind kind);

/// Returns the name of the first violated shape rule, if any.
std::optional<std::string> shape_problem(const GeoShape& shape);

/// Point -> itself, box -> midpoint of its corners, line/polygon -> mean of
/// the vertices.
LatLon representative_point(const GeoShape& shape);

/// Inline content, or out-of-line content when `src` is set. For xhtml and
/// XML media types `value` holds the inner markup verbatim.
struct Content {
    std::string type = "text";
    std::string value;
    std::optional<std::string> src;

    bool is_markup() const;

    friend bool operator==(const Content&, const Content&) = default;
};

/// A foreign or unmodeled element carried through parse and serialize.
struct Extension {
    std::string ns;
    std::string name;
    std::string value;
    std::vector<xml::Attribute> attributes;
};

bool operator==(const Extension& a, const Extension& b);

struct Entry {
    std::string id;
    std::string title;
    Timestamp updated;
    std::optional<Timestamp> published;
    std::vector<Person> authors;
    std::vector<Category> categories;
    std::vector<Link> links;
    std::optional<std::string> summary;
    std::optional<Content> content;
    std::optional<GeoShape> geo;
    std::optional<std::string> origin;   // fs:origin
    std::optional<std::string> group;    // fs:group
    std::vector<Extension> extensions;

    /// Published if present, otherwise updated.
    Timestamp event_time() const { return published.value_or(updated); }
};

struct Feed {
    std::string id;
    std::string title;
    Timestamp updated;
    std::vector<Link> links;
    std::vector<Person> authors;
    std::vector<Entry> entries;
    std::vector<Extension> extensions;
};

struct Violation {
    std::string subject; // entry id, or "feed"
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every Feed/Entry invariant. Entry ids must be unique per origin;
/// entries from different feedset origins may share an id.
std::vector<Violation> validate_feed(const Feed& feed);

enum class ParseMode { lenient, strict };

/// Parses an Atom document. In strict mode a document that fails
/// validate_feed raises InvariantViolation.
Feed parse_feed(std::string_view document, ParseMode mode = ParseMode::lenient);

/// Throws InvariantViolation when the feed does not validate.
std::string serialize_feed(const Feed& feed);

/// "lat lon lat lon ..." as used by GeoRSS Simple.
std::string format_coords(const std::vector<LatLon>& coords);
std::string format_number(double value);

} // namespace feedql
