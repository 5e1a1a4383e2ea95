#include "feedql/error.hpp"
#include "feedql/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace feedql {

namespace {

constexpr std::array<std::string_view, 10> kAtomPaths = {
    "id", "title", "summary", "content", "category", "author.name", "author.email", "author.uri", "updated", "published"};

std::vector<std::string> known_selectors()
{
    std::vector<std::string> out(kAtomPaths.begin(), kAtomPaths.end());
    out.insert(out.end(), {"geo:position", "link(<rel>).href", "x:<field>"});
    return out;
}

std::vector<std::string> operator_tokens()
{
    std::vector<std::string> out;
    for (Op op : kAllOps)
        out.emplace_back(op_token(op));
    return out;
}

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-'; }

bool needs_quotes(std::string_view value, std::string_view reserved)
{
    if (value.empty())
        return true;
    return value.find_first_of(reserved) != std::string_view::npos;
}

std::string quote(std::string_view value)
{
    std::string out = "\"";
    for (char c : value) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::optional<double> to_double(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    if (text.front() == '+')
        text.remove_prefix(1);
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::optional<long long> to_integer(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        return std::nullopt;
    return v;
}

/// Shared cursor for the filter, selector and function-list grammars.
class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    std::size_t pos() const { return pos_; }
    std::string_view rest() const { return text_.substr(pos_); }
    void advance(std::size_t n = 1) { pos_ += n; }

    bool accept(char c)
    {
        if (peek() != c || at_end())
            return false;
        ++pos_;
        return true;
    }

    void expect(char c)
    {
        if (!accept(c))
            throw SyntaxError(pos_, {std::string(1, c)});
    }

    /// Quoted string with backslash escapes, or a bare run up to a reserved char.
    std::string read_value(std::string_view reserved, std::string_view what)
    {
        if (peek() == '"') {
            std::size_t start = pos_++;
            std::string out;
            while (!at_end()) {
                char c = text_[pos_++];
                if (c == '"')
                    return out;
                if (c == '\\') {
                    if (at_end())
                        break;
                    c = text_[pos_++];
                }
                out += c;
            }
            throw SyntaxError(start, {"closing quote"}, "unterminated string");
        }
        std::size_t start = pos_;
        while (!at_end() && reserved.find(text_[pos_]) == std::string_view::npos)
            ++pos_;
        if (pos_ == start)
            throw SyntaxError(pos_, {std::string(what)});
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string read_name()
    {
        std::size_t start = pos_;
        while (!at_end() && (is_name_char(text_[pos_]) || text_[pos_] == ':'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    Selector read_selector()
    {
        std::size_t start = pos_;
        if (rest().starts_with("link(")) {
            pos_ += 5;
            std::size_t rel_start = pos_;
            while (!at_end() && std::string_view(";,()\"").find(text_[pos_]) == std::string_view::npos)
                ++pos_;
            if (pos_ == rel_start)
                throw SyntaxError(pos_, {"link relation"});
            std::string rel(text_.substr(rel_start, pos_ - rel_start));
            expect(')');
            if (!rest().starts_with(".href"))
                throw SyntaxError(pos_, {".href"});
            pos_ += 5;
            return Selector::link(std::move(rel));
        }
        std::string name = read_name();
        if (name.empty())
            throw SyntaxError(start, known_selectors(), "expected a selector");
        if (name.starts_with("atom:"))
            name.erase(0, 5);
        if (name == "geo:position")
            return Selector::position();
        if (name.starts_with("x:") && name.size() > 2 && name.find(':', 2) == std::string::npos)
            return Selector::hidden(name.substr(2));
        if (std::find(kAtomPaths.begin(), kAtomPaths.end(), name) != kAtomPaths.end())
            return Selector::atom(name);
        throw SyntaxError(start, known_selectors(), "unknown selector '" + name + "'");
    }

    double read_number()
    {
        std::size_t start = pos_;
        while (!at_end() && std::string_view("0123456789+-.eE").find(text_[pos_]) != std::string_view::npos)
            ++pos_;
        auto v = to_double(text_.substr(start, pos_ - start));
        if (!v)
            throw SyntaxError(start, {"number"});
        return *v;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

void check_lat_lon(double lat, double lon)
{
    if (lat < -90.0 || lat > 90.0)
        throw Error(ErrorCode::BadGeo, "latitude out of range: " + format_number(lat));
    if (lon < -180.0 || lon > 180.0)
        throw Error(ErrorCode::BadGeo, "longitude out of range: " + format_number(lon));
}

geo::Region read_region(Cursor& c)
{
    std::size_t start = c.pos();
    std::string kind = c.read_name();
    if (kind != "radius" && kind != "box")
        throw SyntaxError(start, {"radius(lat,lon,km)", "box(south,west,north,east)"});
    c.expect('(');
    std::vector<double> args{c.read_number()};
    while (c.accept(','))
        args.push_back(c.read_number());
    c.expect(')');
    if (kind == "radius") {
        if (args.size() != 3)
            throw SyntaxError(start, {"radius(lat,lon,km)"}, "radius takes 3 arguments");
        check_lat_lon(args[0], args[1]);
        if (!(args[2] > 0))
            throw Error(ErrorCode::BadGeo, "radius must be positive");
        return geo::Radius{{args[0], args[1]}, args[2]};
    }
    if (args.size() != 4)
        throw SyntaxError(start, {"box(south,west,north,east)"}, "box takes 4 arguments");
    check_lat_lon(args[0], args[1]);
    check_lat_lon(args[2], args[3]);
    if (args[0] > args[2])
        throw Error(ErrorCode::BadGeo, "box south edge lies north of its north edge");
    return geo::Box{{args[0], args[1]}, {args[2], args[3]}};
}

constexpr std::string_view kFilterReserved = ";,()";

Op read_operator(Cursor& c)
{
    std::size_t start = c.pos();
    auto rest = c.rest();
    if (rest.starts_with("==")) {
        c.advance(2);
        return Op::eq;
    }
    if (rest.starts_with("!=")) {
        c.advance(2);
        return Op::ne;
    }
    if (rest.starts_with("=")) {
        std::size_t i = 1;
        while (i < rest.size() && std::isalpha(static_cast<unsigned char>(rest[i])))
            ++i;
        if (i > 1 && i < rest.size() && rest[i] == '=') {
            auto name = rest.substr(1, i - 1);
            auto op = op_from_name(name);
            if (!op || *op == Op::eq || *op == Op::ne)
                throw Error(ErrorCode::UnknownOperator,
                    "'=" + std::string(name) + "=' at position " + std::to_string(start));
            c.advance(i + 1);
            return *op;
        }
    }
    throw SyntaxError(start, operator_tokens(), "expected an operator");
}

Predicate read_predicate(Cursor& c)
{
    Predicate p;
    p.selector = c.read_selector();
    std::size_t op_pos = c.pos();
    p.op = read_operator(c);
    const auto sel = p.selector.to_string();

    if (p.op == Op::within) {
        if (!p.selector.is_position())
            throw Error(ErrorCode::TypeMismatch, "=within= applies only to geo:position, not " + sel);
        p.value = read_region(c);
        return p;
    }
    if (p.selector.is_position())
        throw Error(ErrorCode::TypeMismatch,
            "geo:position supports only =within= (position " + std::to_string(op_pos) + ")");

    std::size_t value_pos = c.pos();
    std::string text = c.read_value(kFilterReserved, "value");
    bool range = p.op != Op::eq && p.op != Op::ne;
    if (range && !p.selector.is_timestamp() && p.selector.ns != Selector::Namespace::x)
        throw Error(ErrorCode::TypeMismatch,
            std::string(op_token(p.op)) + " requires a timestamp selector, not " + sel);
    if (p.selector.is_timestamp() || range) {
        auto ts = Timestamp::parse(text);
        if (!ts)
            throw Error(ErrorCode::TypeMismatch,
                "'" + text + "' at position " + std::to_string(value_pos) + " is not an RFC 3339 timestamp");
        p.value = *ts;
    } else {
        p.value = TextPattern{std::move(text)};
    }
    return p;
}

FilterExpr read_or(Cursor& c);

FilterExpr read_primary(Cursor& c)
{
    if (c.accept('(')) {
        auto inner = read_or(c);
        c.expect(')');
        return inner;
    }
    return FilterExpr::leaf(read_predicate(c));
}

FilterExpr read_and(Cursor& c)
{
    std::vector<FilterExpr> parts{read_primary(c)};
    while (c.accept(';'))
        parts.push_back(read_primary(c));
    return FilterExpr::make_all(std::move(parts));
}

FilterExpr read_or(Cursor& c)
{
    std::vector<FilterExpr> parts{read_and(c)};
    while (c.accept(','))
        parts.push_back(read_and(c));
    return FilterExpr::make_any(std::move(parts));
}

std::string value_text(const Value& v)
{
    if (const auto* t = std::get_if<TextPattern>(&v))
        return needs_quotes(t->pattern, ";,()\"\\") ? quote(t->pattern) : t->pattern;
    if (const auto* ts = std::get_if<Timestamp>(&v))
        return ts->to_string();
    const auto& region = std::get<geo::Region>(v);
    if (const auto* r = std::get_if<geo::Radius>(&region))
        return "radius(" + format_number(r->center.lat) + "," + format_number(r->center.lon) + ","
            + format_number(r->km) + ")";
    const auto& b = std::get<geo::Box>(region);
    return "box(" + format_number(b.southwest.lat) + "," + format_number(b.southwest.lon) + ","
        + format_number(b.northeast.lat) + "," + format_number(b.northeast.lon) + ")";
}

long long positive_integer(const std::string& text, std::string_view what, long long min)
{
    auto v = to_integer(text);
    if (!v || *v < min)
        throw Error(ErrorCode::BadParam,
            std::string(what) + " must be an integer >= " + std::to_string(min) + ", got '" + text + "'");
    return *v;
}

double positive_decimal(const std::string& text, std::string_view what)
{
    auto v = to_double(text);
    if (!v || !(*v > 0))
        throw Error(ErrorCode::BadParam, std::string(what) + " must be a positive decimal, got '" + text + "'");
    return *v;
}

CrossEntryFn build_function(const std::string& name, const std::vector<std::string>& args)
{
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            throw Error(ErrorCode::BadParam, name + " takes " + std::to_string(lo)
                    + (lo == hi ? "" : "-" + std::to_string(hi)) + " arguments, got " + std::to_string(args.size()));
    };
    if (name == "window") {
        arity(2, 2);
        return WindowFn{positive_integer(args[0], "window duration", 1), positive_integer(args[1], "window min-count", 1)};
    }
    if (name == "cluster") {
        arity(2, 2);
        return ClusterFn{positive_decimal(args[0], "cluster radius"), positive_integer(args[1], "cluster min-count", 1)};
    }
    arity(3, 4);
    CooccurFn fn;
    fn.origin_a = args[0];
    fn.origin_b = args[1];
    if (fn.origin_a.empty() || fn.origin_b.empty())
        throw Error(ErrorCode::BadParam, "cooccur origins must be nonempty");
    fn.radius_km = positive_decimal(args[2], "cooccur radius");
    if (args.size() == 4)
        fn.seconds = positive_integer(args[3], "cooccur duration", 1);
    return fn;
}

} // namespace

Selector parse_selector(std::string_view text)
{
    Cursor c(text);
    auto sel = c.read_selector();
    if (!c.at_end())
        throw SyntaxError(c.pos(), {"end of input"});
    return sel;
}

FilterExpr parse_filter(std::string_view text)
{
    if (text.empty())
        throw SyntaxError(0, known_selectors(), "empty filter");
    Cursor c(text);
    auto expr = read_or(c);
    if (!c.at_end())
        throw SyntaxError(c.pos(), {";", ",", "end of input"});
    return expr;
}

std::vector<CrossEntryFn> parse_cross_entry(std::string_view text)
{
    std::vector<CrossEntryFn> out;
    if (text.empty())
        return out;
    Cursor c(text);
    do {
        std::size_t start = c.pos();
        std::string name = c.read_name();
        if (name != "window" && name != "cluster" && name != "cooccur")
            throw SyntaxError(start, {"window", "cluster", "cooccur"}, "unknown function '" + name + "'");
        c.expect('(');
        std::vector<std::string> args{c.read_value(",()\"", "argument")};
        while (c.accept(','))
            args.push_back(c.read_value(",()\"", "argument"));
        c.expect(')');
        out.push_back(build_function(name, args));
    } while (c.accept(','));
    if (!c.at_end())
        throw SyntaxError(c.pos(), {",", "end of input"});
    return out;
}

SortKey parse_sort_key(std::string_view text)
{
    if (text == "updated")
        return {SortField::updated, {}};
    if (text == "published")
        return {SortField::published, {}};
    if (text == "title")
        return {SortField::title, {}};
    if (text.starts_with("geo-distance(") && text.ends_with(")")) {
        auto inner = text.substr(13, text.size() - 14);
        auto comma = inner.find(',');
        if (comma != std::string_view::npos) {
            auto lat = to_double(inner.substr(0, comma));
            auto lon = to_double(inner.substr(comma + 1));
            if (lat && lon && *lat >= -90 && *lat <= 90 && *lon >= -180 && *lon <= 180)
                return {SortField::geo_distance, {*lat, *lon}};
        }
    }
    throw Error(ErrorCode::BadParam, "unknown sort key '" + std::string(text) + "'");
}

std::string to_text(const Predicate& p)
{
    return p.selector.to_string() + std::string(op_token(p.op)) + value_text(p.value);
}

std::string to_text(const FilterExpr& expr)
{
    if (expr.kind == FilterExpr::Kind::predicate)
        return to_text(expr.predicate);
    std::vector<std::string> parts;
    for (const auto& c : expr.children) {
        auto t = to_text(c);
        if (expr.kind == FilterExpr::Kind::all && c.kind == FilterExpr::Kind::any)
            t = "(" + t + ")";
        parts.push_back(std::move(t));
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += expr.kind == FilterExpr::Kind::all ? ';' : ',';
        out += parts[i];
    }
    return out;
}

std::string to_text(const CrossEntryFn& fn)
{
    if (const auto* w = std::get_if<WindowFn>(&fn))
        return "window(" + std::to_string(w->seconds) + "," + std::to_string(w->min_count) + ")";
    if (const auto* c = std::get_if<ClusterFn>(&fn))
        return "cluster(" + format_number(c->radius_km) + "," + std::to_string(c->min_count) + ")";
    const auto& co = std::get<CooccurFn>(fn);
    auto arg = [](const std::string& s) { return needs_quotes(s, ",()\"\\") ? quote(s) : s; };
    std::string out = "cooccur(" + arg(co.origin_a) + "," + arg(co.origin_b) + "," + format_number(co.radius_km);
    if (co.seconds)
        out += "," + std::to_string(*co.seconds);
    return out + ")";
}

std::string to_text(const std::vector<CrossEntryFn>& fns)
{
    std::string out;
    for (const auto& fn : fns) {
        if (!out.empty())
            out += ',';
        out += to_text(fn);
    }
    return out;
}

std::string to_text(const SortKey& key)
{
    switch (key.field) {
    case SortField::updated: return "updated";
    case SortField::published: return "published";
    case SortField::title: return "title";
    case SortField::geo_distance:
        return "geo-distance(" + format_number(key.from.lat) + "," + format_number(key.from.lon) + ")";
    }
    return "updated";
}

Query parse_uri_params(const Params& params)
{
    static constexpr std::array<std::string_view, 7> kNames = {
        "q", "xq", "sort-by", "order", "group-by", "max-results", "start-index"};
    std::map<std::string, std::string, std::less<>> found;
    for (const auto& [name, value] : params) {
        if (std::find(kNames.begin(), kNames.end(), name) == kNames.end())
            continue;
        if (!found.emplace(name, value).second)
            throw Error(ErrorCode::BadParam, "duplicate '" + name + "' parameter");
    }

    Query q;
    if (auto it = found.find("q"); it != found.end())
        q.filter = parse_filter(it->second);
    if (auto it = found.find("xq"); it != found.end())
        q.cross_entry = parse_cross_entry(it->second);
    if (auto it = found.find("sort-by"); it != found.end())
        q.shaping.sort_by = parse_sort_key(it->second);
    if (auto it = found.find("order"); it != found.end()) {
        if (it->second == "asc")
            q.shaping.order = Order::asc;
        else if (it->second == "desc")
            q.shaping.order = Order::desc;
        else
            throw Error(ErrorCode::BadParam, "order must be asc or desc, got '" + it->second + "'");
    }
    if (auto it = found.find("group-by"); it != found.end()) {
        try {
            q.shaping.group_by = parse_selector(it->second);
        } catch (const SyntaxError& e) {
            throw Error(ErrorCode::BadParam, "group-by: " + e.detail());
        }
    }
    if (auto it = found.find("max-results"); it != found.end())
        q.shaping.max_results = positive_integer(it->second, "max-results", 1);
    if (auto it = found.find("start-index"); it != found.end())
        q.shaping.start_index = positive_integer(it->second, "start-index", 1);
    return q;
}

Params serialize_query(const Query& query)
{
    Params out;
    if (query.filter)
        out.emplace_back("q", to_text(*query.filter));
    if (!query.cross_entry.empty())
        out.emplace_back("xq", to_text(query.cross_entry));
    const auto& s = query.shaping;
    if (s.sort_by)
        out.emplace_back("sort-by", to_text(*s.sort_by));
    if (s.order)
        out.emplace_back("order", *s.order == Order::asc ? "asc" : "desc");
    if (s.group_by)
        out.emplace_back("group-by", s.group_by->to_string());
    if (s.max_results)
        out.emplace_back("max-results", std::to_string(*s.max_results));
    if (s.start_index)
        out.emplace_back("start-index", std::to_string(*s.start_index));
    return out;
}

} // namespace feedql
