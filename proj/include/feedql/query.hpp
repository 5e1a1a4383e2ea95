#pragma once

#include "feedql/geo.hpp"
#include "feedql/timestamp.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace feedql {

struct Capabilities;

/// Addresses one (possibly multi-valued) field of an entry.
///
///   atom  id, title, summary, content, category, author.name, author.email,
///         author.uri, updated, published
///   geo   position (the entry's representative point)
///   link  path holds the relation; text form link(rel).href
///   x     backend-only member field, collection scope
struct Selector {
    enum class Namespace { atom, geo, link, x };

    Namespace ns = Namespace::atom;
    std::string path;

    static Selector atom(std::string path) { return {Namespace::atom, std::move(path)}; }
    static Selector position() { return {Namespace::geo, "position"}; }
    static Selector link(std::string rel) { return {Namespace::link, std::move(rel)}; }
    static Selector hidden(std::string field) { return {Namespace::x, std::move(field)}; }

    bool is_timestamp() const { return ns == Namespace::atom && (path == "updated" || path == "published"); }
    bool is_position() const { return ns == Namespace::geo && path == "position"; }
    bool is_collection_scoped() const { return ns == Namespace::x; }

    std::string to_string() const;

    friend auto operator<=>(const Selector&, const Selector&) = default;
};

/// Throws SyntaxError for text that does not name a known selector.
Selector parse_selector(std::string_view text);

enum class Op { eq, ne, lt, le, gt, ge, within };

std::string_view op_token(Op op); // "==", "=ge=", ...
std::string_view op_name(Op op);  // "eq", "ge", ...
std::optional<Op> op_from_name(std::string_view name);
inline constexpr Op kAllOps[] = {Op::eq, Op::ne, Op::lt, Op::le, Op::gt, Op::ge, Op::within};

/// Case-sensitive text match where `*` matches any run of characters.
struct TextPattern {
    std::string pattern;

    bool matches(std::string_view text) const;

    friend bool operator==(const TextPattern&, const TextPattern&) = default;
};

using Value = std::variant<TextPattern, Timestamp, geo::Region>;

struct Predicate {
    Selector selector;
    Op op = Op::eq;
    Value value;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Boolean tree over entry-scoped predicates. make_all/make_any flatten
/// nested nodes of the same kind and collapse single children, so every
/// And/Or node has at least two children.
struct FilterExpr {
    enum class Kind { all, any, predicate };

    Kind kind = Kind::predicate;
    std::vector<FilterExpr> children;
    Predicate predicate;

    static FilterExpr leaf(Predicate p);
    static FilterExpr make_all(std::vector<FilterExpr> children);
    static FilterExpr make_any(std::vector<FilterExpr> children);

    /// Top-level conjuncts (the node itself unless it is an And).
    std::vector<FilterExpr> conjuncts() const;

    template <typename Fn>
    void for_each_predicate(Fn&& fn) const
    {
        if (kind == Kind::predicate)
            fn(predicate);
        else
            for (const auto& c : children)
                c.for_each_predicate(fn);
    }

    friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct WindowFn {
    long long seconds = 0;
    long long min_count = 1;

    friend bool operator==(const WindowFn&, const WindowFn&) = default;
};

struct ClusterFn {
    double radius_km = 0;
    long long min_count = 1;

    friend bool operator==(const ClusterFn&, const ClusterFn&) = default;
};

struct CooccurFn {
    std::string origin_a;
    std::string origin_b;
    double radius_km = 0;
    std::optional<long long> seconds;

    friend bool operator==(const CooccurFn&, const CooccurFn&) = default;
};

using CrossEntryFn = std::variant<WindowFn, ClusterFn, CooccurFn>;

std::string_view function_name(const CrossEntryFn& fn);
int function_arity(const CrossEntryFn& fn);

enum class SortField { updated, published, title, geo_distance };

struct SortKey {
    SortField field = SortField::updated;
    LatLon from; // geo_distance only

    friend bool operator==(const SortKey&, const SortKey&) = default;
};

enum class Order { asc, desc };

struct Shaping {
    std::optional<SortKey> sort_by;
    std::optional<Order> order;
    std::optional<Selector> group_by;
    std::optional<long long> max_results;
    std::optional<long long> start_index;

    /// Explicit order, else descending for timestamp keys and ascending otherwise.
    Order effective_order() const;
    bool empty() const;

    friend bool operator==(const Shaping&, const Shaping&) = default;
};

struct Query {
    std::optional<FilterExpr> filter;
    std::vector<CrossEntryFn> cross_entry;
    Shaping shaping;

    bool is_identity() const { return !filter && cross_entry.empty() && shaping.empty(); }
    bool has_cooccur() const;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Ordered name/value pairs, already percent-decoded.
using Params = std::vector<std::pair<std::string, std::string>>;

FilterExpr parse_filter(std::string_view text);
std::vector<CrossEntryFn> parse_cross_entry(std::string_view text);
SortKey parse_sort_key(std::string_view text);

/// Canonical text: And/Or children sorted by their own canonical text.
std::string to_text(const FilterExpr& expr);
std::string to_text(const Predicate& predicate);
std::string to_text(const CrossEntryFn& fn);
std::string to_text(const std::vector<CrossEntryFn>& fns);
std::string to_text(const SortKey& key);

/// Reads q, xq, sort-by, order, group-by, max-results and start-index.
/// Unrecognized names are ignored; a repeated recognized name is BadParam.
Query parse_uri_params(const Params& params);
Params serialize_query(const Query& query);

/// One unsupported feature, e.g. {"selector", "geo:position"}.
struct Unsupported {
    std::string kind;
    std::string name;

    std::string to_string() const { return kind + " " + name; }

    friend auto operator<=>(const Unsupported&, const Unsupported&) = default;
};

std::vector<Unsupported> validate_against_capabilities(const Query& query, const Capabilities& caps);

} // namespace feedql
