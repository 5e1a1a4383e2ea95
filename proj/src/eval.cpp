#include "feedql/eval.hpp"

#include "feedql/error.hpp"
#include "feedql/geo.hpp"

#include <algorithm>
#include <numeric>

namespace feedql {

std::vector<Entry> select(std::span<const Entry> entries, const kernels::Mask& mask)
{
    std::vector<Entry> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (mask[i])
            out.push_back(entries[i]);
    return out;
}

namespace {

Feed with_entries(const Feed& feed, std::vector<Entry> entries)
{
    Feed out;
    out.id = feed.id;
    out.title = feed.title;
    out.updated = feed.updated;
    out.links = feed.links;
    out.authors = feed.authors;
    out.extensions = feed.extensions;
    out.entries = std::move(entries);
    return out;
}

Feed filtered(const FilterExpr& filter, const Feed& feed, const EvalContext& ctx, std::span<const HiddenFields> hidden)
{
    auto mask = kernels::filter_mask(filter, feed.entries, hidden, ctx);
    Feed out = with_entries(feed, select(feed.entries, mask));
    if (!out.entries.empty()) {
        out.updated = std::max_element(out.entries.begin(), out.entries.end(), [](const Entry& a, const Entry& b) {
            return a.updated < b.updated;
        })->updated;
    }
    return out;
}

} // namespace

Feed filter_feed(const std::optional<FilterExpr>& filter, const Feed& feed, const EvalContext& ctx)
{
    if (!filter)
        return feed;
    return filtered(*filter, feed, ctx, {});
}

Feed eval_window(long long seconds, long long min_count, const Feed& feed)
{
    return with_entries(feed, select(feed.entries, kernels::window_mask(feed.entries, seconds, min_count)));
}

Feed eval_cluster(double radius_km, long long min_count, const Feed& feed)
{
    return with_entries(feed, select(feed.entries, kernels::cluster_mask(feed.entries, radius_km, min_count)));
}

std::optional<std::string> group_key(const Selector& selector, const Entry& e)
{
    switch (selector.ns) {
    case Selector::Namespace::x:
        return std::nullopt; // backend fields never surface in output
    case Selector::Namespace::geo:
        if (!e.geo)
            return std::nullopt;
        return format_coords({representative_point(*e.geo)});
    case Selector::Namespace::link:
        for (const auto& l : e.links)
            if (l.rel == selector.path)
                return l.href;
        return std::nullopt;
    case Selector::Namespace::atom:
        break;
    }
    const auto& p = selector.path;
    if (p == "id")
        return e.id;
    if (p == "title")
        return e.title;
    if (p == "summary")
        return e.summary;
    if (p == "content")
        return e.content ? std::optional(e.content->value) : std::nullopt;
    if (p == "category")
        return e.categories.empty() ? std::nullopt : std::optional(e.categories.front().term);
    if (p == "updated")
        return e.updated.to_string();
    if (p == "published")
        return e.published ? std::optional(e.published->to_string()) : std::nullopt;
    for (const auto& a : e.authors) {
        if (p == "author.name")
            return a.name;
        if (p == "author.email" && a.email)
            return a.email;
        if (p == "author.uri" && a.uri)
            return a.uri;
    }
    return std::nullopt;
}

namespace {

struct SortValue {
    bool present = false;
    long long millis = 0;
    double distance = 0;
    std::string text;
};

SortValue sort_value(const SortKey& key, const Entry& e)
{
    SortValue v;
    switch (key.field) {
    case SortField::updated:
        v.present = true;
        v.millis = e.updated.unix_millis();
        break;
    case SortField::published:
        if (e.published) {
            v.present = true;
            v.millis = e.published->unix_millis();
        }
        break;
    case SortField::title:
        v.present = true;
        v.text = e.title;
        break;
    case SortField::geo_distance:
        if (e.geo) {
            v.present = true;
            v.distance = geo::haversine_km(key.from, representative_point(*e.geo));
        }
        break;
    }
    return v;
}

/// Strict less-than on present values.
bool value_less(SortField field, const SortValue& a, const SortValue& b)
{
    switch (field) {
    case SortField::updated:
    case SortField::published: return a.millis < b.millis;
    case SortField::title: return a.text < b.text;
    case SortField::geo_distance: return a.distance < b.distance;
    }
    return false;
}

} // namespace

Feed apply_shaping(const Shaping& shaping, const Feed& feed)
{
    const std::size_t n = feed.entries.size();
    std::vector<std::optional<std::string>> groups(n);
    std::vector<SortValue> keys(n);
    if (shaping.group_by)
        for (std::size_t i = 0; i < n; ++i)
            groups[i] = group_key(*shaping.group_by, feed.entries[i]);
    if (shaping.sort_by)
        for (std::size_t i = 0; i < n; ++i)
            keys[i] = sort_value(*shaping.sort_by, feed.entries[i]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shaping.group_by || shaping.sort_by) {
        const bool descending = shaping.effective_order() == Order::desc;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (shaping.group_by) {
                const auto& ga = groups[a];
                const auto& gb = groups[b];
                if (ga.has_value() != gb.has_value())
                    return ga.has_value();
                if (ga && *ga != *gb)
                    return *ga < *gb;
            }
            if (shaping.sort_by) {
                const auto& ka = keys[a];
                const auto& kb = keys[b];
                if (ka.present != kb.present)
                    return ka.present;
                if (ka.present) {
                    auto field = shaping.sort_by->field;
                    return descending ? value_less(field, kb, ka) : value_less(field, ka, kb);
                }
            }
            return false;
        });
    }

    std::size_t skip = shaping.start_index ? static_cast<std::size_t>(*shaping.start_index - 1) : 0;
    std::size_t limit = shaping.max_results ? static_cast<std::size_t>(*shaping.max_results) : n;

    std::vector<Entry> out;
    for (std::size_t k = skip; k < n && out.size() < limit; ++k) {
        Entry e = feed.entries[order[k]];
        if (shaping.group_by && groups[order[k]])
            e.group = groups[order[k]];
        out.push_back(std::move(e));
    }
    return with_entries(feed, std::move(out));
}

Feed eval_query(const Query& query, const Feed& feed, const EvalContext& ctx, std::span<const HiddenFields> hidden)
{
    if (query.has_cooccur())
        throw Error(ErrorCode::CrossFeedFnHere, "cooccur needs a feedset; route the query through the aggregator");
    if (query.is_identity())
        return feed;

    Feed current = query.filter ? filtered(*query.filter, feed, ctx, hidden) : feed;
    for (const auto& fn : query.cross_entry) {
        if (const auto* w = std::get_if<WindowFn>(&fn))
            current = eval_window(w->seconds, w->min_count, current);
        else if (const auto* c = std::get_if<ClusterFn>(&fn))
            current = eval_cluster(c->radius_km, c->min_count, current);
    }
    if (!query.shaping.empty())
        current = apply_shaping(query.shaping, current);
    return current;
}

} // namespace feedql
