#include "feedql/kernels.hpp"

#include "feedql/geo.hpp"

#include <algorithm>
#include <optional>

namespace feedql {

namespace {

bool is_range(Op op) { return op == Op::lt || op == Op::le || op == Op::gt || op == Op::ge; }

bool compare(Op op, const Timestamp& lhs, const Timestamp& rhs)
{
    switch (op) {
    case Op::eq: return lhs == rhs;
    case Op::ne: return lhs != rhs;
    case Op::lt: return lhs < rhs;
    case Op::le: return lhs <= rhs;
    case Op::gt: return lhs > rhs;
    case Op::ge: return lhs >= rhs;
    case Op::within: return false;
    }
    return false;
}

/// Collects the text values a selector yields on an entry.
template <typename Fn>
void for_each_text(const Selector& sel, const Entry& e, const HiddenFields* hidden, Fn&& fn)
{
    switch (sel.ns) {
    case Selector::Namespace::atom: {
        const auto& p = sel.path;
        if (p == "id")
            fn(e.id);
        else if (p == "title")
            fn(e.title);
        else if (p == "summary") {
            if (e.summary)
                fn(*e.summary);
        } else if (p == "content") {
            if (e.content)
                fn(e.content->value);
        } else if (p == "category") {
            for (const auto& c : e.categories)
                fn(c.term);
        } else if (p == "author.name") {
            for (const auto& a : e.authors)
                fn(a.name);
        } else if (p == "author.email") {
            for (const auto& a : e.authors)
                if (a.email)
                    fn(*a.email);
        } else if (p == "author.uri") {
            for (const auto& a : e.authors)
                if (a.uri)
                    fn(*a.uri);
        }
        break;
    }
    case Selector::Namespace::link:
        for (const auto& l : e.links)
            if (l.rel == sel.path)
                fn(l.href);
        break;
    case Selector::Namespace::x:
        if (hidden)
            if (auto it = hidden->find(sel.path); it != hidden->end())
                fn(it->second);
        break;
    case Selector::Namespace::geo:
        break;
    }
}

std::optional<Timestamp> timestamp_value(const Selector& sel, const Entry& e)
{
    if (sel.path == "updated")
        return e.updated;
    return e.published;
}

bool match_predicate(const Predicate& p, const Entry& e, const EvalContext& ctx, const HiddenFields* hidden)
{
    if (p.op == Op::within) {
        if (!e.geo)
            return !ctx.strict_geo;
        return geo::contains(std::get<geo::Region>(p.value), representative_point(*e.geo));
    }

    if (p.selector.is_timestamp()) {
        auto value = timestamp_value(p.selector, e);
        const auto& rhs = std::get<Timestamp>(p.value);
        if (!value)
            return p.op == Op::ne;
        return compare(p.op, *value, rhs);
    }

    if (is_range(p.op)) {
        // Range over a text field: values that parse as timestamps are compared.
        const auto& rhs = std::get<Timestamp>(p.value);
        bool any = false;
        for_each_text(p.selector, e, hidden, [&](const std::string& v) {
            if (auto ts = Timestamp::parse(v); ts && compare(p.op, *ts, rhs))
                any = true;
        });
        return any;
    }

    const auto& pattern = std::get<TextPattern>(p.value);
    bool any = false;
    for_each_text(p.selector, e, hidden, [&](const std::string& v) {
        if (!any && pattern.matches(v))
            any = true;
    });
    return p.op == Op::eq ? any : !any;
}

} // namespace

bool match_entry(const FilterExpr& filter, const Entry& entry, const EvalContext& ctx, const HiddenFields* hidden)
{
    switch (filter.kind) {
    case FilterExpr::Kind::predicate:
        return match_predicate(filter.predicate, entry, ctx, hidden);
    case FilterExpr::Kind::all:
        for (const auto& c : filter.children)
            if (!match_entry(c, entry, ctx, hidden))
                return false;
        return true;
    case FilterExpr::Kind::any:
        for (const auto& c : filter.children)
            if (match_entry(c, entry, ctx, hidden))
                return true;
        return false;
    }
    return false;
}

namespace kernels {

Mask filter_mask(const FilterExpr& filter, std::span<const Entry> entries, std::span<const HiddenFields> hidden,
    const EvalContext& ctx)
{
    const auto n = static_cast<std::ptrdiff_t>(entries.size());
    const bool with_hidden = !hidden.empty();
    Mask mask(entries.size(), 0);
#pragma omp parallel for schedule(static) if (entries.size() >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        mask[i] = match_entry(filter, entries[i], ctx, with_hidden ? &hidden[i] : nullptr) ? 1 : 0;
    return mask;
}

Mask window_mask(std::span<const Entry> entries, long long seconds, long long min_count)
{
    const std::size_t n = entries.size();
    const auto n_signed = static_cast<std::ptrdiff_t>(n);
    const long long span_ms = std::min(seconds, 1'000'000'000'000LL) * 1000; // saturate

    std::vector<long long> times(n);
    for (std::size_t i = 0; i < n; ++i)
        times[i] = entries[i].event_time().unix_millis();
    std::vector<long long> sorted = times;
    std::sort(sorted.begin(), sorted.end());

    // reach[j]: one past the last sorted time within [sorted[j], sorted[j] + span].
    std::vector<std::ptrdiff_t> reach(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t j = 0; j < n_signed; ++j)
        reach[j] = std::upper_bound(sorted.begin(), sorted.end(), sorted[j] + span_ms) - sorted.begin();

    // Sorted positions covered by some interval that holds enough times.
    std::vector<std::ptrdiff_t> delta(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
        if (reach[j] - static_cast<std::ptrdiff_t>(j) >= min_count) {
            ++delta[j];
            --delta[reach[j]];
        }
    }
    std::vector<std::uint8_t> covered(n, 0);
    std::ptrdiff_t running = 0;
    for (std::size_t p = 0; p < n; ++p) {
        running += delta[p];
        covered[p] = running > 0 ? 1 : 0;
    }

    Mask mask(n, 0);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n_signed; ++i) {
        auto pos = std::lower_bound(sorted.begin(), sorted.end(), times[i]) - sorted.begin();
        mask[i] = covered[pos];
    }
    return mask;
}

Mask cluster_mask(std::span<const Entry> entries, double radius_km, long long min_count)
{
    const std::size_t n = entries.size();
    std::vector<LatLon> points;
    std::vector<std::size_t> owners;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (entries[i].geo) {
            points.push_back(representative_point(*entries[i].geo));
            owners.push_back(i);
        }
    }

    const auto m = static_cast<std::ptrdiff_t>(points.size());
    Mask mask(n, 0);
#pragma omp parallel for schedule(dynamic, 16) if (points.size() >= kParallelThreshold)
    for (std::ptrdiff_t a = 0; a < m; ++a) {
        long long count = 0;
        for (std::ptrdiff_t b = 0; b < m && count < min_count; ++b)
            if (geo::haversine_km(points[a], points[b]) <= radius_km)
                ++count;
        mask[owners[a]] = count >= min_count ? 1 : 0;
    }
    return mask;
}

} // namespace kernels
} // namespace feedql
