#include "feedql/query.hpp"

#include "feedql/capabilities.hpp"

#include <algorithm>

namespace feedql {

std::string Selector::to_string() const
{
    switch (ns) {
    case Namespace::atom: return path;
    case Namespace::geo: return "geo:" + path;
    case Namespace::link: return "link(" + path + ").href";
    case Namespace::x: return "x:" + path;
    }
    return path;
}

std::string_view op_token(Op op)
{
    switch (op) {
    case Op::eq: return "==";
    case Op::ne: return "!=";
    case Op::lt: return "=lt=";
    case Op::le: return "=le=";
    case Op::gt: return "=gt=";
    case Op::ge: return "=ge=";
    case Op::within: return "=within=";
    }
    return "==";
}

std::string_view op_name(Op op)
{
    switch (op) {
    case Op::eq: return "eq";
    case Op::ne: return "ne";
    case Op::lt: return "lt";
    case Op::le: return "le";
    case Op::gt: return "gt";
    case Op::ge: return "ge";
    case Op::within: return "within";
    }
    return "eq";
}

std::optional<Op> op_from_name(std::string_view name)
{
    for (Op op : kAllOps)
        if (op_name(op) == name)
            return op;
    return std::nullopt;
}

bool TextPattern::matches(std::string_view text) const
{
    std::string_view p = pattern;
    std::size_t ti = 0, pi = 0;
    std::size_t star = std::string_view::npos, resume = 0;
    while (ti < text.size()) {
        if (pi < p.size() && p[pi] == '*') {
            star = pi++;
            resume = ti;
        } else if (pi < p.size() && p[pi] == text[ti]) {
            ++pi;
            ++ti;
        } else if (star != std::string_view::npos) {
            pi = star + 1;
            ti = ++resume;
        } else {
            return false;
        }
    }
    while (pi < p.size() && p[pi] == '*')
        ++pi;
    return pi == p.size();
}

FilterExpr FilterExpr::leaf(Predicate p)
{
    FilterExpr e;
    e.kind = Kind::predicate;
    e.predicate = std::move(p);
    return e;
}

namespace {

FilterExpr make_node(FilterExpr::Kind kind, std::vector<FilterExpr> children)
{
    std::vector<FilterExpr> flat;
    for (auto& c : children) {
        if (c.kind == kind)
            for (auto& g : c.children)
                flat.push_back(std::move(g));
        else
            flat.push_back(std::move(c));
    }
    if (flat.size() == 1)
        return std::move(flat.front());
    FilterExpr e;
    e.kind = kind;
    e.children = std::move(flat);
    return e;
}

} // namespace

FilterExpr FilterExpr::make_all(std::vector<FilterExpr> children) { return make_node(Kind::all, std::move(children)); }

FilterExpr FilterExpr::make_any(std::vector<FilterExpr> children) { return make_node(Kind::any, std::move(children)); }

std::vector<FilterExpr> FilterExpr::conjuncts() const
{
    if (kind == Kind::all)
        return children;
    return {*this};
}

std::string_view function_name(const CrossEntryFn& fn)
{
    if (std::holds_alternative<WindowFn>(fn))
        return "window";
    if (std::holds_alternative<ClusterFn>(fn))
        return "cluster";
    return "cooccur";
}

int function_arity(const CrossEntryFn& fn)
{
    if (const auto* c = std::get_if<CooccurFn>(&fn))
        return c->seconds ? 4 : 3;
    return 2;
}

Order Shaping::effective_order() const
{
    if (order)
        return *order;
    if (sort_by && (sort_by->field == SortField::updated || sort_by->field == SortField::published))
        return Order::desc;
    return Order::asc;
}

bool Shaping::empty() const { return !sort_by && !order && !group_by && !max_results && !start_index; }

bool Query::has_cooccur() const
{
    return std::any_of(cross_entry.begin(), cross_entry.end(),
        [](const CrossEntryFn& fn) { return std::holds_alternative<CooccurFn>(fn); });
}

std::vector<Unsupported> validate_against_capabilities(const Query& query, const Capabilities& caps)
{
    std::vector<Unsupported> out;
    auto add = [&](std::string kind, std::string name) {
        Unsupported u{std::move(kind), std::move(name)};
        if (std::find(out.begin(), out.end(), u) == out.end())
            out.push_back(std::move(u));
    };
    auto check_selector = [&](const Selector& s) {
        if (!caps.supports_selector(s))
            add("selector", s.to_string());
    };

    if (query.filter) {
        query.filter->for_each_predicate([&](const Predicate& p) {
            check_selector(p.selector);
            if (!caps.supports_operator(p.op))
                add("operator", std::string(op_name(p.op)));
        });
    }
    for (const auto& fn : query.cross_entry)
        if (!caps.supports_function(function_name(fn), function_arity(fn)))
            add("function", std::string(function_name(fn)) + "/" + std::to_string(function_arity(fn)));

    const auto& s = query.shaping;
    auto check_shaping = [&](bool present, std::string_view name) {
        if (present && !caps.supports_shaping(name))
            add("shaping", std::string(name));
    };
    check_shaping(s.sort_by.has_value(), "sort-by");
    check_shaping(s.order.has_value(), "order");
    check_shaping(s.group_by.has_value(), "group-by");
    check_shaping(s.max_results.has_value(), "max-results");
    check_shaping(s.start_index.has_value(), "start-index");
    if (s.group_by)
        check_selector(*s.group_by);
    return out;
}

} // namespace feedql
