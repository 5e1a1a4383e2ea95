#include "feedql/aggregator.hpp"

#include "feedql/error.hpp"
#include "feedql/geo.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <map>
#include <set>

namespace feedql {

namespace {

std::uint64_t fnv1a(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

Feedset aggregate(const std::vector<std::pair<std::string, Feed>>& sources, std::string_view id_base)
{
    Feedset fs;
    std::set<std::string> origins;
    for (const auto& [origin, feed] : sources) {
        if (!origins.insert(origin).second)
            throw Error(ErrorCode::DuplicateOrigin, origin);
        fs.sources.push_back({origin, std::nullopt});
    }

    std::string joined;
    for (const auto& o : origins)
        joined += o + "\n";
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(joined)));
    fs.feed.id = std::string(id_base) + hash;
    fs.feed.title = "Feedset of " + std::to_string(sources.size()) + " source" + (sources.size() == 1 ? "" : "s");

    bool have_updated = false;
    for (const auto& [origin, feed] : sources) {
        if (!have_updated || feed.updated > fs.feed.updated) {
            fs.feed.updated = feed.updated;
            have_updated = true;
        }
        // Index of the kept entry for each id within this origin.
        std::map<std::string, std::size_t> kept;
        std::vector<Entry> block;
        std::vector<std::uint8_t> alive;
        for (const auto& e : feed.entries) {
            auto it = kept.find(e.id);
            if (it != kept.end()) {
                if (e.updated > block[it->second].updated) {
                    alive[it->second] = 0;
                    it->second = block.size();
                } else {
                    continue;
                }
            } else {
                kept.emplace(e.id, block.size());
            }
            block.push_back(e);
            block.back().origin = origin;
            alive.push_back(1);
        }
        for (std::size_t i = 0; i < block.size(); ++i)
            if (alive[i])
                fs.feed.entries.push_back(std::move(block[i]));
    }
    return fs;
}

bool QueryPlan::pushes_anything() const
{
    return std::any_of(per_source.begin(), per_source.end(), [](const PushedFilter& p) { return p.filter.has_value(); });
}

namespace {

bool pushable(const FilterExpr& conjunct, const Capabilities& caps)
{
    bool ok = true;
    conjunct.for_each_predicate([&](const Predicate& p) {
        if (!caps.supports_selector(p.selector) || !caps.supports_operator(p.op))
            ok = false;
    });
    return ok;
}

} // namespace

QueryPlan plan_query(const Query& q, const std::vector<FeedsetSource>& sources)
{
    QueryPlan plan;
    plan.residual = q;
    const auto conjuncts = q.filter ? q.filter->conjuncts() : std::vector<FilterExpr>{};
    for (const auto& source : sources) {
        PushedFilter pushed{source.origin, std::nullopt};
        if (source.capabilities) {
            std::vector<FilterExpr> parts;
            for (const auto& c : conjuncts)
                if (pushable(c, *source.capabilities))
                    parts.push_back(c);
            if (!parts.empty())
                pushed.filter = FilterExpr::make_all(std::move(parts));
        }
        plan.per_source.push_back(std::move(pushed));
    }
    return plan;
}

Feed cooccur_join(const Feedset& fs, const std::string& origin_a, const std::string& origin_b, double radius_km,
    std::optional<long long> seconds)
{
    auto known = [&](const std::string& o) {
        return std::any_of(fs.sources.begin(), fs.sources.end(), [&](const FeedsetSource& s) { return s.origin == o; });
    };
    if (!known(origin_a))
        throw Error(ErrorCode::UnknownOrigin, origin_a);
    if (!known(origin_b))
        throw Error(ErrorCode::UnknownOrigin, origin_b);

    struct Candidate {
        LatLon point;
        long long millis;
    };
    std::vector<Candidate> partners;
    for (const auto& e : fs.feed.entries)
        if (e.origin == origin_b && e.geo)
            partners.push_back({representative_point(*e.geo), e.event_time().unix_millis()});

    const long long gate_ms = seconds ? std::min(*seconds, 1'000'000'000'000LL) * 1000 : 0;
    Feed out = fs.feed;
    out.entries.clear();
    for (const auto& e : fs.feed.entries) {
        if (e.origin != origin_a || !e.geo)
            continue;
        auto here = representative_point(*e.geo);
        auto t = e.event_time().unix_millis();
        bool hit = std::any_of(partners.begin(), partners.end(), [&](const Candidate& p) {
            if (seconds && std::llabs(t - p.millis) > gate_ms)
                return false;
            return geo::haversine_km(here, p.point) <= radius_km;
        });
        if (hit)
            out.entries.push_back(e);
    }
    return out;
}

Feed eval_feedset(const Query& q, const Feedset& fs, const EvalContext& ctx)
{
    Feedset current{filter_feed(q.filter, fs.feed, ctx), fs.sources};
    for (const auto& fn : q.cross_entry) {
        if (const auto* w = std::get_if<WindowFn>(&fn))
            current.feed = eval_window(w->seconds, w->min_count, current.feed);
        else if (const auto* c = std::get_if<ClusterFn>(&fn))
            current.feed = eval_cluster(c->radius_km, c->min_count, current.feed);
        else {
            const auto& co = std::get<CooccurFn>(fn);
            current.feed = cooccur_join(current, co.origin_a, co.origin_b, co.radius_km, co.seconds);
        }
    }
    if (!q.shaping.empty())
        current.feed = apply_shaping(q.shaping, current.feed);
    return current.feed;
}

Execution execute_plan(const QueryPlan& plan, Fetcher& fetcher, const EvalContext& ctx, const ExecuteOptions& options)
{
    std::vector<std::future<Feed>> pending;
    pending.reserve(plan.per_source.size());
    for (const auto& source : plan.per_source) {
        Params params;
        if (source.filter)
            params.emplace_back("q", source.text());
        pending.push_back(std::async(std::launch::async,
            [&fetcher, origin = source.origin, params = std::move(params)] { return fetcher.fetch(origin, params); }));
    }

    Execution result;
    std::vector<std::pair<std::string, Feed>> fetched;
    std::vector<std::string> failed;
    std::optional<SourceUnavailable> first_failure;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const auto& origin = plan.per_source[i].origin;
        try {
            Feed f = pending[i].get();
            result.entries_transferred += f.entries.size();
            fetched.emplace_back(origin, std::move(f));
        } catch (const std::exception& e) {
            if (!first_failure)
                first_failure.emplace(origin, e.what());
            failed.push_back(origin);
            if (options.partial && options.on_skipped)
                options.on_skipped(origin, e.what());
        }
    }
    if (first_failure && !options.partial)
        throw *first_failure;

    Feedset fs = aggregate(fetched);
    // Dead sources stay addressable so cooccur over them yields nothing.
    for (const auto& origin : failed)
        fs.sources.push_back({origin, std::nullopt});
    result.skipped = std::move(failed);
    result.feed = eval_feedset(plan.residual, fs, ctx);
    return result;
}

} // namespace feedql
