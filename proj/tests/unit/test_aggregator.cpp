#include "fixtures.hpp"
#include "generate.hpp"
#include "oracle.hpp"
#include "scenario.hpp"

#include "feedql/error.hpp"

#include <doctest.h>

#include <set>

using namespace feedql;

namespace {

const std::string kA = "http://a.example/feeds/a";
const std::string kB = "http://b.example/feeds/b";

Entry at_point(const std::string& id, double lat, double lon, std::string_view when = "2009-01-01T00:00:00Z")
{
    auto e = fixtures::entry(id, id, when);
    e.geo = GeoShape::point(lat, lon);
    return e;
}

Feedset pair_set(Entry a, Entry b)
{
    return aggregate({{kA, fixtures::feed("urn:a", {a})}, {kB, fixtures::feed("urn:b", {b})}});
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvariantViolation;
}

} // namespace

TEST_CASE("aggregate annotates origins")
{
    auto three = fixtures::feed("urn:a", {fixtures::entry("1", "a", "2009-01-01T00:00:00Z"), fixtures::entry("2", "b", "2009-01-01T00:00:00Z"),
                                             fixtures::entry("3", "c", "2009-01-01T00:00:00Z")});
    auto fs = aggregate({{kA, three}});
    REQUIRE(fs.feed.entries.size() == 3);
    for (const auto& e : fs.feed.entries)
        CHECK(e.origin == kA);
    CHECK(validate_feed(fs.feed).empty());
    CHECK(fs.feed.id.rfind("urn:feedql:feedset:", 0) == 0);

    auto shared = aggregate({{kA, fixtures::feed("urn:a", {fixtures::entry("x", "a", "2009-01-01T00:00:00Z")})},
        {kB, fixtures::feed("urn:b", {fixtures::entry("x", "b", "2009-01-01T00:00:00Z")})}});
    CHECK(oracle::origin_ids(shared.feed.entries) == std::vector<std::string>{kA + " x", kB + " x"});
    CHECK(validate_feed(shared.feed).empty());

    auto twice = fixtures::feed("urn:a", {fixtures::entry("x", "old", "2009-01-01T00:00:00Z"), fixtures::entry("y", "y", "2009-01-01T00:00:00Z"),
                                             fixtures::entry("x", "new", "2009-01-02T00:00:00Z")});
    auto deduped = aggregate({{kA, twice}});
    auto expected = oracle::evaluate_feedset(Query{}, {{kA, twice}});
    CHECK(oracle::origin_ids(deduped.feed.entries) == oracle::origin_ids(expected));
    REQUIRE(deduped.feed.entries.size() == 2);
    CHECK(deduped.feed.entries[1].title == "new");

    CHECK(code_of([&] { aggregate({{kA, three}, {kA, three}}); }) == ErrorCode::DuplicateOrigin);
}

TEST_CASE("aggregate is permutation-stable per source")
{
    gen::Generator g(5);
    for (int i = 0; i < 50; ++i) {
        auto f1 = g.feed(10, "urn:x:");
        auto f2 = g.feed(10, "urn:x:");
        auto ab = aggregate({{kA, f1}, {kB, f2}});
        auto ba = aggregate({{kB, f2}, {kA, f1}});
        auto left = oracle::origin_ids(ab.feed.entries);
        auto right = oracle::origin_ids(ba.feed.entries);
        CHECK(std::multiset<std::string>(left.begin(), left.end()) == std::multiset<std::string>(right.begin(), right.end()));
        CHECK(ab.feed.id == ba.feed.id);
    }
}

TEST_CASE("plan_query")
{
    Capabilities category_only;
    category_only.selectors.push_back({Selector::atom("category"), Scope::feed});
    category_only.operators = {"eq", "ne"};

    auto q = parse_uri_params({{"q", "category==java;geo:position=within=box(0,0,1,1)"}});
    auto plan = plan_query(q, {{kA, category_only}, {kB, std::nullopt}});
    REQUIRE(plan.per_source.size() == 2);
    CHECK(plan.per_source[0].text() == "category==java");
    CHECK_FALSE(plan.per_source[1].filter);
    CHECK(plan.residual == q);

    auto co = parse_uri_params({{"xq", "cooccur(" + kA + "," + kB + ",5)"}});
    auto co_plan = plan_query(co, {{kA, full_capabilities()}, {kB, full_capabilities()}});
    CHECK_FALSE(co_plan.pushes_anything());
    CHECK(co_plan.residual == co);

    auto everything = parse_uri_params({{"q", "category==java;title==A*;updated=gt=2009-01-01T00:00:00Z"}});
    auto full_plan = plan_query(everything, {{kA, full_capabilities()}, {kB, full_capabilities()}});
    for (const auto& p : full_plan.per_source)
        CHECK(p.text() == to_text(*everything.filter));

    auto disjunction = parse_uri_params({{"q", "(category==java,title==x);category!=jsp"}});
    CHECK(plan_query(disjunction, {{kA, category_only}}).per_source[0].text() == "category!=jsp");

    auto hidden = parse_uri_params({{"q", "x:camera-model==Canon*;category==java"}});
    CHECK(plan_query(hidden, {{kA, full_capabilities()}}).per_source[0].text() == "category==java");
    CHECK(plan_query(hidden, {{kA, full_capabilities({"camera-model"})}}).per_source[0].text()
        == "category==java;x:camera-model==Canon*");
}

TEST_CASE("pushed conjuncts stay within the source's capabilities")
{
    gen::Generator g(6);
    for (int i = 0; i < 300; ++i) {
        auto caps = g.capabilities();
        Query q = g.query({}, true);
        auto plan = plan_query(q, {{kA, caps}});
        const auto& pushed = plan.per_source[0].filter;
        CHECK(plan.residual == q);
        if (!pushed)
            continue;
        Query only;
        only.filter = pushed;
        CHECK(validate_against_capabilities(only, caps).empty());
    }
}

TEST_CASE("execute_plan")
{
    fixtures::FakeSources sources;
    auto six = fixtures::tagged_six();
    auto burst = fixtures::burst();
    for (auto& e : burst.entries)
        e.categories.push_back({"java", std::nullopt, std::nullopt});
    sources.add(kA, six, full_capabilities());
    sources.add(kB, burst);

    auto q = parse_uri_params({{"q", "category==java"}});
    std::vector<FeedsetSource> discovered = {{kA, sources.discover(kA)}, {kB, sources.discover(kB)}};
    auto run = execute_plan(plan_query(q, discovered), sources);
    auto naive = oracle::evaluate_feedset(q, {{kA, six}, {kB, burst}});
    CHECK(oracle::origin_ids(run.feed.entries) == oracle::origin_ids(naive));
    CHECK(run.entries_transferred == 4 + 5);
    CHECK(sources.requests().at(kA) == Params{{"q", "category==java"}});
    CHECK(sources.requests().at(kB).empty());
    CHECK(validate_feed(run.feed).empty());

    auto identity = execute_plan(plan_query(Query{}, discovered), sources);
    CHECK(oracle::origin_ids(identity.feed.entries) == oracle::origin_ids(aggregate({{kA, six}, {kB, burst}}).feed.entries));

    sources.fail(kB);
    try {
        execute_plan(plan_query(q, discovered), sources);
        FAIL("no failure");
    } catch (const SourceUnavailable& e) {
        CHECK(e.code() == ErrorCode::SourceUnavailable);
        CHECK(std::string(e.what()).find(kB) != std::string::npos);
    }

    std::vector<std::string> skipped;
    ExecuteOptions partial;
    partial.partial = true;
    partial.on_skipped = [&](const std::string& origin, const std::string&) { skipped.push_back(origin); };
    auto lossy = execute_plan(plan_query(q, discovered), sources, {}, partial);
    CHECK(skipped == std::vector<std::string>{kB});
    CHECK(lossy.skipped == skipped);
    CHECK(oracle::origin_ids(lossy.feed.entries) == oracle::origin_ids(oracle::evaluate_feedset(q, {{kA, six}})));
}

TEST_CASE("cooccur_join")
{
    auto fs = pair_set(at_point("a", 0, 0), at_point("b", 0.05, 0));
    CHECK(oracle::ids(cooccur_join(fs, kA, kB, 10).entries) == std::vector<std::string>{"a"});
    CHECK(cooccur_join(fs, kA, kB, 5).entries.empty());
    CHECK(oracle::ids(cooccur_join(fs, kB, kA, 10).entries) == std::vector<std::string>{"b"});

    auto apart = pair_set(at_point("a", 0, 0, "2009-01-01T00:00:00Z"), at_point("b", 0.05, 0, "2009-01-01T02:00:00Z"));
    CHECK(cooccur_join(apart, kA, kB, 10, 3600).entries.empty());
    CHECK(cooccur_join(apart, kA, kB, 10, 7200).entries.size() == 1);

    auto no_geo = pair_set(fixtures::entry("a", "a", "2009-01-01T00:00:00Z"), at_point("b", 0, 0));
    CHECK(cooccur_join(no_geo, kA, kB, 1000).entries.empty());

    CHECK(code_of([&] { cooccur_join(fs, kA, "http://nowhere/", 10); }) == ErrorCode::UnknownOrigin);
}

TEST_CASE("cooccur pairs are symmetric")
{
    gen::Generator g(9);
    for (int i = 0; i < 100; ++i) {
        auto fs = aggregate({{kA, g.feed(15, "urn:a:")}, {kB, g.feed(15, "urn:b:")}});
        double r = g.real(1, 30);
        std::optional<long long> gate;
        if (g.chance(0.5))
            gate = 3600 * g.uniform(1, 24);
        auto a_side = cooccur_join(fs, kA, kB, r, gate).entries;
        auto b_side = cooccur_join(fs, kB, kA, r, gate).entries;
        CHECK(a_side.empty() == b_side.empty());
        for (const auto& e : a_side)
            CHECK(e.origin == kA);
        for (const auto& e : b_side)
            CHECK(e.origin == kB);
    }
}

TEST_CASE("pushdown preserves results and never ships more")
{
    gen::Generator g(10);
    for (int i = 0; i < 100; ++i) {
        auto s = gen::pushdown_scenario(g);
        fixtures::FakeSources sources;
        std::size_t naive_transfer = 0;
        for (std::size_t k = 0; k < s.sources.size(); ++k) {
            sources.add(s.sources[k].first, s.sources[k].second, s.discovered[k].capabilities);
            naive_transfer += s.sources[k].second.entries.size();
        }
        auto plan = plan_query(s.query, s.discovered);
        auto run = execute_plan(plan, sources);
        auto naive = oracle::evaluate_feedset(s.query, s.sources);
        INFO("scenario " << i);
        CHECK(oracle::origin_ids(run.feed.entries) == oracle::origin_ids(naive));
        CHECK(run.entries_transferred <= naive_transfer);
        if (plan.pushes_anything())
            CHECK(run.entries_transferred < naive_transfer);
    }
}
