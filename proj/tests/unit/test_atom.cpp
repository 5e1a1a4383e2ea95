#include "fixtures.hpp"
#include "generate.hpp"
#include "oracle.hpp"

#include "feedql/error.hpp"
#include "feedql/xml.hpp"

#include <doctest.h>

#include <map>

using namespace feedql;

namespace {

const std::string kHead = R"(<feed xmlns="http://www.w3.org/2005/Atom" xmlns:georss="http://www.georss.org/georss">)"
                          "<id>urn:f</id><title>t</title><updated>2009-01-01T00:00:00Z</updated>";

std::string with_entry(const std::string& body)
{
    return kHead + "<entry><id>urn:e</id><title>e</title><updated>2009-01-02T00:00:00Z</updated>" + body + "</entry></feed>";
}

ErrorCode code_of(const std::string& doc)
{
    try {
        parse_feed(doc);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("document was accepted");
    return ErrorCode::MalformedXml;
}

std::size_t count(const std::string& hay, const std::string& needle)
{
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1))
        ++n;
    return n;
}

} // namespace

TEST_CASE("timestamps normalise to UTC and round trip")
{
    CHECK(Timestamp::parse("2009-01-01T02:00:00+02:00")->to_string() == "2009-01-01T00:00:00Z");
    CHECK(Timestamp::parse("2009-01-01t00:00:00z")->to_string() == "2009-01-01T00:00:00Z");
    CHECK(Timestamp::parse("2009-06-30T23:59:59.250Z")->to_string() == "2009-06-30T23:59:59.250Z");
    CHECK(Timestamp::parse("2009-01-01T00:00:00-00:30")->to_string() == "2009-01-01T00:30:00Z");
    CHECK_FALSE(Timestamp::parse("2009-01-01"));
    CHECK_FALSE(Timestamp::parse("2009-13-01T00:00:00Z"));
    CHECK_FALSE(Timestamp::parse("yesterday"));
    CHECK(Timestamp::from_unix_seconds(0).to_string() == "1970-01-01T00:00:00Z");

    gen::Generator g(7);
    for (int i = 0; i < 200; ++i) {
        auto t = g.instant();
        CHECK(Timestamp::parse(t.to_string()) == t);
    }
}

TEST_CASE("minimal feed parses with no entries")
{
    Feed f = parse_feed(kHead + "</feed>");
    CHECK(f.id == "urn:f");
    CHECK(f.title == "t");
    CHECK(f.entries.empty());
}

TEST_CASE("georss point maps to a point shape")
{
    Feed f = parse_feed(with_entry("<georss:point>45.256 -71.92</georss:point>"));
    REQUIRE(f.entries.size() == 1);
    CHECK(f.entries[0].geo == GeoShape::point(45.256, -71.92));
}

TEST_CASE("georss shapes")
{
    auto geo = [](const std::string& el) { return *parse_feed(with_entry(el)).entries[0].geo; };
    CHECK(geo("<georss:box>1 2 3 4</georss:box>") == GeoShape::box({1, 2}, {3, 4}));
    CHECK(geo("<georss:line>0 0\n 0 2  0 4</georss:line>").coords.size() == 3);
    auto poly = geo("<georss:polygon>0 0 0 1 1 1 0 0</georss:polygon>");
    CHECK(poly.kind == GeoShape::Kind::polygon);
    CHECK(poly.coords.size() == 3);
}

TEST_CASE("invalid geo is rejected")
{
    CHECK(code_of(with_entry("<georss:point>95.0 0.0</georss:point>")) == ErrorCode::BadGeo);
    CHECK(code_of(with_entry("<georss:point>1 2 3</georss:point>")) == ErrorCode::BadGeo);
    CHECK(code_of(with_entry("<georss:point>north east</georss:point>")) == ErrorCode::BadGeo);
    CHECK(code_of(with_entry("<georss:box>3 0 1 1</georss:box>")) == ErrorCode::BadGeo);
    CHECK(code_of(with_entry("<georss:line>0 0</georss:line>")) == ErrorCode::BadGeo);
    CHECK(code_of(with_entry("<georss:polygon>0 0 1 1 0 0</georss:polygon>")) == ErrorCode::BadGeo);
    CHECK(code_of(with_entry("<georss:point>0 181</georss:point>")) == ErrorCode::BadGeo);
}

TEST_CASE("parse errors")
{
    CHECK(code_of("<feed") == ErrorCode::MalformedXml);
    CHECK(code_of("<rss version=\"2.0\"/>") == ErrorCode::MalformedXml);
    CHECK(code_of(kHead.substr(0, kHead.find("<id>")) + "<title>t</title><updated>2009-01-01T00:00:00Z</updated></feed>")
        == ErrorCode::MissingRequired);
    CHECK(code_of(kHead + "<entry><id>x</id><title>e</title></entry></feed>") == ErrorCode::MissingRequired);
    CHECK(code_of(kHead + "<entry><id>x</id><title>e</title><updated>soon</updated></entry></feed>")
        == ErrorCode::MissingRequired);
    try {
        parse_feed("<feed>\n<id>x</feed>");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("one entry serializes to exactly one entry element")
{
    auto f = fixtures::feed("urn:f", {fixtures::entry("urn:e", "e", "2009-01-01T00:00:00Z")});
    auto text = serialize_feed(f);
    CHECK(count(text, "<entry>") == 1);
    CHECK(count(text, "</entry>") == 1);
}

TEST_CASE("origin is written in the feedset namespace")
{
    auto f = fixtures::feed("urn:f", {fixtures::entry("urn:e", "e", "2009-01-01T00:00:00Z")});
    f.entries[0].origin = "http://a.example/f";
    auto text = serialize_feed(f);
    CHECK(text.find("xmlns:fs=\"http://ns.feedql.dev/feedset\"") != std::string::npos);
    CHECK(text.find("<fs:origin href=\"http://a.example/f\"/>") != std::string::npos);
    CHECK(parse_feed(text).entries[0].origin == "http://a.example/f");
}

TEST_CASE("polygons are written closed")
{
    auto f = fixtures::feed("urn:f", {fixtures::entry("urn:e", "e", "2009-01-01T00:00:00Z")});
    f.entries[0].geo = GeoShape{GeoShape::Kind::polygon, {{0, 0}, {0, 1}, {1, 1}}};
    auto text = serialize_feed(f);
    CHECK(text.find("<georss:polygon>0 0 0 1 1 1 0 0</georss:polygon>") != std::string::npos);
}

TEST_CASE("serializing an invalid feed throws")
{
    auto f = fixtures::feed("urn:f", {fixtures::entry("", "e", "2009-01-01T00:00:00Z")});
    CHECK_THROWS_AS(serialize_feed(f), Error);
}

TEST_CASE("validate_feed")
{
    auto f = fixtures::tagged_six();
    CHECK(validate_feed(f).empty());

    auto empty_id = f;
    empty_id.entries[2].id = "";
    auto v = validate_feed(empty_id);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "entry.id nonempty");

    auto dup = f;
    dup.entries[4].id = dup.entries[1].id;
    dup.entries[4].updated = fixtures::at("2010-01-01T00:00:00Z");
    v = validate_feed(dup);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "duplicate entry id");
    CHECK(v[0].subject == dup.entries[1].id);

    auto bad = f;
    bad.title = "";
    bad.entries[0].categories.push_back({"", std::nullopt, std::nullopt});
    bad.entries[1].geo = GeoShape::point(91, 0);
    v = validate_feed(bad);
    CHECK(v.size() == 3);
}

TEST_CASE("duplicate detection agrees with a pairwise scan")
{
    gen::Generator g(11);
    for (int round = 0; round < 100; ++round) {
        Feed f = g.feed(15);
        for (auto& e : f.entries)
            if (g.chance(0.3))
                e.id = "urn:gen:" + std::to_string(g.uniform(0, 4));
        std::set<std::string> duplicated;
        for (std::size_t i = 0; i < f.entries.size(); ++i)
            for (std::size_t j = i + 1; j < f.entries.size(); ++j)
                if (f.entries[i].id == f.entries[j].id)
                    duplicated.insert(f.entries[i].id);
        std::set<std::string> reported;
        std::size_t reports = 0;
        for (const auto& v : validate_feed(f))
            if (v.rule == "duplicate entry id") {
                reported.insert(v.subject);
                ++reports;
            }
        CHECK(reported == duplicated);
        CHECK(reports == duplicated.size());
    }
}

TEST_CASE("feedset entries may share ids across origins")
{
    auto f = fixtures::feed("urn:f", {fixtures::entry("x", "a", "2009-01-01T00:00:00Z"), fixtures::entry("x", "b", "2009-01-01T00:00:00Z")});
    f.entries[0].origin = "http://a/";
    f.entries[1].origin = "http://b/";
    CHECK(validate_feed(f).empty());
}

TEST_CASE("representative points")
{
    CHECK(representative_point(GeoShape::point(10, 20)) == LatLon{10, 20});
    CHECK(representative_point(GeoShape::box({0, 0}, {10, 10})) == LatLon{5, 5});
    CHECK(representative_point(GeoShape{GeoShape::Kind::line, {{0, 0}, {0, 2}, {0, 4}}}) == LatLon{0, 2});
}

TEST_CASE("polygon representative point ignores vertex rotation")
{
    gen::Generator g(5);
    for (int i = 0; i < 200; ++i) {
        GeoShape p{GeoShape::Kind::polygon, {}};
        for (int k = g.uniform(3, 7); k > 0; --k)
            p.coords.push_back({g.real(-80, 80), g.real(-170, 170)});
        auto base = representative_point(p);
        for (std::size_t r = 1; r < p.coords.size(); ++r) {
            auto rotated = p;
            std::rotate(rotated.coords.begin(), rotated.coords.begin() + r, rotated.coords.end());
            auto q = representative_point(rotated);
            CHECK(q.lat == doctest::Approx(base.lat).epsilon(1e-12));
            CHECK(q.lon == doctest::Approx(base.lon).epsilon(1e-12));
        }
    }
}

TEST_CASE("generated feeds round trip")
{
    gen::Generator g(2024);
    for (int i = 0; i < 200; ++i) {
        Feed f = g.feed(20);
        Feed back = parse_feed(serialize_feed(f));
        INFO("seed round " << i);
        CHECK(oracle::feed_difference(f, back) == "");
    }
}

TEST_CASE("strictly parsed documents validate")
{
    gen::Generator g(99);
    for (int i = 0; i < 100; ++i) {
        auto text = serialize_feed(g.feed(10));
        CHECK(validate_feed(parse_feed(text, ParseMode::strict)).empty());
    }
    auto dup = kHead + "<entry><id>a</id><title>x</title><updated>2009-01-01T00:00:00Z</updated></entry>"
                       "<entry><id>a</id><title>y</title><updated>2009-01-01T00:00:00Z</updated></entry></feed>";
    CHECK(parse_feed(dup).entries.size() == 2);
    CHECK_THROWS_AS(parse_feed(dup, ParseMode::strict), Error);
}

TEST_CASE("foreign markup survives a parse/serialize cycle")
{
    std::string doc = R"(<feed xmlns="http://www.w3.org/2005/Atom" xmlns:dc="http://purl.org/dc/elements/1.1/" xmlns:m="urn:misc">)"
                      "<id>urn:f</id><title>t</title><updated>2009-01-01T00:00:00Z</updated>"
                      "<subtitle>sub</subtitle><generator uri=\"http://gen\" version=\"1\">gen</generator>"
                      "<entry><id>urn:e</id><title>e</title><updated>2009-01-02T00:00:00Z</updated>"
                      "<rights>CC</rights><contributor><name>zed</name></contributor>"
                      "<dc:subject>maps</dc:subject><m:flag m:level=\"3\" plain=\"p\"/>"
                      "<content type=\"xhtml\"><div xmlns=\"http://www.w3.org/1999/xhtml\">a <b>b</b></div></content>"
                      "</entry></feed>";
    Feed once = parse_feed(doc);
    Feed twice = parse_feed(serialize_feed(once));
    CHECK(oracle::feed_difference(once, twice) == "");
    CHECK(once.extensions.size() == 2);
    CHECK(once.entries[0].extensions.size() == 4);
    auto text = serialize_feed(twice);
    CHECK(text.find("maps") != std::string::npos);
    CHECK(text.find("zed") != std::string::npos);
    REQUIRE(once.entries[0].content);
    CHECK(once.entries[0].content->value.find("<b>b</b>") != std::string::npos);
}

TEST_CASE("text content is escaped")
{
    auto f = fixtures::feed("urn:f", {fixtures::entry("urn:e", "a < b & \"c\"", "2009-01-01T00:00:00Z")});
    f.entries[0].summary = "]]> <tag>";
    Feed back = parse_feed(serialize_feed(f));
    CHECK(back.entries[0].title == "a < b & \"c\"");
    CHECK(back.entries[0].summary == "]]> <tag>");
}
