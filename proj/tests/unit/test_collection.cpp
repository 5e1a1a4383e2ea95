#include "fixtures.hpp"
#include "generate.hpp"
#include "oracle.hpp"

#include "feedql/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

using namespace feedql;

namespace {

std::vector<std::string> ids(const Feed& f) { return oracle::ids(f.entries); }

std::optional<std::string> link(const Feed& f, const std::string& rel)
{
    for (const auto& l : f.links)
        if (l.rel == rel)
            return l.href;
    return std::nullopt;
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

/// Newest first, ties by id, computed directly from the member list.
std::vector<std::string> recency_order(const Collection& c)
{
    std::vector<const Member*> all = c.by_arrival();
    std::vector<std::pair<long long, std::string>> keyed;
    for (const auto* m : all)
        keyed.emplace_back(-m->entry.updated.unix_millis(), m->entry.id);
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::string> out;
    for (const auto& [_, id] : keyed)
        out.push_back(id);
    return out;
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("upsert_member")
{
    Collection c = fixtures::numbered_collection("c", 0);
    c = upsert_member(std::move(c), fixtures::numbered_member(1));
    CHECK(c.size() == 1);

    auto before = serialize_feed(current_feed(c));
    c = upsert_member(std::move(c), fixtures::numbered_member(1));
    CHECK(c.size() == 1);
    CHECK(serialize_feed(current_feed(c)) == before);

    auto older = fixtures::numbered_member(1);
    older.entry.updated = Timestamp::from_unix_seconds(0);
    CHECK(code_of([&] { upsert_member(c, older); }) == ErrorCode::StaleUpdate);

    auto newer = fixtures::numbered_member(1);
    newer.entry.title = "revised";
    newer.entry.updated = Timestamp::from_unix_seconds(2000000000);
    c = upsert_member(std::move(c), newer);
    CHECK(c.find("urn:member:1")->entry.title == "revised");

    auto nameless = fixtures::numbered_member(2);
    nameless.hidden[""] = "x";
    CHECK(code_of([&] { upsert_member(c, nameless); }) == ErrorCode::InvariantViolation);
}

TEST_CASE("current_feed")
{
    CHECK(current_feed(fixtures::numbered_collection("c", 0)).entries.empty());
    CHECK(ids(current_feed(fixtures::numbered_collection("c", 3)))
        == std::vector<std::string>{"urn:member:3", "urn:member:2", "urn:member:1"});
    auto c = fixtures::numbered_collection("c", 25);
    auto expected = recency_order(c);
    expected.resize(10);
    CHECK(ids(current_feed(c)) == expected);
    CHECK(serialize_feed(current_feed(c)) == serialize_feed(current_feed(fixtures::numbered_collection("c", 25))));
    CHECK(validate_feed(current_feed(c)).empty());
}

TEST_CASE("paged_feed")
{
    auto c = fixtures::numbered_collection("news", 25);
    auto p2 = paged_feed(c, 2);
    CHECK(p2.entries.size() == 10);
    CHECK(link(p2, "next") == "/feeds/news?page=3");
    CHECK(link(p2, "previous") == "/feeds/news?page=1");
    CHECK(link(p2, "self") == "/feeds/news?page=2");
    auto p3 = paged_feed(c, 3);
    CHECK(p3.entries.size() == 5);
    CHECK_FALSE(link(p3, "next"));
    CHECK_FALSE(link(paged_feed(c, 1), "previous"));
    CHECK(code_of([&] { paged_feed(c, 4); }) == ErrorCode::PageOutOfRange);
    CHECK(code_of([&] { paged_feed(c, 0); }) == ErrorCode::PageOutOfRange);
    CHECK(paged_feed(fixtures::numbered_collection("e", 0), 1).entries.empty());
}

TEST_CASE("pages partition the members")
{
    gen::Generator g(12);
    for (int round = 0; round < 30; ++round) {
        Collection c("r", {"urn:r", "r", {}, Timestamp::from_unix_seconds(0)}, static_cast<std::size_t>(g.uniform(1, 7)), 5);
        for (int i = g.uniform(0, 40); i > 0; --i) {
            Member m{g.entry("urn:r:" + std::to_string(g.uniform(0, 30))), {}};
            if (const auto* old = c.find(m.entry.id); old && old->entry.updated > m.entry.updated)
                continue;
            c = upsert_member(std::move(c), m);
        }
        std::vector<std::string> walked;
        for (long long page = 1;; ++page) {
            auto f = paged_feed(c, page);
            auto got = ids(f);
            walked.insert(walked.end(), got.begin(), got.end());
            if (!link(f, "next"))
                break;
        }
        CHECK(walked == recency_order(c));
    }
}

TEST_CASE("archives")
{
    auto c = fixtures::numbered_collection("news", 25);
    CHECK(archive_count(c) == 3);
    CHECK(archive_is_full(c, 1));
    CHECK(archive_is_full(c, 2));
    CHECK_FALSE(archive_is_full(c, 3));
    CHECK(archived_feed(c, 3).entries.size() == 5);

    auto a1 = archived_feed(c, 1);
    std::vector<std::string> oldest;
    for (int i = 1; i <= 10; ++i)
        oldest.push_back("urn:member:" + std::to_string(i));
    CHECK(ids(a1) == oldest);
    CHECK_FALSE(link(a1, "prev-archive"));
    CHECK(link(a1, "next-archive") == "/feeds/news/archive/2");
    CHECK(link(a1, "current") == "/feeds/news");
    CHECK(link(archived_feed(c, 2), "next-archive") == "/feeds/news/archive/3");
    CHECK_FALSE(link(archived_feed(c, 3), "next-archive"));
    CHECK(code_of([&] { archived_feed(c, 4); }) == ErrorCode::ArchiveOutOfRange);
    CHECK(code_of([&] { archived_feed(c, 0); }) == ErrorCode::ArchiveOutOfRange);
}

TEST_CASE("the archive chain covers every member once")
{
    for (int n : {0, 1, 9, 10, 11, 25, 30, 47}) {
        auto c = fixtures::numbered_collection("news", n, 10, 10);
        std::multiset<std::string> seen;
        std::set<std::string> with_current;
        auto cur = current_feed(c);
        for (const auto& id : ids(cur))
            with_current.insert(id);
        auto href = link(cur, "prev-archive");
        while (href) {
            auto index = std::stoll(href->substr(href->rfind('/') + 1));
            auto a = archived_feed(c, index);
            for (const auto& id : ids(a)) {
                seen.insert(id);
                with_current.insert(id);
            }
            href = link(a, "prev-archive");
        }
        CHECK(seen.size() == static_cast<std::size_t>(n));
        CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == static_cast<std::size_t>(n));
        CHECK(with_current.size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("full archives never change")
{
    auto c = fixtures::numbered_collection("news", 25);
    auto before = serialize_feed(archived_feed(c, 2));
    for (int i = 26; i <= 30; ++i)
        c = upsert_member(std::move(c), fixtures::numbered_member(i));
    CHECK(serialize_feed(archived_feed(c, 2)) == before);
    CHECK(archive_is_full(c, 3));
}

TEST_CASE("collection_query over hidden fields")
{
    auto photos = fixtures::photo_collection();
    auto q = parse_uri_params({{"q", "x:camera-model==Canon*"}});
    std::set<std::string> expected;
    for (const auto* m : photos.by_arrival())
        if (m->hidden.count("camera-model") && oracle::glob("Canon*", m->hidden.at("camera-model")))
            expected.insert(m->entry.id);
    auto got = ids(collection_query(photos, q));
    CHECK(std::set<std::string>(got.begin(), got.end()) == expected);
    CHECK(expected == std::set<std::string>{"p2", "p4"});

    CHECK(ids(collection_query(photos, Query{})) == recency_order(photos));

    auto mixed = parse_uri_params({{"q", "x:camera-model==Canon*;category==portrait"}});
    CHECK(ids(collection_query(photos, mixed)) == std::vector<std::string>{"p4"});

    auto range = parse_uri_params({{"q", "x:shot-at=le=" + Timestamp::from_unix_seconds(1230000000 + 86400 * 2).to_string()}});
    auto early = ids(collection_query(photos, range));
    CHECK(std::set<std::string>(early.begin(), early.end()) == std::set<std::string>{"p1", "p2"});

    CHECK(code_of([&] { collection_query(photos, parse_uri_params({{"q", "x:lens==*"}})); }) == ErrorCode::UnknownHiddenField);
    Capabilities declared;
    declared.selectors.push_back({Selector::hidden("lens"), Scope::collection});
    CHECK(collection_query(photos, parse_uri_params({{"q", "x:lens==*"}}), {}, &declared).entries.empty());
    CHECK(code_of([&] { collection_query(photos, parse_uri_params({{"xq", "cooccur(a,b,1)"}})); }) == ErrorCode::CrossFeedFnHere);
}

TEST_CASE("hidden values never reach the output")
{
    gen::Generator g(21);
    Collection c("secret", {"urn:s", "s", {}, Timestamp::from_unix_seconds(0)}, 10, 10);
    for (int i = 0; i < 20; ++i) {
        Member m{g.entry("urn:s:" + std::to_string(i)), {}};
        m.hidden["camera-model"] = "SECRET-" + std::to_string(i) + "-MODEL";
        m.hidden["shot-at"] = "SECRET-TIME-" + std::to_string(i);
        c = upsert_member(std::move(c), m);
    }
    for (int i = 0; i < 100; ++i) {
        Query q = g.query({}, true);
        if (g.chance(0.3))
            q.shaping.group_by = Selector::hidden("camera-model");
        auto text = serialize_feed(collection_query(c, q));
        CHECK(text.find("SECRET") == std::string::npos);
    }
}

TEST_CASE("feed-level queries agree with eval_query")
{
    gen::Generator g(22);
    for (int round = 0; round < 50; ++round) {
        Collection c("agree", {"urn:a", "a", {}, Timestamp::from_unix_seconds(0)}, 10, 10);
        for (int i = g.uniform(0, 30); i > 0; --i)
            c = upsert_member(std::move(c), Member{g.entry("urn:a:" + std::to_string(i)), g.hidden()});
        Query q = g.query();
        CHECK(ids(collection_query(c, q)) == ids(eval_query(q, all_members_feed(c))));
    }
}

TEST_CASE("hidden sidecar")
{
    auto photos = fixtures::photo_collection();
    auto text = serialize_hidden(photos);
    CHECK(text.rfind("p1\tcamera-model\tNikon D90\n", 0) == 0);
    auto records = parse_hidden(text);
    CHECK(records.size() == 10);

    CHECK(code_of([] { parse_hidden("p1\tcamera-model\n"); }) == ErrorCode::BadStore);
    try {
        parse_hidden("p1\ta\tb\nbroken\n");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("save and load")
{
    auto dir = fixtures::temp_dir("collection");
    auto photos = fixtures::photo_collection();
    save_collection(photos, dir);
    CHECK(std::filesystem::exists(dir / "photos.atom"));
    CHECK(read_file(dir / "photos.hidden.tsv") == serialize_hidden(photos));

    auto loaded = load_collection("photos", dir / "photos.atom", dir / "photos.hidden.tsv", 10, 10);
    CHECK(serialize_feed(all_members_feed(loaded)) == serialize_feed(all_members_feed(photos)));
    CHECK(serialize_hidden(loaded) == serialize_hidden(photos));
    CHECK(ids(collection_query(loaded, parse_uri_params({{"q", "x:camera-model==Canon*"}}))).size() == 2);

    fixtures::write_file(dir / "bad.tsv", "ghost\tcamera-model\tX\n");
    CHECK(code_of([&] { load_collection("photos", dir / "photos.atom", dir / "bad.tsv", 10, 10); }) == ErrorCode::BadStore);
    CHECK(code_of([&] { load_collection("photos", dir / "missing.atom", {}, 10, 10); }) == ErrorCode::BadStore);
    std::filesystem::remove_all(dir);
}

TEST_CASE("readers see consistent snapshots while a writer upserts")
{
    CollectionStore store(fixtures::numbered_collection("live", 0));
    std::atomic<bool> done{false};
    std::atomic<int> problems{0};
    std::vector<std::thread> readers;
    for (int r = 0; r < 4; ++r)
        readers.emplace_back([&] {
            std::size_t last = 0;
            while (!done) {
                auto snap = store.snapshot();
                auto f = current_feed(*snap);
                if (snap->size() < last || !validate_feed(f).empty() || f.entries.size() != std::min<std::size_t>(snap->size(), 10))
                    ++problems;
                last = snap->size();
            }
        });
    for (int i = 1; i <= 200; ++i)
        store.upsert(fixtures::numbered_member(i));
    done = true;
    for (auto& t : readers)
        t.join();
    CHECK(problems == 0);
    CHECK(store.snapshot()->size() == 200);
}
