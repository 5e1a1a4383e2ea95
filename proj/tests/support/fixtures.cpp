#include "fixtures.hpp"

#include "feedql/error.hpp"

#include <httplib.h>

#include <fstream>
#include <random>

namespace fixtures {

Timestamp at(std::string_view rfc3339)
{
    auto t = Timestamp::parse(rfc3339);
    if (!t)
        throw std::runtime_error("bad fixture timestamp " + std::string(rfc3339));
    return *t;
}

Entry entry(std::string id, std::string title, std::string_view updated, std::vector<std::string> categories)
{
    Entry e;
    e.id = std::move(id);
    e.title = std::move(title);
    e.updated = at(updated);
    for (auto& c : categories)
        e.categories.push_back({std::move(c), std::nullopt, std::nullopt});
    return e;
}

Feed feed(std::string id, std::vector<Entry> entries)
{
    Feed f;
    f.id = std::move(id);
    f.title = "fixture";
    f.updated = at("2009-01-01T00:00:00Z");
    f.entries = std::move(entries);
    for (const auto& e : f.entries)
        f.updated = std::max(f.updated, e.updated);
    return f;
}

Feed tagged_six()
{
    return feed("urn:fixture:tagged",
        {
            entry("e1", "one", "2009-01-01T01:00:00Z", {"java"}),
            entry("e2", "two", "2009-01-01T02:00:00Z", {"java", "jsp"}),
            entry("e3", "three", "2009-01-01T03:00:00Z", {"jsp"}),
            entry("e4", "four", "2009-01-01T04:00:00Z", {"xml"}),
            entry("e5", "five", "2009-01-01T05:00:00Z", {"java", "xml"}),
            entry("e6", "six", "2009-01-01T06:00:00Z", {"java", "jsp", "xml"}),
        });
}

Feed burst()
{
    std::vector<Entry> entries;
    const char* times[] = {"10:00", "10:10", "10:20", "10:30", "11:45"};
    int i = 0;
    for (const char* t : times) {
        auto e = entry("b" + std::to_string(++i), std::string("post at ") + t, "2009-03-01T12:00:00Z");
        e.published = at(std::string("2009-03-01T") + t + ":00Z");
        entries.push_back(e);
    }
    return feed("urn:fixture:burst", entries);
}

Member numbered_member(int i)
{
    Member m;
    m.entry.id = "urn:member:" + std::to_string(i);
    m.entry.title = "Member " + std::to_string(i);
    m.entry.updated = Timestamp::from_unix_seconds(1230768000 + 60LL * i);
    m.entry.categories.push_back({i % 2 ? "odd" : "even", std::nullopt, std::nullopt});
    return m;
}

Collection numbered_collection(const std::string& name, int n, std::size_t page_size, std::size_t archive_size)
{
    Collection c(name, {"urn:collection:" + name, "Collection " + name, {{"editor", std::nullopt, std::nullopt}}, at("2009-01-01T00:00:00Z")},
        page_size, archive_size);
    for (int i = 1; i <= n; ++i)
        c = upsert_member(std::move(c), numbered_member(i));
    return c;
}

Collection photo_collection()
{
    Collection c("photos", {"urn:collection:photos", "Photos", {}, at("2009-01-01T00:00:00Z")}, 10, 10);
    const char* cameras[] = {"Nikon D90", "Canon EOS 5D", "Leica M9", "Canon G7", "Nikon D3"};
    for (int i = 1; i <= 5; ++i) {
        Member m;
        m.entry.id = "p" + std::to_string(i);
        m.entry.title = "Photo " + std::to_string(i);
        m.entry.updated = Timestamp::from_unix_seconds(1230768000 + 3600LL * i);
        m.entry.categories.push_back({i <= 3 ? "landscape" : "portrait", std::nullopt, std::nullopt});
        m.entry.geo = GeoShape::point(47.0 + i * 0.01, 8.0);
        m.hidden["camera-model"] = cameras[i - 1];
        m.hidden["shot-at"] = Timestamp::from_unix_seconds(1230000000 + 86400LL * i).to_string();
        c = upsert_member(std::move(c), m);
    }
    return c;
}

std::filesystem::path temp_dir(const std::string& tag)
{
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() / ("feedql-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

RunningServer::RunningServer(FeedService& service) : server_(service)
{
    port_ = server_.bind("127.0.0.1", 0);
    if (port_ < 0)
        throw std::runtime_error("cannot bind test server");
    thread_ = std::thread([this] { server_.listen(); });
    server_.wait_until_ready();
}

RunningServer::~RunningServer()
{
    server_.stop();
    thread_.join();
}

std::string RunningServer::url(const std::string& path) const
{
    return "http://127.0.0.1:" + std::to_string(port_) + path;
}

StaticServer::StaticServer() : server_(std::make_unique<httplib::Server>())
{
    server_->Get(R"(.*)", [this](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(mutex_);
        ++hits_[req.path];
        auto it = documents_.find(req.path);
        if (it == documents_.end()) {
            res.status = 404;
            return;
        }
        res.status = it->second.status;
        res.set_content(it->second.body, it->second.content_type);
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ < 0)
        throw std::runtime_error("cannot bind static server");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

StaticServer::~StaticServer()
{
    server_->stop();
    thread_.join();
}

void StaticServer::put(const std::string& path, std::string content_type, std::string body, int status)
{
    std::lock_guard lock(mutex_);
    documents_[path] = {status, std::move(content_type), std::move(body)};
}

std::string StaticServer::url(const std::string& path) const
{
    return "http://127.0.0.1:" + std::to_string(port_) + path;
}

std::size_t StaticServer::hits(const std::string& path) const
{
    std::lock_guard lock(mutex_);
    auto it = hits_.find(path);
    return it == hits_.end() ? 0 : it->second;
}

void FakeSources::add(const std::string& origin, Feed feed, std::optional<Capabilities> caps)
{
    std::lock_guard lock(mutex_);
    sources_[origin] = {std::move(feed), std::move(caps)};
}

Feed FakeSources::fetch(const std::string& origin, const Params& params)
{
    std::pair<Feed, std::optional<Capabilities>> source;
    {
        std::lock_guard lock(mutex_);
        requests_[origin] = params;
        if (failing_.count(origin) || !sources_.count(origin))
            throw Error(ErrorCode::Transport, "connection refused: " + origin);
        source = sources_.at(origin);
    }
    Feed out = params.empty() ? source.first : eval_query(parse_uri_params(params), source.first);
    transferred_ += out.entries.size();
    return out;
}

std::optional<Capabilities> FakeSources::discover(const std::string& origin)
{
    std::lock_guard lock(mutex_);
    if (failing_.count(origin) || !sources_.count(origin))
        throw Error(ErrorCode::Transport, "connection refused: " + origin);
    return sources_.at(origin).second;
}

std::map<std::string, Params> FakeSources::requests() const
{
    std::lock_guard lock(mutex_);
    return requests_;
}

} // namespace fixtures
