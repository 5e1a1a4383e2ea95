#pragma once

#include "feedql/aggregator.hpp"
#include "feedql/collection.hpp"
#include "feedql/service.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace fixtures {

using namespace feedql;

Timestamp at(std::string_view rfc3339);

Entry entry(std::string id, std::string title, std::string_view updated, std::vector<std::string> categories = {});
Feed feed(std::string id, std::vector<Entry> entries);

/// Six labelled entries for the category queries:
///   e1 java, e2 java jsp, e3 jsp, e4 xml, e5 java xml, e6 java jsp xml
Feed tagged_six();

/// Five entries published 10:00, 10:10, 10:20, 10:30 and 11:45.
Feed burst();

/// `n` members; member i (1-based) is updated i minutes after the base and
/// arrives i-th.
Collection numbered_collection(const std::string& name, int n, std::size_t page_size = 10, std::size_t archive_size = 10);
Member numbered_member(int i);

/// Five photos with hidden camera models; two are Canons (p2, p4).
Collection photo_collection();

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);
void write_file(const std::filesystem::path& path, std::string_view text);

/// HttpServer on an ephemeral loopback port for the lifetime of the object.
class RunningServer {
public:
    explicit RunningServer(FeedService& service);
    ~RunningServer();

    int port() const { return port_; }
    std::string url(const std::string& path = "") const;

private:
    HttpServer server_;
    int port_ = -1;
    std::thread thread_;
};

/// Serves fixed documents by path, for peers that are not feed services.
class StaticServer {
public:
    StaticServer();
    ~StaticServer();

    void put(const std::string& path, std::string content_type, std::string body, int status = 200);
    std::string url(const std::string& path = "") const;
    std::size_t hits(const std::string& path) const;

private:
    struct Document {
        int status;
        std::string content_type;
        std::string body;
    };

    mutable std::mutex mutex_;
    std::map<std::string, Document> documents_;
    std::map<std::string, std::size_t> hits_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = -1;
    std::thread thread_;
};

/// In-memory sources that answer pushed queries by evaluating them, and
/// count the entries they ship.
class FakeSources : public SourceClient {
public:
    void add(const std::string& origin, Feed feed, std::optional<Capabilities> caps = std::nullopt);
    void fail(const std::string& origin) { failing_.insert(origin); }

    Feed fetch(const std::string& origin, const Params& params) override;
    std::optional<Capabilities> discover(const std::string& origin) override;

    std::size_t transferred() const { return transferred_; }
    std::map<std::string, Params> requests() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::pair<Feed, std::optional<Capabilities>>> sources_;
    std::set<std::string> failing_;
    std::map<std::string, Params> requests_;
    std::atomic<std::size_t> transferred_{0};
};

} // namespace fixtures
