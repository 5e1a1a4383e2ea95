#pragma once

#include "feedql/capabilities.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace feedql {

struct CollectionConfig {
    std::string name;
    std::filesystem::path atom;
    std::filesystem::path hidden; // empty: no sidecar
    std::size_t page_size = 10;
    std::size_t archive_size = 10;
    Tier tier = Tier::open;
    std::vector<std::string> keys;
};

struct FeedsetConfig {
    std::string name;
    std::vector<std::string> sources;
    Tier tier = Tier::open;
    std::vector<std::string> keys;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::vector<CollectionConfig> collections;
    std::vector<FeedsetConfig> feedsets;
};

/// Line-oriented `key = value` text with `[collection <name>]` and
/// `[feedset <name>]` sections; `bind = host:port` may precede them.
/// Relative paths resolve against `base_dir`. Throws Error(BadConfig) naming
/// the offending line and key.
ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& path);

} // namespace feedql
