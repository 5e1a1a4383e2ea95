#pragma once

#include "feedql/atom.hpp"
#include "feedql/query.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace feedql {

inline constexpr std::string_view kCapabilitiesNs = "http://ns.feedql.dev/capabilities";
inline constexpr std::string_view kCapabilitiesRel = "http://ns.feedql.dev/rel/capabilities";

enum class Scope { feed, collection };
enum class Tier { open, keyed };

std::string_view to_string(Scope scope);
std::string_view to_string(Tier tier);

struct SelectorCapability {
    Selector selector; // a link selector with rel "*" covers every relation
    Scope scope = Scope::feed;

    friend bool operator==(const SelectorCapability&, const SelectorCapability&) = default;
};

struct FunctionCapability {
    std::string name;
    int arity = 0;

    friend bool operator==(const FunctionCapability&, const FunctionCapability&) = default;
};

/// What a feed's query endpoint accepts. Collection scope is reserved for
/// x: selectors.
struct Capabilities {
    std::vector<SelectorCapability> selectors;
    std::vector<std::string> operators;
    std::vector<FunctionCapability> functions;
    std::vector<std::string> shaping;
    Tier tier = Tier::open;

    bool supports_selector(const Selector& selector) const;
    bool supports_operator(Op op) const;
    bool supports_function(std::string_view name, int arity) const;
    bool supports_shaping(std::string_view name) const;

    friend bool operator==(const Capabilities&, const Capabilities&) = default;
};

/// Every feed-scope feature of the language plus the given collection
/// fields. Cross-feed functions are only listed when `cross_feed` is set.
Capabilities full_capabilities(const std::vector<std::string>& hidden_fields = {}, bool cross_feed = true);

std::string serialize_capabilities(const Capabilities& caps);

/// Throws MalformedXml (including missing attributes or a bad tier) and
/// UnknownScope.
Capabilities parse_capabilities(std::string_view document);

/// Adds or replaces the capability link.
Feed embed_capability_link(Feed feed, const std::string& caps_uri);
std::optional<std::string> discover_from_feed(const Feed& feed);

} // namespace feedql
