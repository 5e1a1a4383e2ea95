#pragma once

#include "feedql/capabilities.hpp"
#include "feedql/eval.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace feedql {

struct FeedsetSource {
    std::string origin;
    std::optional<Capabilities> capabilities; // nullopt: nothing known, nothing pushed
};

/// An aggregated feed whose entries all carry fs:origin.
struct Feedset {
    Feed feed;
    std::vector<FeedsetSource> sources;
};

inline constexpr std::string_view kFeedsetIdBase = "urn:feedql:feedset:";

/// Annotates and concatenates source feeds in the given order. Within one
/// origin a repeated id keeps the entry with the larger updated (first on
/// ties); across origins equal ids stay separate. Throws DuplicateOrigin.
Feedset aggregate(const std::vector<std::pair<std::string, Feed>>& sources,
    std::string_view id_base = kFeedsetIdBase);

struct PushedFilter {
    std::string origin;
    std::optional<FilterExpr> filter;

    /// Query-language text of the pushed filter; empty when nothing is pushed.
    std::string text() const { return filter ? to_text(*filter) : std::string(); }
};

/// Pushed fragments per source plus the residual evaluated at the
/// intermediary. The residual always carries the complete original query.
struct QueryPlan {
    std::vector<PushedFilter> per_source;
    Query residual;

    bool pushes_anything() const;
};

/// Pushes each top-level conjunct to every source whose capabilities cover
/// all of its selectors and operators. Disjunctions push whole or not at all.
QueryPlan plan_query(const Query& q, const std::vector<FeedsetSource>& sources);

/// Source access seam. Implementations must tolerate concurrent calls and
/// report transport failures by throwing.
class Fetcher {
public:
    virtual ~Fetcher() = default;

    /// Empty params mean a plain feed fetch; otherwise the params go to the
    /// source's query endpoint.
    virtual Feed fetch(const std::string& origin, const Params& params) = 0;
};

/// Fetcher that can also look up a source's advertised capabilities.
class SourceClient : public Fetcher {
public:
    /// nullopt when the source advertises nothing usable; throws when the
    /// source itself is unreachable.
    virtual std::optional<Capabilities> discover(const std::string& origin) = 0;
};

struct ExecuteOptions {
    /// Skip failed sources instead of failing the query. Lossy.
    bool partial = false;
    std::function<void(const std::string& origin, const std::string& reason)> on_skipped;
};

struct Execution {
    Feed feed;
    std::size_t entries_transferred = 0;
    std::vector<std::string> skipped;
};

/// Fetches every source concurrently (pushed filter as `q`), aggregates, and
/// evaluates the residual. Throws SourceUnavailable unless options.partial.
Execution execute_plan(const QueryPlan& plan, Fetcher& fetcher, const EvalContext& ctx = {},
    const ExecuteOptions& options = {});

/// Residual evaluation on a feedset: filter, cross-entry and cross-feed
/// functions in order, then shaping.
Feed eval_feedset(const Query& q, const Feedset& fs, const EvalContext& ctx = {});

/// Entries of origin_a with a geo entry of origin_b within radius_km (and,
/// when given, within `seconds` of event time). Throws UnknownOrigin.
Feed cooccur_join(const Feedset& fs, const std::string& origin_a, const std::string& origin_b, double radius_km,
    std::optional<long long> seconds = std::nullopt);

} // namespace feedql
