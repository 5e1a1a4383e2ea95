#pragma once

#include "feedql/kernels.hpp"

#include <optional>
#include <span>

namespace feedql {

/// Keeps matching entries in order. The feed's updated becomes the newest
/// kept entry's (unchanged when nothing is kept). An absent filter returns
/// the feed untouched.
Feed filter_feed(const std::optional<FilterExpr>& filter, const Feed& feed, const EvalContext& ctx = {});

Feed eval_window(long long seconds, long long min_count, const Feed& feed);
Feed eval_cluster(double radius_km, long long min_count, const Feed& feed);

/// group-by, then sort-by (within groups), then start-index, then max-results.
/// Grouped entries are annotated with fs:group.
Feed apply_shaping(const Shaping& shaping, const Feed& feed);

/// Filter, cross-entry functions left to right, shaping. `hidden`, when
/// nonempty, is parallel to feed.entries and feeds x: predicates. Throws
/// CrossFeedFnHere if the query holds a cooccur function.
Feed eval_query(const Query& query, const Feed& feed, const EvalContext& ctx = {},
    std::span<const HiddenFields> hidden = {});

/// First value a selector yields on an entry, as used for grouping.
std::optional<std::string> group_key(const Selector& selector, const Entry& entry);

/// Entries whose mask flag is set, in order.
std::vector<Entry> select(std::span<const Entry> entries, const kernels::Mask& mask);

} // namespace feedql
