#pragma once

#include "feedql/atom.hpp"
#include "feedql/query.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace feedql {

/// Backend-only fields of one collection member.
using HiddenFields = std::map<std::string, std::string>;

struct EvalContext {
    Timestamp now;
    /// When set, geo predicates reject entries without geo; otherwise such
    /// entries pass them.
    bool strict_geo = true;
};

/// Per-entry predicate evaluation. `hidden` supplies x: fields; without it
/// every x: field is absent.
bool match_entry(const FilterExpr& filter, const Entry& entry, const EvalContext& ctx = {},
    const HiddenFields* hidden = nullptr);

namespace kernels {

/// One flag per input entry; 1 keeps the entry.
using Mask = std::vector<std::uint8_t>;

/// Inputs below this size run single-threaded.
inline constexpr std::size_t kParallelThreshold = 64;

/// `hidden` is either empty or parallel to `entries`.
Mask filter_mask(const FilterExpr& filter, std::span<const Entry> entries, std::span<const HiddenFields> hidden,
    const EvalContext& ctx);

/// Keeps entries whose event time lies in some closed interval of `seconds`
/// length holding at least `min_count` event times.
Mask window_mask(std::span<const Entry> entries, long long seconds, long long min_count);

/// Keeps geo entries with at least `min_count` geo entries (itself included)
/// within `radius_km` of their representative point.
Mask cluster_mask(std::span<const Entry> entries, double radius_km, long long min_count);

/// Serial reference versions, kept for differential testing and benchmarks.
namespace reference {

Mask filter_mask(const FilterExpr& filter, std::span<const Entry> entries, std::span<const HiddenFields> hidden,
    const EvalContext& ctx);
Mask window_mask(std::span<const Entry> entries, long long seconds, long long min_count);
Mask cluster_mask(std::span<const Entry> entries, double radius_km, long long min_count);

} // namespace reference

} // namespace kernels
} // namespace feedql
