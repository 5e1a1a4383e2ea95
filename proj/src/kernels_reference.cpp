#include <algorithm>
#include "feedql/geo.hpp"
#include "feedql/kernels.hpp"

namespace feedql::kernels::reference {

Mask filter_mask(const FilterExpr& filter, std::span<const Entry> entries, std::span<const HiddenFields> hidden,
    const EvalContext& ctx)
{
    Mask mask;
    mask.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        mask.push_back(match_entry(filter, entries[i], ctx, hidden.empty() ? nullptr : &hidden[i]) ? 1 : 0);
    return mask;
}

Mask window_mask(std::span<const Entry> entries, long long seconds, long long min_count)
{
    const std::size_t n = entries.size();
    const long long span_ms = std::min(seconds, 1'000'000'000'000LL) * 1000; // saturate
    std::vector<long long> times;
    for (const auto& e : entries)
        times.push_back(e.event_time().unix_millis());

    // Intervals anchored at each event time are sufficient.
    std::vector<long long> held(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (times[k] >= times[j] && times[k] <= times[j] + span_ms)
                ++held[j];

    Mask mask(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (times[j] <= times[i] && times[i] <= times[j] + span_ms && held[j] >= min_count) {
                mask[i] = 1;
                break;
            }
    return mask;
}

Mask cluster_mask(std::span<const Entry> entries, double radius_km, long long min_count)
{
    Mask mask(entries.size(), 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].geo)
            continue;
        auto here = representative_point(*entries[i].geo);
        long long count = 0;
        for (const auto& other : entries)
            if (other.geo && geo::haversine_km(here, representative_point(*other.geo)) <= radius_km)
                ++count;
        mask[i] = count >= min_count ? 1 : 0;
    }
    return mask;
}

} // namespace feedql::kernels::reference
